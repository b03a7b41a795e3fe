// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/linalg.hpp"
#include "cchan/errors.hpp"

namespace cchan {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::NotConnecting: return "NotConnecting";
        case ErrorKind::DegenerateSubspace: return "DegenerateSubspace";
        case ErrorKind::InvalidSystem: return "InvalidSystem";
        case ErrorKind::NotSimultaneouslyDiagonalizable:
            return "NotSimultaneouslyDiagonalizable";
        case ErrorKind::NotReducible: return "NotReducible";
        case ErrorKind::OnEssentialSpectrum: return "OnEssentialSpectrum";
        case ErrorKind::NotRegular: return "NotRegular";
        case ErrorKind::WindowTooCoarse: return "WindowTooCoarse";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

Matrix ones(Eigen::Index n) { return Matrix::Constant(n, n, cplx{1.0, 0.0}); }

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
    const Eigen::Index r0 = a.rows();
    const Eigen::Index c0 = a.cols();
    Matrix out(r0 + c.rows(), c0 + b.cols());
    out.topLeftCorner(r0, c0) = a;
    out.topRightCorner(r0, b.cols()) = b;
    out.bottomLeftCorner(c.rows(), c0) = c;
    out.bottomRightCorner(d.rows(), d.cols()) = d;
    return out;
}

Matrix block_diag_repeat(const Matrix& a, int copies) {
    Matrix out = Matrix::Zero(a.rows() * copies, a.cols() * copies);
    for (int i = 0; i < copies; ++i) {
        out.block(i * a.rows(), i * a.cols(), a.rows(), a.cols()) = a;
    }
    return out;
}

Matrix null_space(const Matrix& m, double rel_tol) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * std::max(smax, 1e-300)) ++rank;
    }
    return svd.matrixV().rightCols(m.cols() - rank);
}

Matrix projector(const Matrix& orthonormal_basis) {
    return orthonormal_basis * orthonormal_basis.adjoint();
}

bool is_unitary(const Matrix& u, double tol) {
    if (u.rows() != u.cols()) return false;
    return (u.adjoint() * u - identity(u.rows())).norm() <= tol;
}

double normality_defect(const Matrix& x) {
    return (x * x.adjoint() - x.adjoint() * x).norm();
}

double commutator_norm(const Matrix& x, const Matrix& y) { return (x * y - y * x).norm(); }

SingularRange singular_range(const Matrix& m) {
    if (m.size() == 0) return {};
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    return {s(s.size() - 1), s(0)};
}

Matrix orthonormalize(const Matrix& m) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    return q;
}

void orthonormalize_rows(Matrix& x, Matrix& y) {
    Matrix joined(x.rows(), x.cols() + y.cols());
    joined << x, y;
    Eigen::JacobiSVD<Matrix> svd(joined, Eigen::ComputeThinU);
    const Matrix g = svd.singularValues().cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
    x = g * x;
    y = g * y;
}

}  // namespace cchan
