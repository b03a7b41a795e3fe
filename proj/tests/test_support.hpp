// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

// Random generators and independent oracles shared by the tests.

#pragma once

#include "cchan/bc_core.hpp"

#include <random>

namespace cchan::testing {

using Rng = std::mt19937_64;

inline Matrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    }
    return m;
}

inline Matrix random_hermitian(Rng& rng, Eigen::Index n) {
    const Matrix a = random_complex(rng, n, n);
    return 0.5 * (a + a.adjoint());
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal divided out.
inline Matrix random_unitary(Rng& rng, Eigen::Index n) {
    const Matrix a = random_complex(rng, n, n);
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

inline Matrix random_diagonal_unitary(Rng& rng, Eigen::Index n) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) = std::polar(1.0, phase(rng));
    return d;
}

/// Random 2n x 2n matrix C with C J C* = J, J = [[0, 1], [-1, 0]]: Cayley
/// transform of J H with H Hermitian. These are exactly the transfer
/// matrices; built without touching the library's conversions.
inline Matrix random_transfer_matrix(Rng& rng, Eigen::Index n, double scale = 0.5) {
    const Matrix e = Matrix::Identity(n, n);
    const Matrix z = Matrix::Zero(n, n);
    Matrix j(2 * n, 2 * n);
    j << z, e, -e, z;
    const Matrix x = scale * j * random_hermitian(rng, 2 * n);
    const Matrix id = Matrix::Identity(2 * n, 2 * n);
    return (id - 0.5 * x).partialPivLu().solve(id + 0.5 * x);
}

/// Projector onto span of the columns of `m` (independent of the library's
/// orthonormalization path).
inline Matrix span_projector(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
    Eigen::Index r = 0;
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-9 * s(0)) ++r;
    }
    const Matrix u = svd.matrixU().leftCols(r);
    return u * u.adjoint();
}

/// Projector onto the kernel of `m`.
inline Matrix kernel_projector(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    Eigen::Index r = 0;
    const auto& s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > 1e-9 * s(0)) ++r;
    }
    const Matrix v = svd.matrixV().rightCols(m.cols() - r);
    return v * v.adjoint();
}

}  // namespace cchan::testing
