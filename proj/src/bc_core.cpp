// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/bc_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cchan {
namespace {

void require_square_even(const Matrix& m, const char* name) {
    if (m.rows() != m.cols() || m.rows() == 0 || m.rows() % 2 != 0) {
        std::ostringstream os;
        os << name << " must be a non-empty square matrix of even size, got " << m.rows() << "x"
           << m.cols();
        throw Error(ErrorKind::ShapeMismatch, os.str());
    }
    if (m.rows() / 2 > kMaxChannels) {
        throw Error(ErrorKind::ShapeMismatch, "channel count exceeds the supported maximum of 64");
    }
}

void require_finite(const Matrix& m, const char* name) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::ShapeMismatch, std::string(name) + " has non-finite entries");
    }
}

// Shared check for (A, B) and (L, M) pairs: X Y* = Y X* and rank (X Y) = 2n.
void check_self_adjoint_pair(const Matrix& x, const Matrix& y, const Tolerances& tol,
                             const char* xname, const char* yname) {
    require_square_even(x, xname);
    require_square_even(y, yname);
    if (x.rows() != y.rows()) {
        throw Error(ErrorKind::ShapeMismatch,
                    std::string(xname) + " and " + yname + " differ in size");
    }
    require_finite(x, xname);
    require_finite(y, yname);

    const Eigen::Index dim = x.rows();
    Matrix joined(dim, 2 * dim);
    joined << x, y;

    const double tol_sa = tol.sa * std::max(1.0, joined.norm());
    const double sa_defect = (x * y.adjoint() - y * x.adjoint()).norm();
    if (!(sa_defect <= tol_sa)) {
        std::ostringstream os;
        os << "|" << xname << yname << "* - " << yname << xname << "*|_F = " << sa_defect
           << " exceeds " << tol_sa;
        throw Error(ErrorKind::NotSelfAdjoint, os.str());
    }

    const SingularRange joined_sv = singular_range(joined);
    const bool full_rank = joined_sv.min > tol.rank * joined_sv.max;

    // det(Y +- iX) != 0 is the same condition once X Y* = Y X*; both routes
    // are evaluated and must agree.
    const SingularRange plus_sv = singular_range(y + I_unit * x);
    const SingularRange minus_sv = singular_range(y - I_unit * x);
    const bool det_ok = plus_sv.min > tol.rank * plus_sv.max &&
                        minus_sv.min > tol.rank * minus_sv.max;

    if (!full_rank || !det_ok) {
        std::ostringstream os;
        os << "(" << xname << " " << yname << ") is rank deficient: sigma_min/sigma_max = "
           << joined_sv.min / std::max(joined_sv.max, 1e-300);
        if (full_rank != det_ok) os << " (rank and determinant criteria disagree)";
        throw Error(ErrorKind::RankDeficient, os.str());
    }
}

Matrix d1(int n) {
    const Matrix z = Matrix::Zero(n, n);
    return block2x2(z, -identity(n), z, identity(n));
}
Matrix d2(int n) {
    const Matrix z = Matrix::Zero(n, n);
    return block2x2(identity(n), z, identity(n), z);
}
Matrix k1(int n) {
    const Matrix z = Matrix::Zero(n, n);
    return block2x2(identity(n), identity(n), z, z);
}
Matrix k2(int n) {
    const Matrix z = Matrix::Zero(n, n);
    return block2x2(z, z, -identity(n), identity(n));
}

}  // namespace

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ABForm validate_ab(const Matrix& a, const Matrix& b, const Tolerances& tol) {
    check_self_adjoint_pair(a, b, tol, "A", "B");
    return ABForm(static_cast<int>(a.rows() / 2), a, b);
}

UForm validate_u(const Matrix& u, const Tolerances& tol) {
    require_square_even(u, "U");
    require_finite(u, "U");
    const double defect = (u.adjoint() * u - identity(u.rows())).norm();
    if (!(defect <= tol.u)) {
        std::ostringstream os;
        os << "|U*U - 1|_F = " << defect << " exceeds " << tol.u;
        throw Error(ErrorKind::NotUnitary, os.str());
    }
    return UForm(static_cast<int>(u.rows() / 2), u);
}

LMForm validate_lm(const Matrix& l, const Matrix& m, const Tolerances& tol) {
    check_self_adjoint_pair(l, m, tol, "L", "M");
    return LMForm(static_cast<int>(l.rows() / 2), l, m);
}

std::array<double, 6> transfer_relation_residuals(const Matrix& c11, const Matrix& c12,
                                                  const Matrix& c21, const Matrix& c22) {
    const Matrix e = identity(c11.rows());
    return {
        (c12 * c11.adjoint() - c11 * c12.adjoint()).norm(),
        (c21 * c22.adjoint() - c22 * c21.adjoint()).norm(),
        (c11 * c22.adjoint() - c12 * c21.adjoint() - e).norm(),
        (c11.adjoint() * c21 - c21.adjoint() * c11).norm(),
        (c12.adjoint() * c22 - c22.adjoint() * c12).norm(),
        (c11.adjoint() * c22 - c21.adjoint() * c12 - e).norm(),
    };
}

TransferForm validate_transfer(const Matrix& c11, const Matrix& c12, const Matrix& c21,
                               const Matrix& c22, const Tolerances& tol) {
    const Eigen::Index n = c11.rows();
    for (const Matrix* c : {&c11, &c12, &c21, &c22}) {
        if (c->rows() != n || c->cols() != n || n == 0) {
            throw Error(ErrorKind::ShapeMismatch, "transfer blocks must be equal n x n matrices");
        }
        require_finite(*c, "C");
    }
    if (n > kMaxChannels) {
        throw Error(ErrorKind::ShapeMismatch, "channel count exceeds the supported maximum of 64");
    }
    const Matrix full = block2x2(c11, c12, c21, c22);
    const double tol_sa = tol.sa * std::max(1.0, full.norm());
    const auto res = transfer_relation_residuals(c11, c12, c21, c22);
    for (int i = 0; i < 6; ++i) {
        if (!(res[i] <= tol_sa)) {
            std::ostringstream os;
            os << "transfer relation " << (i + 1) << " violated: residual " << res[i]
               << " exceeds " << tol_sa;
            throw Error(ErrorKind::NotSelfAdjoint, os.str(), i + 1);
        }
    }
    return TransferForm(static_cast<int>(n), {c11, c12, c21, c22});
}

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

BoundarySubspace BoundarySubspace::from_spanning_set(int n, const Matrix& spanning,
                                                     double rel_tol) {
    if (spanning.rows() != 4 * n) {
        throw Error(ErrorKind::ShapeMismatch, "spanning set must have 4n rows");
    }
    Eigen::JacobiSVD<Matrix> svd(spanning, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * smax) ++rank;
    }
    if (rank != 2 * n) {
        std::ostringstream os;
        os << "boundary relation has dimension " << rank << ", expected " << 2 * n;
        throw Error(ErrorKind::DegenerateSubspace, os.str());
    }
    return BoundarySubspace(n, svd.matrixU().leftCols(rank));
}

double BoundarySubspace::lagrangian_defect() const {
    const Eigen::Index m = 2 * n_;
    const Matrix v1 = basis_.topRows(m);
    const Matrix v2 = basis_.bottomRows(m);
    return (v1.adjoint() * v2 - v2.adjoint() * v1).cwiseAbs().maxCoeff();
}

double BoundarySubspace::relative_residual(const Vector& v) const {
    const double norm = v.norm();
    if (norm == 0.0) return 0.0;
    const Vector proj = basis_ * (basis_.adjoint() * v);
    return (v - proj).norm() / norm;
}

BoundarySubspace to_subspace(const ABForm& ab) {
    const Eigen::Index dim = ab.A().rows();
    Matrix joined(dim, 2 * dim);
    joined << ab.A(), -ab.B();
    const Matrix ns = null_space(joined, Tolerances{}.rank);
    if (ns.cols() != dim) {
        std::ostringstream os;
        os << "null space of (A | -B) has dimension " << ns.cols() << ", expected " << dim;
        throw Error(ErrorKind::DegenerateSubspace, os.str());
    }
    return BoundarySubspace::from_spanning_set(ab.n(), ns);
}

BoundarySubspace to_subspace(const UForm& u) {
    const Eigen::Index dim = u.U().rows();
    const Matrix e = identity(dim);
    Matrix spanning(2 * dim, dim);
    spanning.topRows(dim) = 0.5 * (e + u.U());
    spanning.bottomRows(dim) = -0.5 * I_unit * (e - u.U());
    return BoundarySubspace::from_spanning_set(u.n(), spanning);
}

BoundarySubspace to_subspace(const LMForm& lm) { return to_subspace(lm_to_ab(lm)); }

BoundarySubspace to_subspace(const TransferForm& t) {
    // Free data z = (f'(q-), f(q-)); (f'(q+), f(q+)) = C z.
    const int n = t.n();
    const Matrix c = t.matrix();
    Matrix spanning = Matrix::Zero(4 * n, 2 * n);
    spanning.block(0, n, n, n) = identity(n);                 // f(q-)
    spanning.block(n, 0, n, 2 * n) = c.bottomRows(n);         // f(q+)
    spanning.block(2 * n, 0, n, n) = -identity(n);            // -f'(q-)
    spanning.block(3 * n, 0, n, 2 * n) = c.topRows(n);        // f'(q+)
    return BoundarySubspace::from_spanning_set(n, spanning);
}

double subspace_distance(const BoundarySubspace& a, const BoundarySubspace& b) {
    if (a.n() != b.n()) return std::numeric_limits<double>::infinity();
    return (a.projector() - b.projector()).norm();
}

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

UForm ab_to_u(const ABForm& ab) {
    const Matrix lhs = ab.A() - I_unit * ab.B();
    const Matrix rhs = ab.A() + I_unit * ab.B();
    const Matrix u = -lhs.partialPivLu().solve(rhs);
    return validate_u(u);
}

ABForm u_to_ab(const UForm& u) {
    const Matrix e = identity(u.U().rows());
    return validate_ab(e - u.U(), I_unit * (e + u.U()));
}

ABForm lm_to_ab(const LMForm& lm) {
    const int n = lm.n();
    const Matrix a = lm.L() * k2(n) - 0.5 * lm.M() * k1(n);
    const Matrix b = 0.5 * lm.M() * k2(n) + lm.L() * k1(n);
    return validate_ab(a, b);
}

LMForm ab_to_lm(const ABForm& ab) {
    const int n = ab.n();
    const Matrix l = 0.5 * (ab.A() * d1(n) + ab.B() * d2(n));
    const Matrix m = ab.B() * d1(n) - ab.A() * d2(n);
    return validate_lm(l, m);
}

ABForm transfer_to_ab(const TransferForm& t) {
    const int n = t.n();
    const Matrix z = Matrix::Zero(n, n);
    const Matrix a = block2x2(t.C12(), z, t.C22(), -identity(n));
    const Matrix b = block2x2(t.C11(), identity(n), t.C21(), z);
    return validate_ab(a, b);
}

TransferForm ab_to_transfer(const ABForm& ab, const Tolerances& tol) {
    const int n = ab.n();
    const Matrix v = to_subspace(ab).basis();
    // Rows: f(q-) [0, n), f(q+) [n, 2n), -f'(q-) [2n, 3n), f'(q+) [3n, 4n).
    Matrix left(2 * n, 2 * n);
    left << -v.middleRows(2 * n, n), v.topRows(n);
    Matrix right(2 * n, 2 * n);
    right << v.bottomRows(n), v.middleRows(n, n);

    const SingularRange sv = singular_range(left);
    if (!(sv.min > tol.rank * sv.max)) {
        std::ostringstream os;
        os << "relation is not a graph over (f'(q-), f(q-)): sigma_min/sigma_max = "
           << sv.min / std::max(sv.max, 1e-300);
        throw Error(ErrorKind::NotConnecting, os.str());
    }
    // C left = right.
    const Matrix c = left.transpose().partialPivLu().solve(right.transpose()).transpose();
    return validate_transfer(c.topLeftCorner(n, n), c.topRightCorner(n, n),
                             c.bottomLeftCorner(n, n), c.bottomRightCorner(n, n), tol);
}

ScalarTransferNormalForm scalar_normal_form(const TransferForm& t) {
    if (t.n() != 1) {
        throw Error(ErrorKind::ShapeMismatch, "scalar normal form requires n = 1");
    }
    const Matrix c = t.matrix();
    Eigen::Index r = 0;
    Eigen::Index col = 0;
    c.cwiseAbs().maxCoeff(&r, &col);
    double theta = std::arg(c(r, col));
    const Matrix rotated = c * std::polar(1.0, -theta);
    ScalarTransferNormalForm out;
    out.real = rotated.real();
    if (out.real.determinant() < 0.0) {
        // Only reachable through rounding for valid input; keep det = +1.
        out.real = -out.real;
        theta += kPi;
    }
    theta = std::fmod(theta, 2.0 * kPi);
    if (theta < 0.0) theta += 2.0 * kPi;
    out.theta = theta;
    return out;
}

// ---------------------------------------------------------------------------
// BoundaryCondition
// ---------------------------------------------------------------------------

BoundaryCondition::BoundaryCondition(ABForm f)
    : form_(std::move(f)), subspace_(to_subspace(std::get<ABForm>(form_))),
      projector_(subspace_.projector()) {}

BoundaryCondition::BoundaryCondition(UForm f)
    : form_(std::move(f)), subspace_(to_subspace(std::get<UForm>(form_))),
      projector_(subspace_.projector()) {}

BoundaryCondition::BoundaryCondition(LMForm f)
    : form_(std::move(f)), subspace_(to_subspace(std::get<LMForm>(form_))),
      projector_(subspace_.projector()) {}

BoundaryCondition::BoundaryCondition(TransferForm f)
    : form_(std::move(f)), subspace_(to_subspace(std::get<TransferForm>(form_))),
      projector_(subspace_.projector()) {}

ABForm BoundaryCondition::to_ab() const {
    struct Visitor {
        ABForm operator()(const ABForm& f) const { return f; }
        ABForm operator()(const UForm& f) const { return u_to_ab(f); }
        ABForm operator()(const LMForm& f) const { return lm_to_ab(f); }
        ABForm operator()(const TransferForm& f) const { return transfer_to_ab(f); }
    };
    return std::visit(Visitor{}, form_);
}

UForm BoundaryCondition::to_u() const {
    if (const auto* u = std::get_if<UForm>(&form_)) return *u;
    return ab_to_u(to_ab());
}

LMForm BoundaryCondition::to_lm() const {
    if (const auto* lm = std::get_if<LMForm>(&form_)) return *lm;
    return ab_to_lm(to_ab());
}

std::optional<TransferForm> BoundaryCondition::to_transfer() const {
    if (const auto* t = std::get_if<TransferForm>(&form_)) return *t;
    try {
        return ab_to_transfer(to_ab());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotConnecting) return std::nullopt;
        throw;
    }
}

bool BoundaryCondition::same_as(const BoundaryCondition& other, double tol) const {
    if (n() != other.n()) return false;
    return (projector_ - other.projector_).norm() <= tol;
}

// ---------------------------------------------------------------------------
// Model couplings
// ---------------------------------------------------------------------------

CouplingCoefficients coupling_coefficients(const CouplingSpec& spec, int n) {
    if (n < 1 || n > kMaxChannels) {
        throw Error(ErrorKind::ShapeMismatch, "channel count must be in [1, 64]");
    }
    if (!std::isfinite(spec.strength)) {
        throw Error(ErrorKind::ShapeMismatch, "coupling strength must be finite");
    }
    const double two_n = 2.0 * n;
    const cplx s = I_unit * spec.strength;
    switch (spec.kind) {
        case CouplingKind::Delta:
            return {-1.0, 2.0 / (two_n + s)};
        case CouplingKind::DeltaPrimeS:
            return {1.0, -2.0 / (two_n - s)};
        case CouplingKind::DeltaP:
            return {(two_n - s) / (two_n + s), -2.0 / (two_n + s)};
        case CouplingKind::DeltaPrime:
            return {-(two_n + s) / (two_n - s), 2.0 / (two_n - s)};
    }
    throw Error(ErrorKind::ShapeMismatch, "unknown coupling kind");
}

UForm make_coupling(const CouplingSpec& spec, int n) {
    const auto [a, b] = coupling_coefficients(spec, n);
    const Matrix u = a * identity(2 * n) + b * ones(2 * n);
    return validate_u(u);
}

bool coupling_domain_check(const CouplingSpec& spec, int n, const Vector& raw, double tol) {
    if (raw.size() != 4 * n) {
        throw Error(ErrorKind::ShapeMismatch, "raw boundary vector must have 4n entries");
    }
    // x: values at the 2n half-line ends, y: derivatives taken away from q.
    Vector x(2 * n);
    Vector y(2 * n);
    x << raw.segment(0, n), raw.segment(n, n);
    y << -raw.segment(2 * n, n), raw.segment(3 * n, n);
    const double scale = tol * std::max(1.0, raw.norm());
    const double w = spec.strength / (2.0 * n);

    auto all_equal = [&](const Vector& v) {
        return (v.array() - v(0)).abs().maxCoeff() <= scale;
    };

    switch (spec.kind) {
        case CouplingKind::Delta:
            return all_equal(x) && std::abs(y.sum() - spec.strength * x(0)) <= scale;
        case CouplingKind::DeltaPrimeS:
            return all_equal(y) && std::abs(x.sum() - spec.strength * y(0)) <= scale;
        case CouplingKind::DeltaP:
            return all_equal(y - w * x) && std::abs(x.sum()) <= scale;
        case CouplingKind::DeltaPrime:
            return all_equal(x - w * y) && std::abs(y.sum()) <= scale;
    }
    return false;
}

ABForm make_matrix_delta(const Matrix& strength, const Tolerances& tol) {
    const Eigen::Index n = strength.rows();
    if (strength.cols() != n || n == 0) {
        throw Error(ErrorKind::ShapeMismatch, "delta strength must be a square matrix");
    }
    if ((strength - strength.adjoint()).norm() > tol.sa * std::max(1.0, strength.norm())) {
        throw Error(ErrorKind::NotSelfAdjoint, "delta strength matrix must be Hermitian");
    }
    const Matrix e = identity(n);
    const Matrix z = Matrix::Zero(n, n);
    return validate_ab(block2x2(e, -e, strength, z), block2x2(z, z, e, e), tol);
}

Vector boundary_vector(const Vector& f_minus, const Vector& f_plus, const Vector& df_minus,
                       const Vector& df_plus) {
    const Eigen::Index n = f_minus.size();
    Vector v(4 * n);
    v << f_minus, f_plus, -df_minus, df_plus;
    return v;
}

}  // namespace cchan
