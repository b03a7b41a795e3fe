// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace cchan {

ChannelSystem::ChannelSystem(int n, std::vector<InteractionPoint> points)
    : n_(n), points_(std::move(points)), min_gap_(std::numeric_limits<double>::infinity()) {
    if (n < 1 || n > kMaxChannels) {
        throw Error(ErrorKind::InvalidSystem, "channel count must be in [1, 64]");
    }
    if (points_.empty()) {
        throw Error(ErrorKind::InvalidSystem, "system has no interaction points");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].q)) {
            throw Error(ErrorKind::InvalidSystem, "point position is not finite",
                        static_cast<int>(i));
        }
        if (points_[i].bc.n() != n) {
            throw Error(ErrorKind::InvalidSystem, "condition channel count differs from system n",
                        static_cast<int>(i));
        }
    }
    std::stable_sort(points_.begin(), points_.end(),
                     [](const InteractionPoint& a, const InteractionPoint& b) { return a.q < b.q; });
    for (std::size_t i = 1; i < points_.size(); ++i) {
        const double gap = points_[i].q - points_[i - 1].q;
        if (!(gap > 0.0)) {
            throw Error(ErrorKind::InvalidSystem, "interaction points coincide",
                        static_cast<int>(i));
        }
        min_gap_ = std::min(min_gap_, gap);
    }
}

std::string to_string(const BlockId& id) {
    std::ostringstream os;
    os << "U" << id.j << id.k << "(point " << id.point << ")";
    return os.str();
}

namespace {

struct NamedBlock {
    BlockId id;
    Matrix m;
};

std::vector<NamedBlock> collect_blocks(const ChannelSystem& system) {
    std::vector<NamedBlock> out;
    out.reserve(4 * system.size());
    for (std::size_t p = 0; p < system.size(); ++p) {
        const UForm u = system.points()[p].bc.to_u();
        for (int j = 1; j <= 2; ++j) {
            for (int k = 1; k <= 2; ++k) {
                out.push_back({BlockId{static_cast<int>(p), j, k}, u.block(j, k)});
            }
        }
    }
    return out;
}

// Blocks of a unitary are O(1); norms are floored so that blocks which vanish
// up to rounding do not turn round-off into a relative defect of order one.
constexpr double kNormFloor = 1e-6;

double relative(double defect, double norm_x, double norm_y) {
    return defect / (std::max(norm_x, kNormFloor) * std::max(norm_y, kNormFloor));
}

// Eigenbasis of a random Hermitian combination, refined within clusters.
Matrix diagonalize_rec(const std::vector<Matrix>& family, std::mt19937_64& rng, double scale,
                       int depth) {
    const Eigen::Index m = family.front().rows();
    if (m == 1) return Matrix::Identity(1, 1);

    // Traceless parts: what remains to be separated inside this subspace.
    std::vector<Matrix> traceless;
    traceless.reserve(family.size());
    double spread = 0.0;
    for (const Matrix& x : family) {
        Matrix t = x - (x.trace() / static_cast<double>(m)) * identity(m);
        spread = std::max(spread, t.norm());
        traceless.push_back(std::move(t));
    }
    if (spread <= 1e-13 * scale || depth > 64) return identity(m);

    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int attempt = 0; attempt < 4; ++attempt) {
        Matrix h = Matrix::Zero(m, m);
        for (const Matrix& t : traceless) {
            h += coef(rng) * (t + t.adjoint()) + coef(rng) * I_unit * (t - t.adjoint());
        }
        h = 0.5 * (h + h.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        const Eigen::VectorXd& ev = es.eigenvalues();
        const Matrix& vecs = es.eigenvectors();
        const double h_norm = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
        const double gap_tol = 1e-7 * h_norm;

        std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;  // [start, size]
        Eigen::Index start = 0;
        for (Eigen::Index i = 1; i <= m; ++i) {
            if (i == m || ev(i) - ev(i - 1) >= gap_tol) {
                clusters.emplace_back(start, i - start);
                start = i;
            }
        }
        if (clusters.size() == 1 && attempt + 1 < 4) continue;  // unlucky draw

        Matrix out(m, m);
        for (const auto& [s, k] : clusters) {
            const Matrix v = vecs.middleCols(s, k);
            if (k == 1 || clusters.size() == 1) {
                out.middleCols(s, k) = v;
                continue;
            }
            std::vector<Matrix> restricted;
            restricted.reserve(family.size());
            for (const Matrix& x : family) restricted.push_back(v.adjoint() * x * v);
            out.middleCols(s, k) = v * diagonalize_rec(restricted, rng, scale, depth + 1);
        }
        return out;
    }
    return identity(m);
}

double offdiag_norm(const Matrix& d) {
    Matrix off = d;
    off.diagonal().setZero();
    return off.norm();
}

}  // namespace

ReducibilityVerdict is_reducible(const ChannelSystem& system, const CommuteTolerances& tol) {
    const std::vector<NamedBlock> blocks = collect_blocks(system);
    ReducibilityVerdict v;
    v.reducible = true;
    const double hi = tol.rel * tol.borderline;
    const double lo = tol.rel / tol.borderline;

    auto note = [&](double rel_defect) {
        v.defect = std::max(v.defect, rel_defect);
        if (rel_defect > lo && rel_defect <= hi) v.borderline = true;
    };

    for (const NamedBlock& b : blocks) {
        const double nrm = b.m.norm();
        const double rel_defect = relative(normality_defect(b.m), nrm, nrm);
        note(rel_defect);
        if (rel_defect > tol.rel) {
            v.reducible = false;
            v.first = b.id;
            v.defect = rel_defect;
            v.witness = to_string(b.id) + " is not normal";
            return v;
        }
    }
    for (std::size_t a = 0; a < blocks.size(); ++a) {
        for (std::size_t b = a + 1; b < blocks.size(); ++b) {
            const double rel_defect = relative(commutator_norm(blocks[a].m, blocks[b].m),
                                               blocks[a].m.norm(), blocks[b].m.norm());
            note(rel_defect);
            if (rel_defect > tol.rel) {
                v.reducible = false;
                v.first = blocks[a].id;
                v.second = blocks[b].id;
                v.defect = rel_defect;
                v.witness = to_string(blocks[a].id) + " and " + to_string(blocks[b].id) +
                            " do not commute";
                return v;
            }
        }
    }
    return v;
}

Matrix simultaneous_diagonalizer(const std::vector<Matrix>& family, std::uint64_t seed,
                                 double tol_diag) {
    if (family.empty()) {
        throw Error(ErrorKind::ShapeMismatch, "empty matrix family");
    }
    const Eigen::Index m = family.front().rows();
    double scale = 0.0;
    for (const Matrix& x : family) {
        if (x.rows() != m || x.cols() != m) {
            throw Error(ErrorKind::ShapeMismatch, "family members differ in size");
        }
        scale = std::max(scale, x.norm());
    }
    std::mt19937_64 rng(seed);
    Matrix theta = diagonalize_rec(family, rng, std::max(scale, 1e-300), 0);

    // Re-orthonormalize: cluster eigenvectors come from separate solves.
    theta = Eigen::HouseholderQR<Matrix>(theta).householderQ() * identity(m);
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double res = offdiag_norm(theta.adjoint() * family[i] * theta);
        if (res > tol_diag * std::max(1.0, family[i].norm())) {
            std::ostringstream os;
            os << "family member " << i << " keeps off-diagonal residual " << res;
            throw Error(ErrorKind::NotSimultaneouslyDiagonalizable, os.str(),
                        static_cast<int>(i));
        }
    }
    return theta;
}

UForm ReductionResult::scalar_condition(std::size_t point, int s) const {
    const Eigen::Matrix2cd& lam = blocks.at(point).at(static_cast<std::size_t>(s));
    return validate_u(Matrix(lam), Tolerances{}.scaled(10.0));
}

ReductionResult reduce(const ChannelSystem& system, std::uint64_t seed) {
    const ReducibilityVerdict verdict = is_reducible(system);
    if (!verdict.reducible) {
        throw Error(ErrorKind::NotReducible, verdict.witness);
    }
    const std::vector<NamedBlock> blocks = collect_blocks(system);
    std::vector<Matrix> family;
    family.reserve(blocks.size());
    for (const NamedBlock& b : blocks) family.push_back(b.m);

    const Matrix theta = simultaneous_diagonalizer(family, seed);
    const int n = system.n();
    const std::size_t np = system.size();

    // diag[b][s] for every block b in collection order.
    std::vector<Eigen::VectorXcd> diag;
    double residual = 0.0;
    for (const Matrix& x : family) {
        const Matrix d = theta.adjoint() * x * theta;
        residual = std::max(residual, offdiag_norm(d));
        diag.push_back(d.diagonal());
    }

    // Deterministic channel order.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-9;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        for (const Eigen::VectorXcd& d : diag) {
            const cplx x = d(a);
            const cplx y = d(b);
            if (std::abs(x.real() - y.real()) > tie) return x.real() < y.real();
            if (std::abs(x.imag() - y.imag()) > tie) return x.imag() < y.imag();
        }
        return false;
    });

    ReductionResult out;
    out.theta.resize(n, n);
    for (int s = 0; s < n; ++s) out.theta.col(s) = theta.col(order[static_cast<std::size_t>(s)]);
    out.max_offdiag_residual = residual;
    out.borderline = verdict.borderline;
    out.blocks.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
        out.q.push_back(system.points()[p].q);
        out.blocks[p].resize(static_cast<std::size_t>(n));
        for (int s = 0; s < n; ++s) {
            const int src = order[static_cast<std::size_t>(s)];
            Eigen::Matrix2cd lam;
            lam << diag[4 * p + 0](src), diag[4 * p + 1](src), diag[4 * p + 2](src),
                diag[4 * p + 3](src);
            if ((lam.adjoint() * lam - Eigen::Matrix2cd::Identity()).norm() > 1e-8) {
                throw Error(ErrorKind::NotSimultaneouslyDiagonalizable,
                            "recovered scalar block is not unitary", s);
            }
            out.blocks[p][static_cast<std::size_t>(s)] = lam;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear relations between one-sided values
// ---------------------------------------------------------------------------

std::vector<VectorRelation> detect_vector_relation(const BoundaryCondition& bc, double tol) {
    const int n = bc.n();
    const Matrix& v = bc.subspace().basis();
    const Matrix fm = v.topRows(n);
    const Matrix fp = v.middleRows(n, n);
    const Matrix dfm = -v.middleRows(2 * n, n);
    const Matrix dfp = v.bottomRows(n);

    std::vector<VectorRelation> out;
    for (int c : {-1, 1}) {
        for (int cp : {-1, 1}) {
            const Matrix lhs = dfp + static_cast<double>(cp) * dfm;
            const Matrix rhs = fp + static_cast<double>(c) * fm;
            // alpha * lhs - beta * rhs = 0 as a real 2-column system.
            const Eigen::Index rows = lhs.size();
            Eigen::MatrixXd k(2 * rows, 2);
            const Eigen::Map<const Vector> l(lhs.data(), rows);
            const Eigen::Map<const Vector> r(rhs.data(), rows);
            k.col(0) << l.real(), l.imag();
            k.col(1) << -r.real(), -r.imag();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullV);
            const Eigen::Vector2d s = svd.singularValues();
            auto push = [&](Eigen::Vector2d ab) {
                const double first = std::abs(ab(0)) > tol ? ab(0) : ab(1);
                if (first < 0.0) ab = -ab;
                out.push_back({c, cp, ab(0), ab(1)});
            };
            if (s(0) <= tol) {
                push({1.0, 0.0});
                push({0.0, 1.0});
            } else if (s(1) <= tol) {
                push(svd.matrixV().col(1).normalized());
            }
        }
    }
    return out;
}

std::string_view to_string(Continuity c) noexcept {
    switch (c) {
        case Continuity::Continuous: return "Continuous";
        case Continuity::Anticontinuous: return "Anticontinuous";
        case Continuity::DerivContinuous: return "DerivContinuous";
        case Continuity::DerivAnticontinuous: return "DerivAnticontinuous";
    }
    return "Unknown";
}

std::set<Continuity> continuity_class(const BoundaryCondition& bc, double tol) {
    std::set<Continuity> out;
    for (const VectorRelation& r : detect_vector_relation(bc, tol)) {
        // alpha = 0: beta (f(q+) + c f(q-)) = 0.
        if (std::abs(r.alpha) <= tol) {
            out.insert(r.c == -1 ? Continuity::Continuous : Continuity::Anticontinuous);
        }
        // beta = 0: f'(q+) + c' f'(q-) = 0.
        if (std::abs(r.beta) <= tol) {
            out.insert(r.c_prime == -1 ? Continuity::DerivContinuous
                                       : Continuity::DerivAnticontinuous);
        }
    }
    return out;
}

bool permutation_invariant(const BoundaryCondition& bc, const std::vector<int>& sigma,
                           double tol) {
    const int n = bc.n();
    if (static_cast<int>(sigma.size()) != n) {
        throw Error(ErrorKind::ShapeMismatch, "permutation length differs from n");
    }
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    Matrix p = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const int img = sigma[static_cast<std::size_t>(j)];
        if (img < 0 || img >= n || seen[static_cast<std::size_t>(img)]++) {
            throw Error(ErrorKind::ShapeMismatch, "not a permutation");
        }
        p(img, j) = 1.0;
    }
    const Matrix big = block_diag_repeat(p, 4);
    const Matrix& proj = bc.projector();
    return (big * proj * big.adjoint() - proj).norm() <= tol;
}

ThetaInvariance theta_invariant(const ChannelSystem& system, const Matrix& theta, double tol,
                                double gap_tol) {
    const int n = system.n();
    if (theta.rows() != n || theta.cols() != n) {
        throw Error(ErrorKind::ShapeMismatch, "Theta must be n x n");
    }
    ThetaInvariance out;
    out.commutes = true;
    for (const NamedBlock& b : collect_blocks(system)) {
        if (commutator_norm(b.m, theta) > tol * std::max(1.0, b.m.norm() * theta.norm())) {
            out.commutes = false;
            break;
        }
    }
    Eigen::ComplexEigenSolver<Matrix> es(theta);
    const Vector& ev = es.eigenvalues();
    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
            min_gap = std::min(min_gap, std::abs(ev(i) - ev(j)));
        }
    }
    out.distinct_eigenvalues = min_gap > gap_tol;
    if (out.commutes && out.distinct_eigenvalues) {
        Matrix basis = es.eigenvectors();
        for (Eigen::Index j = 0; j < basis.cols(); ++j) basis.col(j).normalize();
        out.basis = std::move(basis);
    }
    return out;
}

std::vector<double> star_reduce(const Matrix& u) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw Error(ErrorKind::ShapeMismatch, "vertex matrix must be square");
    }
    if (!is_unitary(u, 1e-9)) {
        throw Error(ErrorKind::NotUnitary, "vertex matrix is not unitary");
    }
    Eigen::ComplexEigenSolver<Matrix> es(u, false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double t = std::arg(es.eigenvalues()(i));
        if (t < 0.0) t += 2.0 * kPi;
        if (t > 2.0 * kPi - 1e-10) t = 0.0;
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace cchan
