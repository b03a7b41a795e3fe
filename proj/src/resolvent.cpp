// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace cchan {
namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// sign(x - q), with `side` (+1 / -1) standing in for x = q.
double side_sign(double x, double q, double side) {
    const double s = sign_of(x - q);
    return s != 0.0 ? s : side;
}

// Interpolated column of f at x inside the grid.
Vector interpolate(const Grid& grid, const Matrix& f, Eigen::Index j, double x) {
    const double t = (x - grid.x(j)) / grid.h;
    return (1.0 - t) * f.col(j) + t * f.col(j + 1);
}

int count_negative(const Matrix& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
    int count = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        if (es.eigenvalues()(i) < 0.0) ++count;
    }
    return count;
}

}  // namespace

KreinSystem::KreinSystem(const ChannelSystem& system) : n_(system.n()) {
    const Eigen::Index block = 2 * n_;
    const Eigen::Index dim = block * static_cast<Eigen::Index>(system.size());
    l_ = Matrix::Zero(dim, dim);
    m_ = Matrix::Zero(dim, dim);
    for (std::size_t p = 0; p < system.size(); ++p) {
        const LMForm lm = system.points()[p].bc.to_lm();
        Matrix l = lm.L();
        Matrix m = lm.M();
        orthonormalize_rows(l, m);
        const Eigen::Index off = block * static_cast<Eigen::Index>(p);
        l_.block(off, off, block, block) = l;
        m_.block(off, off, block, block) = m;
        q_.push_back(system.points()[p].q);
    }
}

cplx krein_kappa(cplx zeta) {
    if (zeta.imag() == 0.0 && zeta.real() >= 0.0) {
        throw Error(ErrorKind::OnEssentialSpectrum, "zeta lies on [0, inf)");
    }
    if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) {
        throw Error(ErrorKind::OnEssentialSpectrum, "zeta is not finite");
    }
    return std::sqrt(-zeta);
}

Matrix build_q(const std::vector<double>& points, int n, cplx zeta) {
    const cplx kappa = krein_kappa(zeta);
    const Eigen::Index m = static_cast<Eigen::Index>(points.size());
    const Eigen::Index block = 2 * n;
    Matrix q = Matrix::Zero(block * m, block * m);
    const Matrix e = identity(n);
    for (Eigen::Index l = 0; l < m; ++l) {
        for (Eigen::Index s = 0; s < m; ++s) {
            const double d = points[static_cast<std::size_t>(l)] - points[static_cast<std::size_t>(s)];
            const cplx scale = 0.5 * std::exp(-kappa * std::abs(d));
            const double sg = sign_of(d);
            q.block(l * block, s * block, block, block) =
                scale * block2x2((1.0 / kappa) * e, sg * e, -sg * e, -kappa * e);
        }
    }
    return q;
}

KreinCoefficients krein_coefficients(const KreinSystem& system, cplx zeta, double cond_cap) {
    KreinCoefficients out;
    out.kappa = krein_kappa(zeta);
    out.q = build_q(system.points(), system.n(), zeta);
    const Matrix a = system.M() * out.q - system.L();
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    out.condition = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
    if (!(out.condition <= cond_cap)) {
        std::ostringstream os;
        os << "M Q - L is singular to working precision at zeta = " << zeta.real()
           << (zeta.imag() < 0 ? " - " : " + ") << std::abs(zeta.imag())
           << "i (condition " << out.condition << ")";
        throw Error(ErrorKind::NotRegular, os.str());
    }
    out.ill_conditioned = out.condition > 1e8;
    out.alpha = a.partialPivLu().solve(system.M());
    return out;
}

cplx basis_g(cplx kappa, double q, double x) {
    return std::exp(-kappa * std::abs(x - q)) / (2.0 * kappa);
}

cplx basis_h(cplx kappa, double q, double x) {
    return 0.5 * sign_of(x - q) * std::exp(-kappa * std::abs(x - q));
}

ValueAndDerivative free_resolvent_at(cplx kappa, const Grid& grid, const Matrix& f, double x) {
    const Eigen::Index n = f.rows();
    ValueAndDerivative out{Vector::Zero(n), Vector::Zero(n)};
    // Kernel k(y) = e^{-kappa|x-y|}/(2 kappa); derivative kernel
    // -sign(x - y) e^{-kappa|x-y|} / 2, taken one-sided on each sub-interval.
    auto add_segment = [&](double ya, const Vector& fa, double yb, const Vector& fb) {
        const double w = 0.5 * (yb - ya);
        const double mid = 0.5 * (ya + yb);
        const double sg = sign_of(x - mid);
        const cplx ka = std::exp(-kappa * std::abs(x - ya));
        const cplx kb = std::exp(-kappa * std::abs(x - yb));
        out.value += w * (ka * fa + kb * fb) / (2.0 * kappa);
        out.derivative += -0.5 * sg * w * (ka * fa + kb * fb);
    };
    for (Eigen::Index j = 0; j + 1 < grid.size; ++j) {
        const double ya = grid.x(j);
        const double yb = grid.x(j + 1);
        if (x > ya && x < yb) {
            const Vector fx = interpolate(grid, f, j, x);
            add_segment(ya, f.col(j), x, fx);
            add_segment(x, fx, yb, f.col(j + 1));
        } else {
            add_segment(ya, f.col(j), yb, f.col(j + 1));
        }
    }
    return out;
}

Matrix free_resolvent(cplx kappa, const Grid& grid, const Matrix& f) {
    const Eigen::Index n = f.rows();
    const Eigen::Index size = grid.size;
    if (f.cols() != size) {
        throw Error(ErrorKind::ShapeMismatch, "sample matrix does not match the grid");
    }
    const cplx decay = std::exp(-kappa * grid.h);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(size, grid.h);
    w(0) = w(size - 1) = 0.5 * grid.h;

    Matrix left(n, size);
    Matrix right(n, size);
    left.col(0) = w(0) * f.col(0);
    for (Eigen::Index i = 1; i < size; ++i) left.col(i) = decay * left.col(i - 1) + w(i) * f.col(i);
    right.col(size - 1) = w(size - 1) * f.col(size - 1);
    for (Eigen::Index i = size - 2; i >= 0; --i) {
        right.col(i) = decay * right.col(i + 1) + w(i) * f.col(i);
    }
    Matrix out(n, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        out.col(i) = (left.col(i) + right.col(i) - w(i) * f.col(i)) / (2.0 * kappa);
    }
    return out;
}

ResolventSolution resolve(const KreinSystem& system, cplx zeta, const Grid& grid,
                          const Matrix& f) {
    const int n = system.n();
    if (f.rows() != n || f.cols() != grid.size || grid.size < 2 || !(grid.h > 0.0)) {
        throw Error(ErrorKind::ShapeMismatch, "f must be n x grid.size on a valid grid");
    }
    const KreinCoefficients kc = krein_coefficients(system, zeta);

    ResolventSolution sol;
    sol.grid = grid;
    sol.zeta = zeta;
    sol.kappa = kc.kappa;
    sol.points = system.points();
    sol.condition = kc.condition;
    if (kc.ill_conditioned) {
        std::ostringstream os;
        os << "M Q - L is ill-conditioned (condition " << kc.condition << ")";
        sol.warnings.push_back(os.str());
    }
    const double reach = 12.0 / kc.kappa.real();
    const auto [qmin, qmax] = std::minmax_element(sol.points.begin(), sol.points.end());
    if (grid.x0 > *qmin - reach || grid.back() < *qmax + reach) {
        std::ostringstream os;
        os << "grid should extend at least " << reach
           << " beyond the extreme points for negligible truncation";
        sol.warnings.push_back(os.str());
    }

    const Eigen::Index block = 2 * n;
    const Eigen::Index m = system.m();
    Vector w(block * m);
    for (Eigen::Index s = 0; s < m; ++s) {
        const ValueAndDerivative r =
            free_resolvent_at(kc.kappa, grid, f, sol.points[static_cast<std::size_t>(s)]);
        w.segment(s * block, n) = r.value;
        w.segment(s * block + n, n) = r.derivative;
    }
    sol.coefficients = kc.alpha * w;

    sol.values = free_resolvent(kc.kappa, grid, f);
    for (Eigen::Index s = 0; s < m; ++s) {
        const double q = sol.points[static_cast<std::size_t>(s)];
        const Vector a = sol.coefficients.segment(s * block, n);
        const Vector b = sol.coefficients.segment(s * block + n, n);
        for (Eigen::Index i = 0; i < grid.size; ++i) {
            const double x = grid.x(i);
            sol.values.col(i) -= basis_g(kc.kappa, q, x) * a + basis_h(kc.kappa, q, x) * b;
        }
    }
    return sol;
}

Vector solution_boundary_data(const ResolventSolution& sol, const Matrix& f, std::size_t s) {
    const Eigen::Index n = f.rows();
    const Eigen::Index block = 2 * n;
    const double q = sol.points.at(s);
    const cplx kappa = sol.kappa;
    const ValueAndDerivative r = free_resolvent_at(kappa, sol.grid, f, q);

    Vector raw(4 * n);
    for (int side_index = 0; side_index < 2; ++side_index) {
        const double side = side_index == 0 ? -1.0 : 1.0;
        Vector u = r.value;
        Vector du = r.derivative;
        for (std::size_t l = 0; l < sol.points.size(); ++l) {
            const double ql = sol.points[l];
            const Eigen::Index off = static_cast<Eigen::Index>(l) * block;
            const Vector a = sol.coefficients.segment(off, n);
            const Vector b = sol.coefficients.segment(off + n, n);
            const cplx e = std::exp(-kappa * std::abs(q - ql));
            const double sg = side_sign(q, ql, side);
            u -= (e / (2.0 * kappa)) * a + (0.5 * sg * e) * b;
            du -= (-0.5 * sg * e) * a + (-0.5 * kappa * e) * b;
        }
        raw.segment(side_index * n, n) = u;
        raw.segment(2 * n + side_index * n, n) = du;
    }
    return raw;
}

Matrix green_kernel(const KreinSystem& system, cplx zeta, double x, double y) {
    const KreinCoefficients kc = krein_coefficients(system, zeta);
    const int n = system.n();
    const Eigen::Index block = 2 * n;
    const Eigen::Index dim = block * system.m();
    const Matrix e = identity(n);
    Matrix gx = Matrix::Zero(n, dim);
    Matrix gy = Matrix::Zero(dim, n);
    for (Eigen::Index s = 0; s < system.m(); ++s) {
        const double q = system.points()[static_cast<std::size_t>(s)];
        gx.middleCols(s * block, n) = basis_g(kc.kappa, q, x) * e;
        gx.middleCols(s * block + n, n) = basis_h(kc.kappa, q, x) * e;
        gy.middleRows(s * block, n) = basis_g(kc.kappa, q, y) * e;
        gy.middleRows(s * block + n, n) = basis_h(kc.kappa, q, y) * e;
    }
    const cplx g0 = std::exp(-kc.kappa * std::abs(x - y)) / (2.0 * kc.kappa);
    return g0 * e - gx * kc.alpha * gy;
}

std::vector<BoundState> find_bound_states(const KreinSystem& system, double e_lo, double e_hi,
                                          double e_tol) {
    if (!(e_lo < e_hi) || !(e_hi < 0.0)) {
        throw Error(ErrorKind::ShapeMismatch, "bound-state window must satisfy e_lo < e_hi < 0");
    }
    const Eigen::Index dim = system.L().rows();

    // Boundary relation in the symmetrized coordinates: columns [X; Y] with
    // L X = M Y. Rotating the basis so that X = [X1 0] leaves the Hermitian
    // pencil H(E) = X1* Y1 - X1* Q(E) X1, whose kernel gives the bound states.
    Matrix joined(dim, 2 * dim);
    joined << system.L(), -system.M();
    const Matrix basis = null_space(joined, 1e-9);
    if (basis.cols() != dim) {
        throw Error(ErrorKind::DegenerateSubspace, "boundary relation has the wrong dimension");
    }
    const Matrix x = basis.topRows(dim);
    const Matrix y = basis.bottomRows(dim);
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullV);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > 1e-9) ++rank;
    }
    const Matrix v1 = svd.matrixV().leftCols(rank);
    const Matrix x1 = x * v1;
    const Matrix y1 = y * v1;
    const Matrix xy = x1.adjoint() * y1;

    auto pencil = [&](double energy) {
        const Matrix q = build_q(system.points(), system.n(), cplx(energy, 0.0));
        return Matrix(xy - x1.adjoint() * q * x1);
    };
    auto negatives = [&](double energy) { return count_negative(pencil(energy)); };

    std::vector<BoundState> out;
    if (rank == 0) return out;

    std::function<void(double, int, double, int)> split = [&](double a, int na, double b,
                                                              int nb) {
        if (nb == na) return;
        const double width_tol = e_tol * std::max({std::abs(a), std::abs(b), 1e-300});
        if (b - a <= width_tol) {
            out.push_back({0.5 * (a + b), nb - na});
            return;
        }
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) {
            out.push_back({mid, nb - na});
            return;
        }
        const int nm = negatives(mid);
        split(a, na, mid, nm);
        split(mid, nm, b, nb);
    };
    split(e_lo, negatives(e_lo), e_hi, negatives(e_hi));

    for (const BoundState& b : out) {
        const Matrix a = system.M() * build_q(system.points(), system.n(), cplx(b.energy, 0.0)) -
                         system.L();
        Eigen::JacobiSVD<Matrix> s(a);
        const auto& sv = s.singularValues();
        int null_dim = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) <= 1e-6 * sv(0)) ++null_dim;
        }
        if (null_dim != b.multiplicity) {
            std::ostringstream os;
            os << "eigenvalue count jump " << b.multiplicity << " near E = " << b.energy
               << " disagrees with null dimension " << null_dim;
            throw Error(ErrorKind::WindowTooCoarse, os.str());
        }
    }
    return out;
}

}  // namespace cchan
