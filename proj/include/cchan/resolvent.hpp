// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file resolvent.hpp
 * @brief Krein-type resolvent for finitely many interaction points.
 *
 * With kappa = sqrt(-zeta) (Re kappa > 0) and
 *
 *   g_s(x) = exp(-kappa |x - q_s|) / (2 kappa),
 *   h_s(x) = sign(x - q_s) exp(-kappa |x - q_s|) / 2,
 *
 * the resolvent is the free one minus a finite-rank term,
 *
 *   u = R0 f - sum_s (g_s a_s + h_s b_s),   (M Q - L) c = M w,
 *
 * where c stacks (a_s, b_s) per point (g block first) and w stacks
 * ((R0 f)(q_s), (R0 f)'(q_s)).
 */

#pragma once

#include "cchan/reduction.hpp"

#include <string>
#include <vector>

namespace cchan {

/// Points with their (L, M) pairs assembled block-diagonally. Each per-point
/// pair is rescaled so that the rows of (L M) are orthonormal.
class KreinSystem {
public:
    explicit KreinSystem(const ChannelSystem& system);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int m() const noexcept { return static_cast<int>(q_.size()); }
    [[nodiscard]] const std::vector<double>& points() const noexcept { return q_; }
    [[nodiscard]] const Matrix& L() const noexcept { return l_; }
    [[nodiscard]] const Matrix& M() const noexcept { return m_; }

private:
    int n_;
    std::vector<double> q_;
    Matrix l_;
    Matrix m_;
};

/// Principal branch sqrt(-zeta); throws OnEssentialSpectrum for zeta in [0, inf).
[[nodiscard]] cplx krein_kappa(cplx zeta);

/// 2mn x 2mn matrix Q(zeta).
[[nodiscard]] Matrix build_q(const std::vector<double>& points, int n, cplx zeta);

struct KreinCoefficients {
    cplx kappa;
    Matrix q;
    Matrix alpha;  ///< (M Q - L)^{-1} M
    double condition = 0.0;
    bool ill_conditioned = false;  ///< condition above 1e8
};

/// Throws NotRegular when cond(M Q - L) exceeds `cond_cap`.
[[nodiscard]] KreinCoefficients krein_coefficients(const KreinSystem& system, cplx zeta,
                                                   double cond_cap = 1e12);

[[nodiscard]] cplx basis_g(cplx kappa, double q, double x);
[[nodiscard]] cplx basis_h(cplx kappa, double q, double x);

/// Uniform grid x_i = x0 + i h, i < size.
struct Grid {
    double x0 = 0.0;
    double h = 1e-3;
    Eigen::Index size = 0;

    [[nodiscard]] double x(Eigen::Index i) const { return x0 + static_cast<double>(i) * h; }
    [[nodiscard]] double back() const { return x(size - 1); }
};

/// Free resolvent (value and derivative, n-vectors) at an arbitrary x by the
/// trapezoidal rule on the grid, with x inserted as an extra node (f linearly
/// interpolated there) so that the kernel's kink sits on a node.
struct ValueAndDerivative {
    Vector value;
    Vector derivative;
};
[[nodiscard]] ValueAndDerivative free_resolvent_at(cplx kappa, const Grid& grid, const Matrix& f,
                                                   double x);

/// Free resolvent on the grid in O(size) operations.
[[nodiscard]] Matrix free_resolvent(cplx kappa, const Grid& grid, const Matrix& f);

struct ResolventSolution {
    Grid grid;
    cplx zeta;
    cplx kappa;
    Matrix values;        ///< n x size
    Vector coefficients;  ///< c = (a_1, b_1, ..., a_m, b_m)
    std::vector<double> points;
    double condition = 0.0;
    std::vector<std::string> warnings;
};

/// Evaluates (H - zeta)^{-1} f on the grid. `f` is n x grid.size.
[[nodiscard]] ResolventSolution resolve(const KreinSystem& system, cplx zeta, const Grid& grid,
                                        const Matrix& f);

/// Raw one-sided data (u(q-), u(q+), u'(q-), u'(q+)) of a solution at point
/// index `s`, computed from the representation (not from grid values).
[[nodiscard]] Vector solution_boundary_data(const ResolventSolution& sol, const Matrix& f,
                                            std::size_t s);

/// n x n kernel G(zeta; x, y) for x, y off the points.
[[nodiscard]] Matrix green_kernel(const KreinSystem& system, cplx zeta, double x, double y);

struct BoundState {
    double energy = 0.0;
    int multiplicity = 0;
};

/// Eigenvalues in [e_lo, e_hi] (e_hi < 0), located by counting negative
/// eigenvalues of a Hermitian pencil that is monotone in E and bisecting its
/// jumps to relative width `e_tol`. Throws WindowTooCoarse when a jump disagrees with the
/// null dimension of M Q(E) - L at the refined energy.
[[nodiscard]] std::vector<BoundState> find_bound_states(const KreinSystem& system, double e_lo,
                                                        double e_hi = -1e-10,
                                                        double e_tol = 1e-13);

}  // namespace cchan
