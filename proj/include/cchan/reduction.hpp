// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file reduction.hpp
 * @brief Decoupling of n-channel systems into scalar problems.
 *
 * A system with conditions U(q), q in Q, is reducible when one unitary
 * Theta diagonalizes every block U_jk(q) at once. Each channel s then
 * carries the scalar 2x2 unitary condition (lambda_jk(q, s)).
 */

#pragma once

#include "cchan/bc_core.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cchan {

struct InteractionPoint {
    double q = 0.0;
    BoundaryCondition bc;
};

/// n channels coupled at a finite, strictly separated set of points.
class ChannelSystem {
public:
    /// Sorts the points by q. Throws InvalidSystem on non-finite positions,
    /// coincident points, an empty point list, or mismatched channel counts.
    ChannelSystem(int n, std::vector<InteractionPoint> points);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const std::vector<InteractionPoint>& points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    /// Smallest distance between neighbouring points (infinity for one point).
    [[nodiscard]] double min_gap() const noexcept { return min_gap_; }

private:
    int n_;
    std::vector<InteractionPoint> points_;
    double min_gap_;
};

/// Block U_jk at point index `point`, j, k in {1, 2}.
struct BlockId {
    int point = 0;
    int j = 1;
    int k = 1;
};
[[nodiscard]] std::string to_string(const BlockId& id);

struct CommuteTolerances {
    double rel = 1e-8;          ///< |[X,Y]|_F <= rel |X|_F |Y|_F
    double borderline = 10.0;   ///< factor around `rel` reported as borderline
};

struct ReducibilityVerdict {
    bool reducible = false;
    /// Some test landed within the borderline band of the threshold.
    bool borderline = false;
    /// First failing block (non-normal) or pair (non-commuting).
    std::optional<BlockId> first;
    std::optional<BlockId> second;
    /// Relative defect of the failing test, or the largest passing one.
    double defect = 0.0;
    std::string witness;
};

[[nodiscard]] ReducibilityVerdict is_reducible(const ChannelSystem& system,
                                               const CommuteTolerances& tol = {});

/// Unitary Theta with Theta* X Theta diagonal for every member of a normal,
/// commuting family. Throws NotSimultaneouslyDiagonalizable when the final
/// off-diagonal residual exceeds `tol_diag * max(1, |X|_F)`.
[[nodiscard]] Matrix simultaneous_diagonalizer(const std::vector<Matrix>& family,
                                               std::uint64_t seed = 20240601,
                                               double tol_diag = 1e-8);

struct ReductionResult {
    Matrix theta;
    std::vector<double> q;
    /// blocks[point][channel] = (lambda_jk(q, s)).
    std::vector<std::vector<Eigen::Matrix2cd>> blocks;
    double max_offdiag_residual = 0.0;
    bool borderline = false;

    [[nodiscard]] int n() const noexcept { return static_cast<int>(theta.rows()); }
    /// Scalar (n = 1) condition of channel s at point index i.
    [[nodiscard]] UForm scalar_condition(std::size_t point, int s) const;
};

/// Throws NotReducible (with the witness) when is_reducible fails.
/// Channels are ordered lexicographically by (Re, Im) of lambda_11 at the
/// first point, ties broken by lambda_12, lambda_21, lambda_22 and then by
/// later points.
[[nodiscard]] ReductionResult reduce(const ChannelSystem& system, std::uint64_t seed = 20240601);

/// alpha (f'(q+) + c' f'(q-)) = beta (f(q+) + c f(q-)), componentwise.
struct VectorRelation {
    int c = 1;
    int c_prime = 1;
    double alpha = 0.0;
    double beta = 0.0;
};

/// All relations of the form above satisfied by the condition, normalized to
/// alpha^2 + beta^2 = 1 with the first nonzero coefficient positive. When a
/// sign pair admits every (alpha, beta), both (1, 0) and (0, 1) are returned.
[[nodiscard]] std::vector<VectorRelation> detect_vector_relation(const BoundaryCondition& bc,
                                                                 double tol = 1e-9);

enum class Continuity { Continuous, Anticontinuous, DerivContinuous, DerivAnticontinuous };
[[nodiscard]] std::string_view to_string(Continuity c) noexcept;

[[nodiscard]] std::set<Continuity> continuity_class(const BoundaryCondition& bc,
                                                    double tol = 1e-9);

/// `sigma[j]` is the image of channel j (0-based).
[[nodiscard]] bool permutation_invariant(const BoundaryCondition& bc,
                                         const std::vector<int>& sigma, double tol = 1e-8);

struct ThetaInvariance {
    bool commutes = false;
    bool distinct_eigenvalues = false;
    /// Orthonormal eigenbasis of Theta; set when both flags hold.
    std::optional<Matrix> basis;
};

[[nodiscard]] ThetaInvariance theta_invariant(const ChannelSystem& system, const Matrix& theta,
                                              double tol = 1e-8, double gap_tol = 1e-8);

/// Eigenphases theta_j in [0, 2 pi) of a unitary vertex matrix, ascending.
/// Channel j then obeys (1 - e^{i theta_j}) g(0) = i (1 + e^{i theta_j}) g'(0).
[[nodiscard]] std::vector<double> star_reduce(const Matrix& u);

}  // namespace cchan
