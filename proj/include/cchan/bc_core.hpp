// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bc_core.hpp
 * @brief Self-adjoint boundary conditions at a single interaction point.
 *
 * A point q couples n channels. Boundary values are taken as
 *
 *   G1 f = (f(q-), f(q+)),   G2 f = (-f'(q-), f'(q+)),
 *
 * and every self-adjoint coupling is a 2n-dimensional Lagrangian subspace of
 * the 4n-dimensional space of pairs (G1 f, G2 f). The four parameterizations
 * below (A/B pair, unitary U, symmetrized L/M pair, transfer matrix) all
 * describe such a subspace; BoundaryCondition wraps any of them and caches
 * the subspace projector, which is the object used for equality.
 *
 * Boundary vectors are ordered (f(q-), f(q+), -f'(q-), f'(q+)), each an
 * n-vector.
 */

#pragma once

#include "cchan/errors.hpp"
#include "cchan/linalg.hpp"

#include <array>
#include <optional>
#include <variant>
#include <vector>

namespace cchan {

inline constexpr int kMaxChannels = 64;

struct Tolerances {
    double sa = 1e-9;      ///< self-adjointness, relative to max(1, |inputs|_F)
    double u = 1e-9;       ///< unitarity defect |U*U - 1|_F
    double rank = 1e-9;    ///< relative singular-value floor
    double equal = 1e-8;   ///< projector distance defining equality

    [[nodiscard]] Tolerances scaled(double factor) const {
        return {sa * factor, u * factor, rank * factor, equal * factor};
    }
};

// ---------------------------------------------------------------------------
// Parameterizations
// ---------------------------------------------------------------------------

/// A G1 f = B G2 f with A B* = B A* and rank (A B) = 2n.
class ABForm {
public:
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const Matrix& A() const noexcept { return a_; }
    [[nodiscard]] const Matrix& B() const noexcept { return b_; }

private:
    ABForm(int n, Matrix a, Matrix b) : n_(n), a_(std::move(a)), b_(std::move(b)) {}
    friend ABForm validate_ab(const Matrix&, const Matrix&, const Tolerances&);

    int n_;
    Matrix a_;
    Matrix b_;
};

/// (G1 - i G2) f = U (G1 + i G2) f with U unitary; the one-to-one chart.
class UForm {
public:
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const Matrix& U() const noexcept { return u_; }
    /// n x n block U_jk, j, k in {1, 2}.
    [[nodiscard]] Matrix block(int j, int k) const {
        return u_.block((j - 1) * n_, (k - 1) * n_, n_, n_);
    }

private:
    UForm(int n, Matrix u) : n_(n), u_(std::move(u)) {}
    friend UForm validate_u(const Matrix&, const Tolerances&);

    int n_;
    Matrix u_;
};

/// L G~1 f = M G~2 f in the symmetrized boundary maps
///   G~1 f = (f'(q-) - f'(q+), f(q+) - f(q-)),
///   G~2 f = ((f(q-) + f(q+)) / 2, (f'(q-) + f'(q+)) / 2).
class LMForm {
public:
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const Matrix& L() const noexcept { return l_; }
    [[nodiscard]] const Matrix& M() const noexcept { return m_; }

private:
    LMForm(int n, Matrix l, Matrix m) : n_(n), l_(std::move(l)), m_(std::move(m)) {}
    friend LMForm validate_lm(const Matrix&, const Matrix&, const Tolerances&);

    int n_;
    Matrix l_;
    Matrix m_;
};

/// (f'(q+), f(q+)) = [[C11, C12], [C21, C22]] (f'(q-), f(q-)).
class TransferForm {
public:
    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const Matrix& C11() const noexcept { return c_[0]; }
    [[nodiscard]] const Matrix& C12() const noexcept { return c_[1]; }
    [[nodiscard]] const Matrix& C21() const noexcept { return c_[2]; }
    [[nodiscard]] const Matrix& C22() const noexcept { return c_[3]; }
    /// Full 2n x 2n transfer matrix.
    [[nodiscard]] Matrix matrix() const { return block2x2(c_[0], c_[1], c_[2], c_[3]); }

private:
    TransferForm(int n, std::array<Matrix, 4> c) : n_(n), c_(std::move(c)) {}
    friend TransferForm validate_transfer(const Matrix&, const Matrix&, const Matrix&,
                                          const Matrix&, const Tolerances&);

    int n_;
    std::array<Matrix, 4> c_;
};

/// Orthonormal basis (4n x 2n) of the boundary relation in the
/// (f(q-), f(q+), -f'(q-), f'(q+)) coordinates.
class BoundarySubspace {
public:
    /// Orthonormalizes `spanning` and checks the dimension is exactly 2n.
    static BoundarySubspace from_spanning_set(int n, const Matrix& spanning, double rel_tol = 1e-9);

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] const Matrix& basis() const noexcept { return basis_; }
    [[nodiscard]] Matrix projector() const { return cchan::projector(basis_); }
    /// max over basis pairs of |<x1, y2> - <x2, y1>| (Green identity defect).
    [[nodiscard]] double lagrangian_defect() const;
    /// Distance of a boundary vector from the subspace, relative to its norm.
    [[nodiscard]] double relative_residual(const Vector& v) const;

private:
    BoundarySubspace(int n, Matrix basis) : n_(n), basis_(std::move(basis)) {}

    int n_;
    Matrix basis_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

[[nodiscard]] ABForm validate_ab(const Matrix& a, const Matrix& b, const Tolerances& tol = {});
[[nodiscard]] UForm validate_u(const Matrix& u, const Tolerances& tol = {});
[[nodiscard]] LMForm validate_lm(const Matrix& l, const Matrix& m, const Tolerances& tol = {});
/// Throws NotSelfAdjoint with index() in 1..3 naming the violated relation of
/// C12 C11* = C11 C12*, C21 C22* = C22 C21*, C11 C22* - C12 C21* = 1, or
/// 4..6 for the adjoint-side relations (which must follow from the first three).
[[nodiscard]] TransferForm validate_transfer(const Matrix& c11, const Matrix& c12,
                                             const Matrix& c21, const Matrix& c22,
                                             const Tolerances& tol = {});

/// Frobenius residuals of the six transfer relations, in the order
/// C12C11*-C11C12*, C21C22*-C22C21*, C11C22*-C12C21*-1,
/// C11*C21-C21*C11, C12*C22-C22*C12, C11*C22-C21*C12-1.
[[nodiscard]] std::array<double, 6> transfer_relation_residuals(const Matrix& c11,
                                                                const Matrix& c12,
                                                                const Matrix& c21,
                                                                const Matrix& c22);

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

/// U = -(A - iB)^{-1} (A + iB).
[[nodiscard]] UForm ab_to_u(const ABForm& ab);
/// A = 1 - U, B = i(1 + U).
[[nodiscard]] ABForm u_to_ab(const UForm& u);
/// L = (A D1 + B D2) / 2, M = B D1 - A D2.
[[nodiscard]] LMForm ab_to_lm(const ABForm& ab);
/// A = L K2 - M K1 / 2, B = M K2 / 2 + L K1.
[[nodiscard]] ABForm lm_to_ab(const LMForm& lm);
/// A = [[C12, 0], [C22, -1]], B = [[C11, 1], [C21, 0]].
[[nodiscard]] ABForm transfer_to_ab(const TransferForm& t);
/// Throws NotConnecting when the relation is not a graph over (f'(q-), f(q-)).
[[nodiscard]] TransferForm ab_to_transfer(const ABForm& ab, const Tolerances& tol = {});

[[nodiscard]] BoundarySubspace to_subspace(const ABForm& ab);
/// Uses the closed form basis [(1 + U) / 2; -i (1 - U) / 2], independent of
/// the A/B null-space route.
[[nodiscard]] BoundarySubspace to_subspace(const UForm& u);
[[nodiscard]] BoundarySubspace to_subspace(const LMForm& lm);
[[nodiscard]] BoundarySubspace to_subspace(const TransferForm& t);

/// Frobenius distance between the two orthogonal projectors.
[[nodiscard]] double subspace_distance(const BoundarySubspace& a, const BoundarySubspace& b);

/// Scalar (n = 1) transfer matrices are e^{i theta} times a real matrix of
/// determinant one.
struct ScalarTransferNormalForm {
    double theta = 0.0;
    Eigen::Matrix2d real;
};
[[nodiscard]] ScalarTransferNormalForm scalar_normal_form(const TransferForm& t);

// ---------------------------------------------------------------------------
// Canonical wrapper
// ---------------------------------------------------------------------------

enum class FormKind { AB, U, LM, Transfer };

class BoundaryCondition {
public:
    using Form = std::variant<ABForm, UForm, LMForm, TransferForm>;

    BoundaryCondition(ABForm f);        // NOLINT(google-explicit-constructor)
    BoundaryCondition(UForm f);         // NOLINT(google-explicit-constructor)
    BoundaryCondition(LMForm f);        // NOLINT(google-explicit-constructor)
    BoundaryCondition(TransferForm f);  // NOLINT(google-explicit-constructor)

    [[nodiscard]] int n() const noexcept { return subspace_.n(); }
    [[nodiscard]] FormKind kind() const noexcept { return static_cast<FormKind>(form_.index()); }
    [[nodiscard]] const Form& form() const noexcept { return form_; }
    [[nodiscard]] const BoundarySubspace& subspace() const noexcept { return subspace_; }
    [[nodiscard]] const Matrix& projector() const noexcept { return projector_; }

    [[nodiscard]] ABForm to_ab() const;
    [[nodiscard]] UForm to_u() const;
    [[nodiscard]] LMForm to_lm() const;
    /// nullopt when the condition is not connecting.
    [[nodiscard]] std::optional<TransferForm> to_transfer() const;

    [[nodiscard]] bool same_as(const BoundaryCondition& other, double tol = Tolerances{}.equal) const;

private:
    Form form_;
    BoundarySubspace subspace_;
    Matrix projector_;
};

// ---------------------------------------------------------------------------
// Permutation-invariant model couplings
// ---------------------------------------------------------------------------

enum class CouplingKind { Delta, DeltaPrimeS, DeltaP, DeltaPrime };

struct CouplingSpec {
    CouplingKind kind = CouplingKind::Delta;
    double strength = 0.0;  ///< alpha for Delta/DeltaP, beta for the primed ones

    static CouplingSpec delta(double alpha) { return {CouplingKind::Delta, alpha}; }
    static CouplingSpec delta_prime_s(double beta) { return {CouplingKind::DeltaPrimeS, beta}; }
    static CouplingSpec delta_p(double alpha) { return {CouplingKind::DeltaP, alpha}; }
    static CouplingSpec delta_prime(double beta) { return {CouplingKind::DeltaPrime, beta}; }
    /// Continuity plus vanishing total derivative jump.
    static CouplingSpec kirchhoff() { return delta(0.0); }
};

/// (a, b) with U = a E_2n + b J_2n.
struct CouplingCoefficients {
    cplx a;
    cplx b;
};
[[nodiscard]] CouplingCoefficients coupling_coefficients(const CouplingSpec& spec, int n);

[[nodiscard]] UForm make_coupling(const CouplingSpec& spec, int n);

/// Checks the coupling's defining linear conditions directly on the raw
/// values (f(q-), f(q+), f'(q-), f'(q+)). The componentwise difference
/// relations of delta_p and delta' are imposed between all 2n half-line
/// ends, both within a side and across the point.
[[nodiscard]] bool coupling_domain_check(const CouplingSpec& spec, int n, const Vector& raw,
                                         double tol = 1e-9);

/// Matrix delta interaction: f continuous, f'(q+) - f'(q-) = S f(q) with S
/// Hermitian n x n.
[[nodiscard]] ABForm make_matrix_delta(const Matrix& strength, const Tolerances& tol = {});

/// Converts raw one-sided values to the (G1, G2) boundary vector.
[[nodiscard]] Vector boundary_vector(const Vector& f_minus, const Vector& f_plus,
                                     const Vector& df_minus, const Vector& df_plus);

}  // namespace cchan
