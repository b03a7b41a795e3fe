// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

// Small dense complex linear-algebra helpers shared by all modules.

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace cchan {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr cplx I_unit{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// n x n all-ones matrix J_n.
[[nodiscard]] Matrix ones(Eigen::Index n);

[[nodiscard]] Matrix identity(Eigen::Index n);

/// Block matrix [[a, b], [c, d]] from equally sized square blocks.
[[nodiscard]] Matrix block2x2(const Matrix& a, const Matrix& b, const Matrix& c,
                              const Matrix& d);

/// Block-diagonal matrix diag(a, a, ..., a) with `copies` copies.
[[nodiscard]] Matrix block_diag_repeat(const Matrix& a, int copies);

/// Orthonormal basis of the null space of `m`, using singular values below
/// `rel_tol * sigma_max` as zero. Columns are the basis vectors.
[[nodiscard]] Matrix null_space(const Matrix& m, double rel_tol);

/// Orthogonal projector onto the column span of an orthonormal basis.
[[nodiscard]] Matrix projector(const Matrix& orthonormal_basis);

[[nodiscard]] bool is_unitary(const Matrix& u, double tol);

/// Frobenius norm of X X* - X* X.
[[nodiscard]] double normality_defect(const Matrix& x);

/// Frobenius norm of XY - YX.
[[nodiscard]] double commutator_norm(const Matrix& x, const Matrix& y);

/// Smallest and largest singular values.
struct SingularRange {
    double min = 0.0;
    double max = 0.0;
};
[[nodiscard]] SingularRange singular_range(const Matrix& m);

/// Columns of `m` orthonormalized by a Householder QR (same span for full
/// column rank input).
[[nodiscard]] Matrix orthonormalize(const Matrix& m);

/// Left-multiplies x and y by the same invertible matrix so that the rows of
/// (x y) become orthonormal. Requires (x y) to have full row rank.
void orthonormalize_rows(Matrix& x, Matrix& y);

}  // namespace cchan
