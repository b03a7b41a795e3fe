// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file spectrum.hpp
 * @brief Band spectra of channels coupled periodically at the points p Z.
 *
 * Reducible systems split into scalar channels. A connecting scalar channel
 * with transfer matrix e^{i phi} T (T real, det T = 1) has bands where
 * |tr(T F(E))| / 2 <= 1, F(E) being the free propagator over one period in
 * (g', g) coordinates; for the delta coupling this is the Kronig-Penney
 * discriminant. A separated scalar channel decouples the period cells and
 * contributes flat bands (infinitely degenerate eigenvalues).
 */

#pragma once

#include "cchan/reduction.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace cchan {

/// One condition placed at every point of p Z. L and M hold the condition's
/// symmetrized pair with the rows of (L M) orthonormalized.
struct PeriodicSystem {
    PeriodicSystem(double p, BoundaryCondition condition);

    int n;
    double period;
    BoundaryCondition bc;
    Matrix L;
    Matrix M;
};

/// D(k) = cos(p k) + alpha / (2 k) sin(p k); small k uses the series.
[[nodiscard]] double kp_discriminant(double alpha_eff, double k, double p);
/// Same function of the energy, continued to E <= 0 through cosh / sinh.
[[nodiscard]] double kp_discriminant_energy(double alpha_eff, double energy, double p);

/// cos(sqrt(E) x) and sin(sqrt(E) x) / sqrt(E), analytic in E.
struct FreeSolutions {
    double c = 1.0;
    double s = 0.0;
};
[[nodiscard]] FreeSolutions free_solutions(double energy, double x);

/// Scalar condition at every point of p Z, given as a 2x2 unitary U.
class ScalarPeriodicBC {
public:
    ScalarPeriodicBC(const Eigen::Matrix2cd& lambda, double period);
    /// Delta coupling of strength alpha (transfer matrix [[1, alpha], [0, 1]]).
    static ScalarPeriodicBC delta(double alpha, double period);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] const Eigen::Matrix2cd& lambda() const noexcept { return lambda_; }
    [[nodiscard]] bool connecting() const noexcept { return connecting_; }
    /// Real, det-one part of the transfer matrix (connecting only).
    [[nodiscard]] const Eigen::Matrix2d& transfer_real() const noexcept { return t_real_; }
    /// tr(T F(E)) / 2 (connecting only).
    [[nodiscard]] double discriminant(double energy) const;
    /// Separated only: sin(phi/2) g + cos(phi/2) g' = 0 at the left end of a
    /// cell and sin(phi/2) g - cos(phi/2) g' = 0 at the right end.
    [[nodiscard]] double cell_eigenfunction_mismatch(double energy) const;
    /// Bound on sqrt(-E) over the spectrum.
    [[nodiscard]] double kappa_max() const noexcept { return kappa_max_; }

private:
    Eigen::Matrix2cd lambda_;
    double period_;
    bool connecting_ = false;
    Eigen::Matrix2d t_real_ = Eigen::Matrix2d::Identity();
    // Separated data: (sin, cos) of half the eigenphase at each cell end.
    double left_sin_ = 0.0, left_cos_ = 0.0, right_sin_ = 0.0, right_cos_ = 0.0;
    double kappa_max_ = 2.0;
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    /// hi is the reporting limit E_max rather than a band edge.
    bool truncated = false;
};

struct SpectralEigenvalue {
    double energy = 0.0;
    int multiplicity = 1;  ///< per period cell when infinitely degenerate
    bool infinite_degeneracy = true;
    bool embedded = false;      ///< strictly inside a band
    bool at_band_edge = false;  ///< coincides with a band end to 1e-9
};

struct BandSpectrum {
    double e_max = 0.0;
    std::vector<Band> bands;
    std::vector<SpectralEigenvalue> eigenvalues;
};

struct BandScanOptions {
    double bisect_tol = 1e-12;  ///< in k (or kappa)
    double min_gap = 1e-8;      ///< narrower gaps are closed
};

[[nodiscard]] BandSpectrum scalar_band_spectrum(const ScalarPeriodicBC& sbc, double e_max,
                                                const BandScanOptions& opt = {});

/// Union of the decoupled channel spectra. Throws NotReducible.
[[nodiscard]] BandSpectrum periodic_spectrum(const PeriodicSystem& system, double e_max,
                                             const BandScanOptions& opt = {},
                                             std::uint64_t seed = 20240601);

/// Scale-free Floquet determinant of the 2n x 2n system for Bloch solutions
/// f(x + p) = e^{i theta} f(x) at energy E; zero iff E is a Bloch eigenvalue.
[[nodiscard]] cplx floquet_determinant_energy(const PeriodicSystem& system, double energy,
                                              double theta);
[[nodiscard]] cplx floquet_determinant(const PeriodicSystem& system, double k, double theta);

struct FloquetMinimum {
    double theta = 0.0;
    double value = 0.0;
};
/// min over theta in [0, 2 pi) of |floquet_determinant_energy|.
[[nodiscard]] FloquetMinimum floquet_min_abs(const PeriodicSystem& system, double energy);

/// Band indicator from the Floquet determinant on a uniform energy grid;
/// runs of grid points with minimum below `threshold` become bands. Used for
/// systems that do not reduce.
[[nodiscard]] BandSpectrum floquet_band_scan(const PeriodicSystem& system, double e_lo,
                                             double e_max, int points, double threshold = 1e-6);

struct Gap {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] double width() const { return hi - lo; }
};
struct GapReport {
    std::vector<Gap> gaps;
    [[nodiscard]] std::size_t count() const { return gaps.size(); }
};

/// Complement of the bands in [lowest band start, e_max]. Isolated
/// eigenvalues inside a gap do not split it.
[[nodiscard]] GapReport gap_report(const BandSpectrum& bs, double min_gap = 1e-8);

/// True when E lies in a band (ends included, with tolerance `tol`).
[[nodiscard]] bool in_bands(const BandSpectrum& bs, double energy, double tol = 0.0);

}  // namespace cchan
