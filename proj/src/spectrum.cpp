// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#include "cchan/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace cchan {
namespace {

// Signed spectral variable: t < 0 stands for E = -t^2, t >= 0 for E = t^2.
double energy_of(double t) { return t < 0.0 ? -t * t : t * t; }

double scan_step(double p, double t) { return std::min(0.01, p / 100.0) / (1.0 + std::abs(t)); }

// Largest kappa for which exp(kappa p) stays comfortably finite.
double kappa_cap(double p) { return 700.0 / p; }

/// Roots of fn(E) for E in [-t_lo^2, t_hi^2], bracketed on the adaptive
/// t-grid and bisected in t.
std::vector<double> scan_roots(const std::function<double(double)>& fn, double t_lo, double t_hi,
                               double p, double tol) {
    std::vector<double> roots;
    auto g = [&](double t) { return fn(energy_of(t)); };
    double t0 = -t_lo;
    double g0 = g(t0);
    if (g0 == 0.0) roots.push_back(energy_of(t0));
    while (t0 < t_hi) {
        double t1 = std::min(t_hi, t0 + scan_step(p, t0));
        // Land exactly on t = 0 so E = 0 is always a grid point.
        if (t0 < 0.0 && t1 > 0.0) t1 = 0.0;
        const double g1 = g(t1);
        if (g1 == 0.0) {
            roots.push_back(energy_of(t1));
        } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            double a = t0;
            double b = t1;
            double ga = g0;
            while (b - a > tol) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                const double gm = g(mid);
                if (gm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(energy_of(0.5 * (a + b)));
        }
        t0 = t1;
        g0 = g1;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double rel_tol(double e, double tol) { return tol * std::max(1.0, std::abs(e)); }

// Sorts, joins overlapping bands and closes gaps narrower than min_gap.
std::vector<Band> merge_bands(std::vector<Band> bands, double min_gap) {
    std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
    std::vector<Band> out;
    for (const Band& b : bands) {
        if (!out.empty() && b.lo <= out.back().hi + min_gap) {
            if (b.hi > out.back().hi) {
                out.back().hi = b.hi;
                out.back().truncated = b.truncated;
            } else if (b.hi == out.back().hi) {
                out.back().truncated = out.back().truncated || b.truncated;
            }
        } else {
            out.push_back(b);
        }
    }
    return out;
}

void flag_eigenvalues(BandSpectrum& bs) {
    for (SpectralEigenvalue& ev : bs.eigenvalues) {
        const double tol = rel_tol(ev.energy, 1e-9);
        ev.embedded = false;
        ev.at_band_edge = false;
        for (const Band& b : bs.bands) {
            if (std::abs(ev.energy - b.lo) <= tol || (!b.truncated && std::abs(ev.energy - b.hi) <= tol)) {
                ev.at_band_edge = true;
            } else if (ev.energy > b.lo && ev.energy < b.hi) {
                ev.embedded = true;
            }
        }
    }
}

// Floquet pencil F0 + w F1 at fixed energy; columns act on (a, b) with
// f = cos-type * a + sin-type * b on one cell.
struct FloquetPencil {
    Matrix f0;
    Matrix f1;
    double column_scale = 1.0;
};

FloquetPencil floquet_pencil(const PeriodicSystem& sys, double energy) {
    const int n = sys.n;
    const FreeSolutions fs = free_solutions(energy, sys.period);
    const Matrix e = identity(n);
    const Matrix z = Matrix::Zero(n, n);
    // Right side of the point (x = 0+): f = a, f' = b.
    // Left side (x = 0-): e^{-i theta} (c a + s b, -E s a + c b).
    // Symmetrized data: G1 = (f'(0-) - f'(0+), f(0+) - f(0-)),
    //                   G2 = ((f(0-) + f(0+)) / 2, (f'(0-) + f'(0+)) / 2).
    const Matrix g1_plus = block2x2(z, -e, e, z);
    const Matrix g2_plus = block2x2(0.5 * e, z, z, 0.5 * e);
    const Matrix g1_minus = block2x2(-energy * fs.s * e, fs.c * e, -fs.c * e, -fs.s * e);
    const Matrix g2_minus =
        block2x2(0.5 * fs.c * e, 0.5 * fs.s * e, -0.5 * energy * fs.s * e, 0.5 * fs.c * e);
    FloquetPencil out;
    out.f0 = sys.L * g1_plus - sys.M * g2_plus;
    out.f1 = sys.L * g1_minus - sys.M * g2_minus;
    Matrix stacked(2 * out.f0.rows(), out.f0.cols());
    stacked << out.f0, out.f1;
    for (Eigen::Index j = 0; j < stacked.cols(); ++j) out.column_scale *= stacked.col(j).norm();
    return out;
}

cplx pencil_det(const FloquetPencil& fp, double theta) {
    const Matrix m = fp.f0 + std::polar(1.0, -theta) * fp.f1;
    return m.partialPivLu().determinant() / fp.column_scale;
}

double wrap_angle(double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    return t;
}

}  // namespace

PeriodicSystem::PeriodicSystem(double p, BoundaryCondition condition)
    : n(condition.n()), period(p), bc(std::move(condition)) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw Error(ErrorKind::InvalidSystem, "period must be positive and finite");
    }
    const LMForm lm = bc.to_lm();
    L = lm.L();
    M = lm.M();
    orthonormalize_rows(L, M);
}

double kp_discriminant(double alpha_eff, double k, double p) {
    if (std::abs(k) < 1e-8) {
        const double x = p * k;
        return std::cos(x) + 0.5 * alpha_eff * p * (1.0 - x * x / 6.0);
    }
    return std::cos(p * k) + alpha_eff / (2.0 * k) * std::sin(p * k);
}

double kp_discriminant_energy(double alpha_eff, double energy, double p) {
    const FreeSolutions fs = free_solutions(energy, p);
    return fs.c + 0.5 * alpha_eff * fs.s;
}

FreeSolutions free_solutions(double energy, double x) {
    const double z = energy * x * x;
    if (std::abs(z) < 1e-8) {
        return {1.0 - z / 2.0 + z * z / 24.0, x * (1.0 - z / 6.0 + z * z / 120.0)};
    }
    if (energy > 0.0) {
        const double k = std::sqrt(energy);
        return {std::cos(k * x), std::sin(k * x) / k};
    }
    const double kappa = std::sqrt(-energy);
    return {std::cosh(kappa * x), std::sinh(kappa * x) / kappa};
}

// ---------------------------------------------------------------------------
// Scalar channels
// ---------------------------------------------------------------------------

ScalarPeriodicBC::ScalarPeriodicBC(const Eigen::Matrix2cd& lambda, double period)
    : lambda_(lambda), period_(period) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw Error(ErrorKind::InvalidSystem, "period must be positive and finite");
    }
    const BoundaryCondition bc(validate_u(Matrix(lambda), Tolerances{}.scaled(10.0)));
    const std::optional<TransferForm> t = bc.to_transfer();
    if (t) {
        connecting_ = true;
        const ScalarTransferNormalForm nf = scalar_normal_form(*t);
        t_real_ = nf.real;
        kappa_max_ = 2.0 + 2.0 * t_real_.cwiseAbs().sum();
    } else {
        if (std::abs(lambda(0, 1)) > 1e-8 || std::abs(lambda(1, 0)) > 1e-8) {
            throw Error(ErrorKind::InvalidSystem,
                        "non-connecting scalar condition with coupled sides");
        }
        const double phi_right = std::arg(lambda(0, 0));  // q- side: right end of a cell
        const double phi_left = std::arg(lambda(1, 1));   // q+ side: left end of a cell
        left_sin_ = std::sin(0.5 * phi_left);
        left_cos_ = std::cos(0.5 * phi_left);
        right_sin_ = std::sin(0.5 * phi_right);
        right_cos_ = std::cos(0.5 * phi_right);
        auto robin = [](double s, double c) { return std::abs(c) > 1e-12 ? std::abs(s / c) : 0.0; };
        kappa_max_ = 2.0 + 2.0 * (robin(left_sin_, left_cos_) + robin(right_sin_, right_cos_));
    }
    kappa_max_ = std::min(kappa_max_, kappa_cap(period_));
}

ScalarPeriodicBC ScalarPeriodicBC::delta(double alpha, double period) {
    const UForm u = make_coupling(CouplingSpec::delta(alpha), 1);
    return ScalarPeriodicBC(Eigen::Matrix2cd(u.U()), period);
}

double ScalarPeriodicBC::discriminant(double energy) const {
    const FreeSolutions fs = free_solutions(energy, period_);
    Eigen::Matrix2d f;
    f << fs.c, -energy * fs.s, fs.s, fs.c;
    return 0.5 * (t_real_ * f).trace();
}

double ScalarPeriodicBC::cell_eigenfunction_mismatch(double energy) const {
    const FreeSolutions fs = free_solutions(energy, period_);
    // Start from data satisfying the left-end condition.
    const double g0 = left_cos_;
    const double dg0 = -left_sin_;
    const double g = fs.c * g0 + fs.s * dg0;
    const double dg = -energy * fs.s * g0 + fs.c * dg0;
    return right_sin_ * g - right_cos_ * dg;
}

BandSpectrum scalar_band_spectrum(const ScalarPeriodicBC& sbc, double e_max,
                                  const BandScanOptions& opt) {
    if (!(e_max > 0.0) || !std::isfinite(e_max)) {
        throw Error(ErrorKind::InvalidSystem, "E_max must be positive and finite");
    }
    BandSpectrum bs;
    bs.e_max = e_max;
    const double p = sbc.period();
    const double k_max = std::sqrt(e_max);
    const double kappa_max = sbc.kappa_max();

    if (!sbc.connecting()) {
        // Scan slightly past E_max so a root sitting on the window edge is kept.
        const auto roots = scan_roots(
            [&](double e) { return sbc.cell_eigenfunction_mismatch(e); }, kappa_max,
            k_max * (1.0 + 1e-6), p, opt.bisect_tol);
        for (double e : roots) {
            if (e <= e_max + rel_tol(e_max, 1e-9)) bs.eigenvalues.push_back({e, 1, true, false, false});
        }
        return bs;
    }

    std::vector<double> cuts = scan_roots(
        [&](double e) { return sbc.discriminant(e) - 1.0; }, kappa_max, k_max, p, opt.bisect_tol);
    const std::vector<double> lower = scan_roots(
        [&](double e) { return sbc.discriminant(e) + 1.0; }, kappa_max, k_max, p, opt.bisect_tol);
    cuts.insert(cuts.end(), lower.begin(), lower.end());
    cuts.push_back(-kappa_max * kappa_max);
    cuts.push_back(e_max);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Band> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (hi > e_max) break;
        if (std::abs(sbc.discriminant(0.5 * (lo + hi))) <= 1.0) {
            pieces.push_back({lo, hi, hi == e_max});
        }
    }
    bs.bands = merge_bands(std::move(pieces), opt.min_gap);
    return bs;
}

BandSpectrum periodic_spectrum(const PeriodicSystem& system, double e_max,
                               const BandScanOptions& opt, std::uint64_t seed) {
    const ChannelSystem cs(system.n, {InteractionPoint{0.0, system.bc}});
    const ReductionResult red = reduce(cs, seed);

    BandSpectrum out;
    out.e_max = e_max;
    std::vector<Band> bands;
    std::vector<SpectralEigenvalue> eigs;
    for (int s = 0; s < system.n; ++s) {
        const ScalarPeriodicBC sbc(red.blocks[0][static_cast<std::size_t>(s)], system.period);
        BandSpectrum part = scalar_band_spectrum(sbc, e_max, opt);
        bands.insert(bands.end(), part.bands.begin(), part.bands.end());
        eigs.insert(eigs.end(), part.eigenvalues.begin(), part.eigenvalues.end());
    }
    out.bands = merge_bands(std::move(bands), opt.min_gap);

    std::sort(eigs.begin(), eigs.end(),
              [](const SpectralEigenvalue& a, const SpectralEigenvalue& b) {
                  return a.energy < b.energy;
              });
    for (const SpectralEigenvalue& ev : eigs) {
        if (!out.eigenvalues.empty() &&
            std::abs(ev.energy - out.eigenvalues.back().energy) <= rel_tol(ev.energy, 1e-9)) {
            out.eigenvalues.back().multiplicity += ev.multiplicity;
        } else {
            out.eigenvalues.push_back(ev);
        }
    }
    flag_eigenvalues(out);
    return out;
}

// ---------------------------------------------------------------------------
// Floquet oracle
// ---------------------------------------------------------------------------

cplx floquet_determinant_energy(const PeriodicSystem& system, double energy, double theta) {
    return pencil_det(floquet_pencil(system, energy), theta);
}

cplx floquet_determinant(const PeriodicSystem& system, double k, double theta) {
    return floquet_determinant_energy(system, k * k, theta);
}

FloquetMinimum floquet_min_abs(const PeriodicSystem& system, double energy) {
    const FloquetPencil fp = floquet_pencil(system, energy);
    auto value = [&](double t) { return std::abs(pencil_det(fp, t)); };

    std::vector<double> seeds;
    constexpr int kGrid = 48;
    for (int i = 0; i < kGrid; ++i) seeds.push_back(2.0 * kPi * i / kGrid);
    // det(F0 + w F1) = 0 at generalized eigenvalues w; w = e^{-i theta}.
    auto add_eigen_seeds = [&](const Matrix& a, const Matrix& b, bool invert) {
        Eigen::PartialPivLU<Matrix> lu(b);
        const SingularRange sr = singular_range(b);
        if (!(sr.min > 1e-10 * sr.max)) return;
        Eigen::ComplexEigenSolver<Matrix> es(-lu.solve(a), false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            cplx w = es.eigenvalues()(i);
            if (std::abs(w) == 0.0) continue;
            if (invert) w = 1.0 / w;
            seeds.push_back(wrap_angle(-std::arg(w)));
        }
    };
    add_eigen_seeds(fp.f0, fp.f1, false);
    add_eigen_seeds(fp.f1, fp.f0, true);

    FloquetMinimum best{0.0, std::numeric_limits<double>::infinity()};
    std::vector<std::pair<double, double>> scored;
    for (double t : seeds) scored.emplace_back(value(t), t);
    std::sort(scored.begin(), scored.end());
    const double half = kPi / kGrid;
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t i = 0; i < std::min<std::size_t>(4, scored.size()); ++i) {
        if (scored[i].first < best.value) best = {scored[i].second, scored[i].first};
        double a = scored[i].second - half;
        double b = scored[i].second + half;
        double c = b - golden * (b - a);
        double d = a + golden * (b - a);
        double fc = value(c);
        double fd = value(d);
        for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - golden * (b - a);
                fc = value(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + golden * (b - a);
                fd = value(d);
            }
        }
        const double t = 0.5 * (a + b);
        const double v = value(t);
        if (v < best.value) best = {wrap_angle(t), v};
    }
    return best;
}

BandSpectrum floquet_band_scan(const PeriodicSystem& system, double e_lo, double e_max,
                               int points, double threshold) {
    if (points < 2 || !(e_lo < e_max)) {
        throw Error(ErrorKind::InvalidSystem, "Floquet scan needs e_lo < e_max and >= 2 points");
    }
    BandSpectrum bs;
    bs.e_max = e_max;
    const double step = (e_max - e_lo) / (points - 1);
    bool inside = false;
    double start = e_lo;
    double last = e_lo;
    for (int i = 0; i < points; ++i) {
        const double e = i + 1 == points ? e_max : e_lo + step * i;
        const bool hit = floquet_min_abs(system, e).value < threshold;
        if (hit && !inside) start = e;
        if (!hit && inside) bs.bands.push_back({start, last, false});
        inside = hit;
        last = e;
    }
    if (inside) bs.bands.push_back({start, e_max, true});
    return bs;
}

GapReport gap_report(const BandSpectrum& bs, double min_gap) {
    GapReport out;
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        const double lo = bs.bands[i].hi;
        const double hi = i + 1 < bs.bands.size() ? bs.bands[i + 1].lo : bs.e_max;
        if (hi - lo > min_gap) out.gaps.push_back({lo, hi});
    }
    return out;
}

bool in_bands(const BandSpectrum& bs, double energy, double tol) {
    for (const Band& b : bs.bands) {
        if (energy >= b.lo - tol && energy <= b.hi + tol) return true;
    }
    return false;
}

}  // namespace cchan
