// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cchan/resolvent.hpp"
#include "test_support.hpp"

using namespace cchan;
using cchan::testing::Rng;

namespace {

BoundaryCondition scalar_delta(double alpha) {
    return BoundaryCondition(make_coupling(CouplingSpec::delta(alpha), 1));
}

BoundaryCondition free_condition(int n) {
    return BoundaryCondition(validate_transfer(identity(n), Matrix::Zero(n, n),
                                               Matrix::Zero(n, n), identity(n)));
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::ParseError;
}

// Smooth test data: Gaussians with channel-dependent centres and phases.
Matrix sample_f(const Grid& grid, int n) {
    Matrix f(n, grid.size);
    for (Eigen::Index i = 0; i < grid.size; ++i) {
        const double x = grid.x(i);
        for (int j = 0; j < n; ++j) {
            const double c = 0.4 * j - 0.3;
            f(j, i) = std::polar(std::exp(-(x - c) * (x - c)), 0.7 * j);
        }
    }
    return f;
}

// Root of phi on [a, b] by plain bisection (phi(a), phi(b) of opposite sign).
double bisect(const std::function<double(double)>& phi, double a, double b) {
    double fa = phi(a);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = phi(mid);
        if ((fm < 0) == (fa < 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("krein_kappa branch") {
    CHECK(std::abs(krein_kappa(-1.0) - 1.0) < 1e-15);
    const cplx k = krein_kappa(cplx(4.0, 1e-9));
    CHECK(k.real() > 0.0);
    CHECK(k.imag() < 0.0);  // sqrt(-zeta) ~ -2i, so Im sqrt(zeta) = +2 > 0
    CHECK(std::abs(k * k + cplx(4.0, 1e-9)) < 1e-12);
    CHECK(kind_of([] { (void)krein_kappa(2.0); }) == ErrorKind::OnEssentialSpectrum);
    CHECK(kind_of([] { (void)krein_kappa(0.0); }) == ErrorKind::OnEssentialSpectrum);
}

TEST_CASE("build_q examples") {
    const Matrix q1 = build_q({0.0}, 2, -1.0);
    Matrix expected = Matrix::Zero(4, 4);
    expected.topLeftCorner(2, 2) = 0.5 * identity(2);
    expected.bottomRightCorner(2, 2) = -0.5 * identity(2);
    CHECK((q1 - expected).norm() < 1e-15);

    const Matrix q2 = build_q({0.0, 1.0}, 1, -1.0);
    const double s = std::exp(-1.0) / 2.0;
    CHECK(std::abs(q2(0, 2) - s) < 1e-15);            // 1/kappa entry
    CHECK(std::abs(q2(0, 3) - (-s)) < 1e-15);         // sign(q1 - q2) = -1
    CHECK(std::abs(q2(1, 2) - s) < 1e-15);            // -sign(q1 - q2)
    CHECK(std::abs(q2(1, 3) - (-s)) < 1e-15);         // -kappa entry

    Rng rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> pts = {u(rng), u(rng) + 10.0, u(rng) + 20.0};
        const cplx z(u(rng), 0.1 + std::abs(u(rng)));
        const Matrix a = build_q(pts, 2, z);
        const Matrix b = build_q(pts, 2, std::conj(z));
        CHECK((b - a.conjugate()).norm() <= 1e-13 * a.norm());
    }
}

TEST_CASE("basis functions") {
    CHECK(std::abs(basis_h(1.0, 0.5, 1.5) - std::exp(-1.0) / 2.0) < 1e-15);
    CHECK(std::abs(basis_h(1.0, 0.5, -0.5) + std::exp(-1.0) / 2.0) < 1e-15);
    CHECK(std::abs(basis_h(1.0, 0.5, 0.5)) == 0.0);
    CHECK(std::abs(basis_g(1.0, 0.0, 0.0) - 0.5) < 1e-15);
}

TEST_CASE("free system reproduces the free resolvent") {
    const KreinSystem sys(ChannelSystem(2, {{0.0, free_condition(2)}, {1.0, free_condition(2)}}));
    const Grid grid{-20.0, 0.01, 4001};
    const Matrix f = sample_f(grid, 2);
    const cplx zeta(-0.7, 0.3);
    const ResolventSolution sol = resolve(sys, zeta, grid, f);
    CHECK((sol.values - free_resolvent(sol.kappa, grid, f)).norm() <= 1e-12 * sol.values.norm());
    CHECK(sol.coefficients.norm() < 1e-12);

    const Matrix g = green_kernel(sys, -1.0, 0.3, 0.3);
    CHECK((g - 0.5 * identity(2)).norm() < 1e-14);
}

TEST_CASE("free resolvent solves the free equation") {
    // Oracle: closed form for f(x) = exp(-|x|): u = (e^{-|x|} - e^{-k|x|}/k)/(k^2 - 1).
    const Grid grid{-30.0, 0.005, 12001};
    Matrix f(1, grid.size);
    for (Eigen::Index i = 0; i < grid.size; ++i) f(0, i) = std::exp(-std::abs(grid.x(i)));
    const cplx k = 2.0;
    const Matrix u = free_resolvent(k, grid, f);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < grid.size; i += 37) {
        const double x = std::abs(grid.x(i));
        const cplx exact = (std::exp(-x) - std::exp(-k * x) / k) / (k * k - 1.0);
        worst = std::max(worst, std::abs(u(0, i) - exact));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("scalar delta(-2) is not regular at zeta = -1") {
    const KreinSystem sys(ChannelSystem(1, {{0.0, scalar_delta(-2.0)}}));
    CHECK(kind_of([&] { (void)krein_coefficients(sys, -1.0); }) == ErrorKind::NotRegular);
    const Grid grid{-10.0, 0.01, 2001};
    CHECK(kind_of([&] { (void)resolve(sys, -1.0, grid, sample_f(grid, 1)); }) ==
          ErrorKind::NotRegular);
}

TEST_CASE("property: resolvent solves the ODE and the boundary conditions") {
    Rng rng(314);
    for (int trial = 0; trial < 4; ++trial) {
        const int n = 1 + trial % 2;
        std::vector<InteractionPoint> pts;
        pts.push_back({0.0, BoundaryCondition(validate_u(cchan::testing::random_unitary(rng, 2 * n)))});
        pts.push_back({1.3, BoundaryCondition(validate_u(cchan::testing::random_unitary(rng, 2 * n)))});
        const ChannelSystem csys(n, pts);
        const KreinSystem sys(csys);
        const cplx zeta(-1.0, 0.5);
        const double h = 1e-3;
        const Grid grid{-14.0, h, 30301};
        const Matrix f = sample_f(grid, n);
        const ResolventSolution sol = resolve(sys, zeta, grid, f);
        CHECK(sol.warnings.empty());

        double worst = 0.0;
        const double scale = f.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 1; i + 1 < grid.size; ++i) {
            const double x = grid.x(i);
            if (x < -10.0 || x > 11.0) continue;
            if (std::abs(x) < 3 * h || std::abs(x - 1.3) < 3 * h) continue;
            const Vector upp = (sol.values.col(i + 1) - 2.0 * sol.values.col(i) +
                                sol.values.col(i - 1)) / (h * h);
            const Vector r = -upp - zeta * sol.values.col(i) - f.col(i);
            worst = std::max(worst, r.norm() / scale);
        }
        CHECK(worst <= 1e-4);

        for (std::size_t s = 0; s < pts.size(); ++s) {
            const Vector raw = solution_boundary_data(sol, f, s);
            Vector v = raw;
            v.segment(2 * n, n) = -raw.segment(2 * n, n);
            CHECK(csys.points()[s].bc.subspace().relative_residual(v) <= 1e-6);
        }
    }
}

TEST_CASE("green kernel integrates to the resolvent") {
    Rng rng(2);
    const ChannelSystem csys(
        2, {{0.0, BoundaryCondition(validate_u(cchan::testing::random_unitary(rng, 4)))}});
    const KreinSystem sys(csys);
    const cplx zeta(-0.5, 0.8);
    const Grid grid{-16.0, 0.01, 3201};
    const Matrix f = sample_f(grid, 2);
    const ResolventSolution sol = resolve(sys, zeta, grid, f);
    for (Eigen::Index ix : {1200, 1550, 1700, 2100}) {
        Vector acc = Vector::Zero(2);
        for (Eigen::Index j = 0; j < grid.size; ++j) {
            const double w = (j == 0 || j + 1 == grid.size) ? 0.5 * grid.h : grid.h;
            acc += w * green_kernel(sys, zeta, grid.x(ix), grid.x(j)) * f.col(j);
        }
        CHECK((acc - sol.values.col(ix)).norm() <= 1e-3 * sol.values.col(ix).norm() + 1e-6);
    }
}

TEST_CASE("property: green kernel symmetry") {
    Rng rng(27);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + trial % 3;
        const int m = 1 + (trial / 3) % 3;
        std::vector<InteractionPoint> pts;
        for (int s = 0; s < m; ++s) {
            pts.push_back({1.5 * s, BoundaryCondition(validate_u(cchan::testing::random_unitary(rng, 2 * n)))});
        }
        const KreinSystem sys{ChannelSystem(n, pts)};
        const cplx zeta(u(rng), 0.2 + std::abs(u(rng)));
        const double x = u(rng) + 0.01, y = u(rng) - 0.01;
        const Matrix a = green_kernel(sys, zeta, x, y);
        const Matrix b = green_kernel(sys, std::conj(zeta), y, x).adjoint();
        CHECK((a - b).norm() <= 1e-9 * std::max(1.0, a.norm()));
    }
}

TEST_CASE("property: reduction commutes with the resolvent") {
    const double alpha = 1.2, beta = -0.8;
    const ChannelSystem csys(
        3, {{0.0, BoundaryCondition(make_coupling(CouplingSpec::delta(alpha), 3))},
            {1.0, BoundaryCondition(make_coupling(CouplingSpec::delta_prime(beta), 3))}});
    const ReductionResult r = reduce(csys);
    const KreinSystem sys(csys);
    const cplx zeta(-0.9, 0.4);
    for (const auto& [x, y] : std::vector<std::pair<double, double>>{{-0.5, 0.3}, {0.5, 2.0}, {1.7, -1.1}}) {
        const Matrix g = r.theta.adjoint() * green_kernel(sys, zeta, x, y) * r.theta;
        CHECK((g - Matrix(g.diagonal().asDiagonal())).norm() <= 1e-8);
        for (int s = 0; s < 3; ++s) {
            const KreinSystem scalar(ChannelSystem(
                1, {{0.0, BoundaryCondition(r.scalar_condition(0, s))},
                    {1.0, BoundaryCondition(r.scalar_condition(1, s))}}));
            const cplx gs = green_kernel(scalar, zeta, x, y)(0, 0);
            CHECK(std::abs(g(s, s) - gs) <= 1e-8);
        }
    }
}

TEST_CASE("find_bound_states examples") {
    const auto neg = find_bound_states(KreinSystem(ChannelSystem(1, {{0.0, scalar_delta(-2.0)}})), -10.0);
    REQUIRE(neg.size() == 1);
    CHECK(neg[0].energy == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(neg[0].multiplicity == 1);

    CHECK(find_bound_states(KreinSystem(ChannelSystem(1, {{0.0, scalar_delta(2.0)}})), -10.0).empty());

    const auto two = find_bound_states(
        KreinSystem(ChannelSystem(2, {{0.0, BoundaryCondition(make_coupling(CouplingSpec::delta(-2.0), 2))}})),
        -10.0);
    REQUIRE(two.size() == 1);
    CHECK(two[0].energy == doctest::Approx(-0.25).epsilon(1e-10));
    CHECK(two[0].multiplicity == 1);

    for (double alpha : {-0.5, -1.0, -3.0, -6.0}) {
        const auto b = find_bound_states(KreinSystem(ChannelSystem(1, {{0.0, scalar_delta(alpha)}})), -20.0);
        REQUIRE(b.size() == 1);
        CHECK(b[0].energy == doctest::Approx(-alpha * alpha / 4.0).epsilon(1e-10));
    }
}

TEST_CASE("bound states of two attractive deltas") {
    // Even and odd states: kappa = 1 +/- exp(-kappa d) for strength -2.
    const double d = 2.0;
    const double k_even = bisect([&](double k) { return k - 1.0 - std::exp(-k * d); }, 0.5, 3.0);
    const double k_odd = bisect([&](double k) { return k - 1.0 + std::exp(-k * d); }, 0.3, 1.0);
    const KreinSystem sys(ChannelSystem(1, {{0.0, scalar_delta(-2.0)}, {d, scalar_delta(-2.0)}}));
    const auto b = find_bound_states(sys, -10.0);
    REQUIRE(b.size() == 2);
    CHECK(b[0].energy == doctest::Approx(-k_even * k_even).epsilon(1e-10));
    CHECK(b[1].energy == doctest::Approx(-k_odd * k_odd).epsilon(1e-10));

    // Pole consistency: M Q(E) - L is singular at each reported energy.
    for (const BoundState& s : b) {
        const Matrix mq = sys.M() * build_q(sys.points(), 1, s.energy) - sys.L();
        Eigen::JacobiSVD<Matrix> svd(mq);
        const auto& sv = svd.singularValues();
        CHECK(sv(sv.size() - 1) < 1e-8 * sv(0));
    }
}

TEST_CASE("bound state multiplicity from identical channels") {
    // Two uncoupled copies of delta(-2): diagonal matrix strength.
    const Matrix s = -2.0 * identity(2);
    const auto b = find_bound_states(
        KreinSystem(ChannelSystem(2, {{0.0, BoundaryCondition(make_matrix_delta(s))}})), -10.0);
    REQUIRE(b.size() == 1);
    CHECK(b[0].energy == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(b[0].multiplicity == 2);
}
