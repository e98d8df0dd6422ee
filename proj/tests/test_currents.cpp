#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace pilotwave;
using namespace testing_support;

namespace {

SpinorField uniform_spinor(const LatticeGrid& g, cplx a, cplx b) {
    SpinorField f(g, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) f.set(i, {a, b});
    return f;
}

}  // namespace

TEST(DiracCurrent, BasisAndLightlikeSpinors) {
    const LatticeGrid g(8, 1.0);
    const auto c = dirac_current(uniform_spinor(g, 1.0, 0.0));
    EXPECT_EQ(c.j0[0], 1.0);
    EXPECT_EQ(c.j1[0], 0.0);
    EXPECT_EQ(c.rho0[0], 1.0);

    const double r = 1.0 / std::sqrt(2.0);
    const auto l = dirac_current(uniform_spinor(g, r, r));
    EXPECT_NEAR(l.j0[0], 1.0, 1e-15);
    EXPECT_NEAR(l.j1[0], 1.0, 1e-15);
    EXPECT_EQ(l.defined[0], 0);
    EXPECT_TRUE(std::isnan(l.rho0[0]));
}

TEST(DiracCurrent, PlaneWaveVelocities) {
    const auto g = plane_wave_grid();
    for (double p : {0.0, 0.75, 1.5}) {
        const auto c = dirac_current(init_plane_wave(g, 1.0, p));
        const double v = p / std::hypot(p, 1.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_NEAR(c.vbar[i], v, 1e-12);
            EXPECT_NEAR(c.ubar[i].x / c.ubar[i].t, c.vbar[i], 1e-12);
        }
    }
}

TEST(DiracCurrent, CauchySchwarzBoundOnEverySlice) {
    const auto h = free_history(interference_field(desk_grid()), 40.0, 0.5);
    for (const auto& s : h.slices()) {
        const auto c = dirac_current(s);
        for (std::size_t i = 0; i < c.size(); ++i) ASSERT_LE(std::abs(c.j1[i]), c.j0[i]);
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c.defined[i]) ASSERT_NEAR(minkowski_dot(c.ubar[i], c.ubar[i]), 1.0, 1e-10);
    }
}

TEST(RestDensity, Examples) {
    EXPECT_EQ(rest_density({1, 0}), 1.0);
    EXPECT_EQ(rest_density({5, 3}), 4.0);
    EXPECT_THROW(rest_density({1, 1}), NonTimelike);
}

TEST(FlowVelocity, Examples) {
    EXPECT_EQ(flow_velocity({1, 0}), (SpacetimeVector{1, 0}));
    const auto u = flow_velocity({5, 3});
    EXPECT_DOUBLE_EQ(u.t, 1.25);
    EXPECT_DOUBLE_EQ(u.x, 0.75);
    EXPECT_DOUBLE_EQ(minkowski_dot(u, u), 1.0);
    EXPECT_THROW(flow_velocity({2, 2}), NonTimelike);
}

TEST(FlowVelocity, ReconstructsCurrent) {
    for (double eta = -5.0; eta <= 5.0; eta += 0.5)
        for (double r : {1e-6, 0.3, 12.0}) {
            const SpacetimeVector j{r * std::cosh(eta), r * std::sinh(eta)};
            const auto back = rest_density(j) * flow_velocity(j);
            EXPECT_NEAR(back.t, j.t, 1e-12 * j.t);
            EXPECT_NEAR(back.x, j.x, 1e-12 * j.t);
        }
}

TEST(KgCurrent, RealFieldCarriesNoCurrent) {
    const auto g = LatticeGrid(64, 20.0);
    ScalarFieldState s(g, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.phi[i] = std::cos(g.x(i));
        s.dphi_dt[i] = std::sin(g.x(i));
    }
    const auto c = kg_current(s);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(c.j0[i], 0.0);
        EXPECT_NEAR(c.j1[i], 0.0, 1e-15);  // spectral derivative of a real field is real up to rounding
    }
    EXPECT_EQ(c.undefined_count(), g.size());
}

TEST(KgCurrent, PlaneWaveMatchesClosedForm) {
    const auto g = plane_wave_grid(256);
    const double m = 1.0, p = 0.75, e = 1.25;
    const auto s = init_kg_plane_wave(g, m, p);
    const auto c = kg_current(s);
    const double amp2 = std::norm(s.phi[0]);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(c.j0[i], amp2 * e / m, 1e-12);
        EXPECT_NEAR(c.j1[i], amp2 * p / m, 1e-12);
        EXPECT_NEAR(c.vbar[i], p / e, 1e-12);
    }
}

TEST(KgCurrent, StandingWaveNodeIsFlagged) {
    // cos(p x) e^{-i E t}: phi vanishes at p x = pi/2 (x = 2.0943...).
    const auto g = plane_wave_grid(256);
    const double p = 0.75, e = 1.25;
    ScalarFieldState s(g, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.phi[i] = std::cos(p * g.x(i));
        s.dphi_dt[i] = cplx(0.0, -e) * s.phi[i];
    }
    const auto c = kg_current(s);
    std::size_t node = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(std::cos(p * g.x(i))) < std::abs(std::cos(p * g.x(node)))) node = i;
    EXPECT_LT(c.j0[node], 1e-3 * c.max_j0());
    EXPECT_NEAR(c.j1[node], 0.0, 1e-15);
    EXPECT_GT(c.undefined_count(), 0u);
}

TEST(Continuity, TotalChargeAndLocalResidual) {
    const auto g = desk_grid();
    const auto f0 = interference_field(g);
    auto residual = [&](double dts) {
        const auto h = free_history(f0, 20.0, dts);
        double worst = 0.0, charge_drift = 0.0;
        const auto first = dirac_current(h[0]);
        const double q0 = lattice_integral(g, first.j0);
        for (std::size_t n = 1; n + 1 < h.size(); ++n) {
            const auto prev = dirac_current(h[n - 1]);
            const auto here = dirac_current(h[n]);
            const auto next = dirac_current(h[n + 1]);
            const auto dj1 = spectral_derivative(g, std::span<const double>(here.j1));
            for (std::size_t i = 0; i < g.size(); ++i)
                worst = std::max(worst, std::abs((next.j0[i] - prev.j0[i]) / (2.0 * dts) + dj1[i]));
            charge_drift = std::max(charge_drift, std::abs(lattice_integral(g, here.j0) - q0));
        }
        EXPECT_LE(charge_drift, 1e-10);
        return worst;
    };
    const double r1 = residual(0.2);
    const double r2 = residual(0.1);
    EXPECT_NEAR(r1 / r2, 4.0, 0.3);
}
