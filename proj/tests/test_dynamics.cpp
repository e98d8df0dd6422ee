#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace pilotwave;
using namespace testing_support;

namespace {

const FlowInterpolant& interference_flow() {
    static const FlowInterpolant flow = flow_of(free_history(interference_field(desk_grid()), 30.0, 0.1));
    return flow;
}

const FlowInterpolant& plane_wave_flow() {
    static const FlowInterpolant flow = flow_of(free_history(init_plane_wave(plane_wave_grid(), 1.0, 0.75), 12.0, 0.5));
    return flow;
}

}  // namespace

TEST(Interpolation, ReproducesSmoothCurrentBetweenSites) {
    const auto g = desk_grid();
    const double q = 2.0 * kPi * 3.0 / g.length();
    std::vector<CurrentField> slices;
    for (int n = 0; n < 4; ++n) {
        CurrentField c;
        c.grid = g;
        c.time = 0.5 * n;
        for (std::size_t i = 0; i < g.size(); ++i) {
            c.j0.push_back(2.0 + std::sin(q * g.x(i)) + 0.1 * c.time);
            c.j1.push_back(0.5 * std::cos(q * g.x(i)));
        }
        detail::fill_derived(c);
        slices.push_back(c);
    }
    const FlowInterpolant flow(slices, 0.5);
    for (double x : {-7.31, 0.05, 33.3333})
        for (double t : {0.0, 0.2, 0.77, 1.5}) {
            const auto s = flow.sample(t, x);
            EXPECT_NEAR(s.j.t, 2.0 + std::sin(q * x) + 0.1 * t, 1e-10);
            EXPECT_NEAR(s.j.x, 0.5 * std::cos(q * x), 1e-10);
            EXPECT_NEAR(s.dj_dx.t, q * std::cos(q * x), 1e-9);
            EXPECT_NEAR(s.dj_dt.t, 0.1, 1e-12);
        }
    EXPECT_THROW(flow.sample(1.6, 0.0), OutOfHistory);
}

TEST(Guidance, PlaneWaveAdvancesExactly) {
    const auto& flow = plane_wave_flow();
    auto p = particle_on_flow(flow, 0.0, 0.0);
    const auto w = integrate_guidance(p, flow, 0.5, 10.0);
    EXPECT_NEAR(w.back().x, 6.0, 1e-10);
    EXPECT_NEAR(w.back().tau, 10.0 / 1.25, 1e-10);
    EXPECT_THROW(guidance_step(particle_on_flow(flow, 11.9, 0.0), flow, 0.5), OutOfHistory);
}

TEST(Guidance, RestPacketCenterStaysPut) {
    const auto flow = flow_of(free_history(init_gaussian_packet(desk_grid(), 1.0, 0.0, 0.0, 3.0), 10.0, 0.1));
    const auto w = integrate_guidance(particle_on_flow(flow, 0.0, 0.0), flow, 0.05, 10.0);
    for (const auto& s : w.samples) EXPECT_NEAR(s.x, 0.0, 1e-12);
}

TEST(Guidance, InterferenceTrajectoriesNeverCrossTheAxis) {
    const auto& flow = interference_flow();
    for (double x0 : {-15.0, -12.0, -9.0, -5.0, -1.0}) {
        const auto w = integrate_guidance(particle_on_flow(flow, 0.0, x0), flow, 0.025, 30.0);
        for (const auto& s : w.samples) ASSERT_LT(s.x, 0.0) << "x0=" << x0 << " t=" << s.t;
    }
}

TEST(Guidance, FourthOrderInStepSize) {
    const auto& flow = interference_flow();
    const auto p = particle_on_flow(flow, 0.0, -12.0);
    const double ref = integrate_guidance(p, flow, 0.1 / 64.0, 20.0).back().x;
    const double e1 = std::abs(integrate_guidance(p, flow, 0.1, 20.0).back().x - ref);
    const double e2 = std::abs(integrate_guidance(p, flow, 0.05, 20.0).back().x - ref);
    EXPECT_NEAR(e1 / e2, 16.0, 3.0);
}

TEST(Stationarity, Examples) {
    const auto z = velocity_stationarity({1.25, 0.75}, 4.0, {5.0, 3.0});
    EXPECT_EQ(z, (SpacetimeVector{0.0, 0.0}));
    const auto g = velocity_stationarity({1.0, 0.0}, 4.0, {5.0, 3.0});
    EXPECT_DOUBLE_EQ(g.t, 1.0);
    EXPECT_DOUBLE_EQ(g.x, -3.0);
    const SpacetimeVector u{1.3, -0.2};
    for (double lambda : {0.5, 2.0, 17.0}) {
        const auto a = velocity_stationarity(u, 4.0, {5.0, 3.0});
        const auto b = velocity_stationarity(lambda * u, 4.0, {5.0, 3.0});
        EXPECT_NEAR(a.t, b.t, 1e-14);
        EXPECT_NEAR(a.x, b.x, 1e-14);
    }
    EXPECT_THROW(velocity_stationarity({1.0, 1.0}, 4.0, {5.0, 3.0}), NonTimelike);
}

TEST(Stationarity, VanishesOnGuidanceAndNotWhenBoosted) {
    const auto& flow = interference_flow();
    const auto w = integrate_guidance(particle_on_flow(flow, 0.0, -12.0), flow, 0.025, 30.0);
    double on = 0.0, off = std::numeric_limits<double>::infinity();
    for (const auto& s : w.samples) {
        const auto f = flow.flow_sample(s.t, s.x);
        on = std::max(on, component_norm(velocity_stationarity(s.u, f.rho0(), f.j)));
        // The gradient scales with rho_0, so the control is measured per unit rest density.
        off = std::min(off, component_norm(velocity_stationarity(boost(s.u, 0.1), f.rho0(), f.j)) / f.rho0());
    }
    EXPECT_LE(on, 1e-10);
    EXPECT_GE(off, 1e-2);
}

TEST(GeneralEom, StraightLineInPlaneWave) {
    const auto& flow = plane_wave_flow();
    ParticleState p;
    p.u = normalize_timelike({2.0, -1.1});
    const auto w = integrate_general_eom(p, flow, 0.05, 10.0);
    for (const auto& s : w.samples) {
        EXPECT_NEAR(s.u.t, p.u.t, 1e-12);
        EXPECT_NEAR(s.u.x, p.u.x, 1e-12);
        EXPECT_NEAR(s.x, p.u.x * s.tau, 1e-10);
    }
}

TEST(GeneralEom, StartingOnTheFlowReproducesGuidance) {
    const auto& flow = interference_flow();
    const auto start = particle_on_flow(flow, 0.0, -12.0);
    const auto guided = integrate_guidance(start, flow, 0.1 / 16.0, 30.0);
    auto separation = [&](double dtau) {
        const auto w = integrate_general_eom(start, flow, dtau, 30.0);
        double worst = 0.0;
        for (const auto& s : w.samples) worst = std::max(worst, std::abs(s.x - position_at(guided, s.t)));
        return worst;
    };
    const double coarse = separation(0.025);
    EXPECT_LE(coarse, 1e-5);
    EXPECT_LE(separation(0.0125), coarse);
}

TEST(GeneralEom, KeepsUnitVelocityOffTheFlow) {
    const auto& flow = interference_flow();
    ParticleState p;
    p.x = -12.0;
    p.u = normalize_timelike(boost(flow.flow_sample(0.0, -12.0).ubar(), 0.1));
    const auto w = integrate_general_eom(p, flow, 0.00625, 30.0);
    EXPECT_GT(w.back().t, 29.9);
    EXPECT_LE(w.max_normalization_error(), 1e-8);
    p.u = {1.1, 0.0};
    EXPECT_THROW(general_eom_step(p, flow, 0.01), InvalidInput);
}

TEST(GeneralEom, SingularAtVanishingRestDensity) {
    // Lattice of zero current except a small region: the particle sits where j = 0.
    const auto g = LatticeGrid(64, 20.0);
    CurrentField c;
    c.grid = g;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        c.j0.push_back(std::exp(-x * x));
        c.j1.push_back(0.0);
    }
    detail::fill_derived(c);
    std::vector<CurrentField> slices{c, c, c};
    for (int n = 0; n < 3; ++n) slices[n].time = n * 0.1;
    const FlowInterpolant flow(slices, 0.1);
    ParticleState p;
    p.x = 9.0;
    EXPECT_THROW(general_eom_step(p, flow, 0.01), NumericalError);
}

TEST(EomResidual, ZeroOnPlaneWaveAndSensitiveToJitter) {
    {
        const auto& flow = plane_wave_flow();
        const auto w = integrate_guidance(particle_on_flow(flow, 0.0, 1.0), flow, 0.1, 10.0);
        EXPECT_LE(eom_residual(w, flow).max_residual, 1e-12);
    }
    const auto& flow = interference_flow();
    const auto w = integrate_guidance(particle_on_flow(flow, 0.0, -12.0), flow, 0.025, 25.0);
    const double baseline = eom_residual(w, flow).max_residual;
    auto jittered = w;
    for (std::size_t i = 0; i < jittered.size(); ++i) jittered.samples[i].x += (i % 2 ? 1e-3 : -1e-3);
    EXPECT_GE(eom_residual(jittered, flow).max_residual, 10.0 * baseline);
}

TEST(CouplingConstant, LeavesFlowAndTrajectoriesInvariant) {
    const auto h = free_history(interference_field(desk_grid()), 10.0, 0.1);
    const auto f1 = flow_of(h, 1.0);
    for (double k : {0.5, 2.0}) {
        const auto fk = flow_of(h, k);
        const auto a = integrate_guidance(particle_on_flow(f1, 0.0, -12.0), f1, 0.025, 10.0);
        const auto b = integrate_guidance(particle_on_flow(fk, 0.0, -12.0), fk, 0.025, 10.0);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.samples[i].x, b.samples[i].x, 1e-12);
        ParticleState off = particle_on_flow(f1, 0.0, -12.0);
        off.u = boost(off.u, 0.1);
        const auto e1 = integrate_general_eom(off, f1, 0.0125, 10.0);
        const auto ek = integrate_general_eom(off, fk, 0.0125, 10.0);
        ASSERT_EQ(e1.size(), ek.size());
        for (std::size_t i = 0; i < e1.size(); ++i) {
            EXPECT_NEAR(e1.samples[i].x, ek.samples[i].x, 1e-12);
            EXPECT_NEAR(e1.samples[i].u.x, ek.samples[i].u.x, 1e-12);
        }
        const auto s1 = f1.flow_sample(3.3, -10.0), sk = fk.flow_sample(3.3, -10.0);
        EXPECT_NEAR(sk.rho0(), k * s1.rho0(), 1e-14);
        EXPECT_NEAR(sk.ubar().x, s1.ubar().x, 1e-14);
    }
}

TEST(ClassicalEm, FieldFreeMotionIsStraight) {
    const auto bg = uniform_electric(1.0, 0.0);
    ParticleState p;
    p.u = normalize_timelike({1.25, 0.75});
    const auto w = integrate_classical(p, 0.1, 50, [&](const ParticleState& s, double h) {
        return lorentz_force_step(s, bg, h);
    }, "lorentz-rk4");
    EXPECT_NEAR(w.back().x, 0.75 * 5.0, 1e-12);
    EXPECT_NEAR(w.back().t, 1.25 * 5.0, 1e-12);
}

TEST(ClassicalEm, HyperbolicMotionClosedForm) {
    for (double q : {1.0, -1.0}) {
        const auto bg = uniform_electric(q, 2.0);
        ParticleState p;
        p.mass = 2.0;
        double worst = 0.0;
        const auto w = integrate_classical(p, 0.001, 3000, [&](const ParticleState& s, double h) {
            return lorentz_force_step(s, bg, h);
        }, "lorentz-rk4");
        for (const auto& s : w.samples) {
            const auto exact = hyperbolic_motion(q, 2.0, 2.0, s.tau);
            worst = std::max({worst, std::abs(s.x - exact.x), std::abs(s.t - exact.t)});
        }
        EXPECT_LE(worst, 1e-6) << "q=" << q;
        EXPECT_LE(w.max_normalization_error(), 1e-8);
        EXPECT_EQ(w.back().x > 0.0, q > 0.0);
    }
}

TEST(ClassicalEm, PotentialAndFieldAreConsistent) {
    const auto bg = sinusoidal_electric(1.0, 0.7, 1.3, 0.4);
    const double h = 1e-5;
    for (double t : {0.0, 1.1})
        for (double x : {-2.0, 0.3, 4.4}) {
            const double dx_a0 = (bg.potential(t, x + h).t - bg.potential(t, x - h).t) / (2 * h);
            const double dt_a1 = (bg.potential(t + h, x).x - bg.potential(t - h, x).x) / (2 * h);
            EXPECT_NEAR(bg.electric(t, x), -dx_a0 - dt_a1, 1e-6);
            EXPECT_EQ(bg.field_tensor(0, 1, t, x), -bg.field_tensor(1, 0, t, x));
        }
}

TEST(ClassicalScalar, ConstantPotentialGivesUniformMotion) {
    const auto bg = constant_scalar(0.4);
    ParticleState p;
    p.u = normalize_timelike({1.25, 0.75});
    const auto next = scalar_eom_step(p, bg, 0.5);
    EXPECT_EQ(next.u, p.u);
    EXPECT_THROW(scalar_eom_step(p, constant_scalar(-1.0), 0.1), EffectiveMassNonPositive);
}

TEST(ClassicalScalar, StaticPotentialConservesEnergy) {
    const auto bg = gaussian_scalar(0.3, 5.0, 1.5);
    const double h = 1e-5;
    EXPECT_NEAR(bg.gradient(0.0, 4.0).x, (bg.phi(0.0, 4.0 + h) - bg.phi(0.0, 4.0 - h)) / (2 * h), 1e-6);
    ParticleState p;
    p.u = normalize_timelike({1.25, 0.75});
    const double e0 = scalar_energy(p, bg);
    double drift = 0.0;
    const auto w = integrate_classical(p, 0.005, 3000, [&](const ParticleState& s, double dt) {
        const auto next = scalar_eom_step(s, bg, dt);
        drift = std::max(drift, std::abs(scalar_energy(next, bg) - e0));
        return next;
    }, "scalar-rk4");
    EXPECT_LE(drift, 1e-8);
    EXPECT_LE(w.max_normalization_error(), 1e-8);
    // (m + phi) u0 < m + A, so the bump turns the particle back where m + phi = e0.
    double turn = -1e300;
    for (const auto& s : w.samples) turn = std::max(turn, s.x);
    EXPECT_NEAR(turn, 5.0 - 1.5 * std::sqrt(2.0 * std::log(0.3 / (e0 - 1.0))), 1e-4);
    EXPECT_LT(w.back().u.x, 0.0);
}

TEST(ClassicalScalar, FlowPotentialMakesRestDensityTheMass) {
    const auto& flow = interference_flow();
    for (double m : {0.5, 1.0, 3.0}) {
        const auto bg = flow_scalar(flow, m);
        for (double x : {-13.0, -11.5})
            EXPECT_NEAR(m + bg.phi(2.0, x), flow.flow_sample(2.0, x).rho0(), 1e-15);
    }
}
