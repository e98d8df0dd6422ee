#pragma once

// Particle worldlines in a stored quantum current.
//
// Guidance mode rides the flow, dx/dt = j^1/j^0 with u = ubar, and is
// integrated in coordinate time. The general equation of motion
//
//   d/dtau (rho_0 u_a) = d_a rho_0 + u^b (d_b j_a - d_a j_b)
//
// is integrated in proper time in the expanded form
//   rho_0 du_a/dtau = d_a rho_0 - (u^b d_b rho_0) u_a + u^b (d_b j_a - d_a j_b),
// whose right-hand side is orthogonal to u; the step advances the rapidity of u.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pilotwave/error.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/interpolation.hpp"

namespace pilotwave {

struct ParticleState {
    double x = 0.0;
    double t = 0.0;
    double tau = 0.0;
    SpacetimeVector u{1.0, 0.0};
    double mass = 1.0;
};

struct WorldlineSample {
    double t;
    double x;
    SpacetimeVector u;
    double tau;

    friend bool operator==(const WorldlineSample&, const WorldlineSample&) = default;
};

struct Worldline {
    std::vector<WorldlineSample> samples;
    std::string method;
    double step = 0.0;

    void record(const ParticleState& p) { samples.push_back({p.t, p.x, p.u, p.tau}); }
    std::size_t size() const noexcept { return samples.size(); }
    const WorldlineSample& back() const { return samples.back(); }

    /// Largest |u.u - 1| over the samples.
    double max_normalization_error() const {
        double worst = 0.0;
        for (const auto& s : samples) worst = std::max(worst, std::abs(minkowski_dot(s.u, s.u) - 1.0));
        return worst;
    }
};

/// Gradient of the particle Lagrangian -rho_0 sqrt(u.u) + u.j with respect to
/// u^a (covariant components). Vanishes exactly when u is parallel to j.
inline SpacetimeVector velocity_stationarity(SpacetimeVector u, double rho0, SpacetimeVector j) {
    const double uu = minkowski_dot(u, u);
    if (!(uu > 0.0)) throw NonTimelike("particle velocity is not timelike");
    return lower_index(j) - (rho0 / std::sqrt(uu)) * lower_index(u);
}

/// Covariant right-hand side of the general equation of motion.
inline SpacetimeVector eom_right_hand_side(const FlowSample& s, SpacetimeVector u) {
    const SpacetimeVector g = s.grad_rho0();
    const double omega = s.vorticity();
    return {g.t + u.x * omega, g.x - u.t * omega};
}

namespace detail {

struct GuidanceRate {
    double dx_dt;
    double dtau_dt;
};

inline GuidanceRate guidance_rate(const FlowInterpolant& flow, double t, double x) {
    const FlowSample s = flow.flow_sample(t, x);
    return {s.j.x / s.j.t, s.rho0() / s.j.t};
}

}  // namespace detail

/// Initial state on the flow at (t, x).
inline ParticleState particle_on_flow(const FlowInterpolant& flow, double t, double x, double mass = 1.0) {
    ParticleState p;
    p.t = t;
    p.x = x;
    p.u = flow.flow_sample(t, x).ubar();
    p.mass = mass;
    return p;
}

/// One classical RK4 step of dx/dt = vbar(t, x), dtau/dt = 1/ubar^0.
inline ParticleState guidance_step(const ParticleState& p, const FlowInterpolant& flow, double dt) {
    if (!flow.covers(p.t + dt)) throw OutOfHistory(p.t + dt, p.x);
    const auto k1 = detail::guidance_rate(flow, p.t, p.x);
    const auto k2 = detail::guidance_rate(flow, p.t + 0.5 * dt, p.x + 0.5 * dt * k1.dx_dt);
    const auto k3 = detail::guidance_rate(flow, p.t + 0.5 * dt, p.x + 0.5 * dt * k2.dx_dt);
    const auto k4 = detail::guidance_rate(flow, p.t + dt, p.x + dt * k3.dx_dt);
    ParticleState next = p;
    next.t = p.t + dt;
    next.x = p.x + dt / 6.0 * (k1.dx_dt + 2.0 * k2.dx_dt + 2.0 * k3.dx_dt + k4.dx_dt);
    next.tau = p.tau + dt / 6.0 * (k1.dtau_dt + 2.0 * k2.dtau_dt + 2.0 * k3.dtau_dt + k4.dtau_dt);
    next.u = flow.flow_sample(next.t, next.x).ubar();
    return next;
}

namespace detail {

// The velocity is carried as its rapidity, u = (cosh eta, sinh eta), so it
// stays on the unit hyperboloid. The expanded form amplifies any departure
// from u.u = 1 by 1/rho_0^2 as rho_0 falls, which RK4 cannot hold near nodes.
struct EomState {
    double t, x, eta;
};

/// du^a/dtau of the expanded equation at (t, x) with velocity u.
inline SpacetimeVector eom_acceleration(const FlowInterpolant& flow, double t, double x, const SpacetimeVector& u) {
    const FlowSample s = flow.sample(t, x);
    if (!(s.j.t > 0.0) || !((s.j.t - s.j.x) * (s.j.t + s.j.x) > 0.0)) throw UndefinedFlow(t, x);
    const double rho0 = s.rho0();
    if (rho0 < flow.rest_density_floor(t)) throw VanishingRestDensity(t, x);
    const SpacetimeVector g = s.grad_rho0();
    const double omega = s.vorticity();
    const double drho = u.t * g.t + u.x * g.x;
    return {(g.t - drho * u.t + u.x * omega) / rho0, (-g.x - drho * u.x + u.t * omega) / rho0};
}

inline EomState eom_rate(const FlowInterpolant& flow, const EomState& y) {
    const SpacetimeVector u{std::cosh(y.eta), std::sinh(y.eta)};
    const SpacetimeVector a = eom_acceleration(flow, y.t, y.x, u);
    // a is orthogonal to u, hence a = eta' (u^1, u^0).
    return {u.t, u.x, a.x * u.t - a.t * u.x};
}

inline EomState axpy(const EomState& y, double h, const EomState& k) {
    return {y.t + h * k.t, y.x + h * k.x, y.eta + h * k.eta};
}

}  // namespace detail

/// One classical RK4 step of the general equation of motion in proper time.
inline ParticleState general_eom_step(const ParticleState& p, const FlowInterpolant& flow, double dtau) {
    const double norm = minkowski_dot(p.u, p.u);
    if (std::abs(norm - 1.0) > 1e-6) throw InvalidInput("general_eom_step requires u.u = 1 on entry");
    const detail::EomState y{p.t, p.x, std::asinh(p.u.x)};
    const auto k1 = detail::eom_rate(flow, y);
    const auto k2 = detail::eom_rate(flow, detail::axpy(y, 0.5 * dtau, k1));
    const auto k3 = detail::eom_rate(flow, detail::axpy(y, 0.5 * dtau, k2));
    const auto k4 = detail::eom_rate(flow, detail::axpy(y, dtau, k3));
    ParticleState next = p;
    next.t = y.t + dtau / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t);
    next.x = y.x + dtau / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    const double eta = y.eta + dtau / 6.0 * (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta);
    next.u = {std::cosh(eta), std::sinh(eta)};
    next.tau = p.tau + dtau;
    return next;
}

/// Guidance worldline from p until t_end, landing exactly on t_end.
inline Worldline integrate_guidance(ParticleState p, const FlowInterpolant& flow, double dt, double t_end) {
    if (!(dt > 0.0)) throw InvalidInput("guidance step must be > 0");
    Worldline w;
    w.method = "guidance-rk4";
    w.step = dt;
    w.record(p);
    const double t0 = p.t;
    const auto steps = static_cast<long long>(std::ceil((t_end - t0) / dt - 1e-9));
    for (long long n = 1; n <= steps; ++n) {
        const double target = std::min(t_end, t0 + static_cast<double>(n) * dt);
        p = guidance_step(p, flow, target - p.t);
        p.t = target;
        w.record(p);
    }
    return w;
}

/// General-EOM worldline in steps of dtau while the next step stays inside
/// [.., t_end].
inline Worldline integrate_general_eom(ParticleState p, const FlowInterpolant& flow, double dtau, double t_end) {
    if (!(dtau > 0.0)) throw InvalidInput("proper-time step must be > 0");
    Worldline w;
    w.method = "general-eom-rk4";
    w.step = dtau;
    w.record(p);
    while (p.t + 1.5 * p.u.t * dtau <= t_end) {
        p = general_eom_step(p, flow, dtau);
        w.record(p);
    }
    return w;
}

struct ResidualReport {
    std::vector<double> residual;        // |LHS - RHS| per sample
    std::vector<double> grad_rho0_norm;  // |d rho_0| per sample
    double max_residual = 0.0;
    double max_grad_rho0 = 0.0;

    /// max residual relative to the largest |d rho_0| met along the worldline.
    double relative() const { return max_grad_rho0 > 0.0 ? max_residual / max_grad_rho0 : max_residual; }
};

namespace detail {

/// First-derivative weights at z for arbitrary nodes (Fornberg 1988).
inline std::vector<double> derivative_weights(double z, std::span<const double> nodes) {
    const std::size_t n = nodes.size();
    std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

}  // namespace detail

/// LHS - RHS of the general equation of motion along a recorded worldline.
/// d/dtau is a five-point finite difference over the samples (shifted near
/// the ends), so the check does not depend on how the worldline was made.
inline ResidualReport eom_residual(const Worldline& w, const FlowInterpolant& flow) {
    constexpr std::size_t stencil = 5;
    const std::size_t n = w.size();
    if (n < stencil) throw InsufficientHistory("eom_residual needs at least five worldline samples");
    std::vector<SpacetimeVector> momentum(n);
    std::vector<SpacetimeVector> rhs(n);
    std::vector<double> tau(n);
    ResidualReport report;
    report.residual.resize(n);
    report.grad_rho0_norm.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = w.samples[i];
        const FlowSample f = flow.sample(s.t, s.x);
        if (!flow.defined(f, s.t)) throw UndefinedFlow(s.t, s.x);
        momentum[i] = f.rho0() * lower_index(s.u);
        rhs[i] = eom_right_hand_side(f, s.u);
        tau[i] = s.tau;
        report.grad_rho0_norm[i] = component_norm(f.grad_rho0());
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = std::min(i >= stencil / 2 ? i - stencil / 2 : 0, n - stencil);
        const auto weights =
            detail::derivative_weights(tau[i], std::span<const double>(tau.data() + first, stencil));
        SpacetimeVector d{};
        for (std::size_t k = 0; k < stencil; ++k) d = d + weights[k] * momentum[first + k];
        report.residual[i] = component_norm(d - rhs[i]);
        report.max_residual = std::max(report.max_residual, report.residual[i]);
        report.max_grad_rho0 = std::max(report.max_grad_rho0, report.grad_rho0_norm[i]);
    }
    return report;
}

/// Position at coordinate time t by cubic Hermite interpolation of the
/// samples, using dx/dt = u^1/u^0 as slopes.
inline double position_at(const Worldline& w, double t) {
    const auto& s = w.samples;
    if (s.empty() || t < s.front().t || t > s.back().t) throw InvalidInput("time outside worldline");
    auto it = std::upper_bound(s.begin(), s.end(), t, [](double v, const WorldlineSample& a) { return v < a.t; });
    if (it == s.end()) return s.back().x;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double h = b.t - a.t;
    const double u = (t - a.t) / h;
    const auto basis = detail::cubic_basis(u);
    return basis.value[0] * a.x + basis.value[1] * h * (a.u.x / a.u.t) + basis.value[2] * b.x +
           basis.value[3] * h * (b.u.x / b.u.t);
}

}  // namespace pilotwave
