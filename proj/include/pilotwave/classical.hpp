#pragma once

// Classical particle testbeds in prescribed backgrounds.
//
//   charged particle:  m du_a/dtau = q F_ab u^b
//   scalar potential:  d/dtau[(m + phi) u_a] = d_a phi
//
// In 1+1D the field tensor has one independent component; we store the
// electric field E = F^{10} = -d_x A^0 - d_t A^1.

#include <cmath>
#include <functional>
#include <string>

#include "pilotwave/dynamics.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/interpolation.hpp"

namespace pilotwave {

struct EmBackground {
    std::string kind;
    double charge = 1.0;
    std::function<SpacetimeVector(double, double)> potential;  // A^a(t, x)
    std::function<double(double, double)> electric;            // F^{10}(t, x)

    /// F^{ab} with the first index raised as stored.
    double field_tensor(int a, int b, double t, double x) const {
        if (a == b) return 0.0;
        const double e = electric(t, x);
        return a == 1 ? e : -e;
    }
};

inline EmBackground uniform_electric(double charge, double field) {
    EmBackground bg;
    bg.kind = "uniform_electric";
    bg.charge = charge;
    bg.potential = [field](double, double x) { return SpacetimeVector{-field * x, 0.0}; };
    bg.electric = [field](double, double) { return field; };
    return bg;
}

/// E = E0 sin(k x - w t) from A^0 = (E0 / k) cos(k x - w t).
inline EmBackground sinusoidal_electric(double charge, double amplitude, double wavenumber, double frequency) {
    if (!(wavenumber != 0.0)) throw InvalidInput("sinusoidal background needs a nonzero wavenumber");
    EmBackground bg;
    bg.kind = "sinusoidal_electric";
    bg.charge = charge;
    bg.potential = [=](double t, double x) {
        return SpacetimeVector{amplitude / wavenumber * std::cos(wavenumber * x - frequency * t), 0.0};
    };
    bg.electric = [=](double t, double x) { return amplitude * std::sin(wavenumber * x - frequency * t); };
    return bg;
}

struct ScalarBackground {
    std::string kind;
    std::function<double(double, double)> phi;
    std::function<SpacetimeVector(double, double)> gradient;  // covariant (d_t phi, d_x phi)
};

inline ScalarBackground constant_scalar(double value) {
    return {"constant", [value](double, double) { return value; },
            [](double, double) { return SpacetimeVector{0.0, 0.0}; }};
}

/// Static bump phi = A exp(-(x - c)^2 / (2 w^2)).
inline ScalarBackground gaussian_scalar(double amplitude, double center, double width) {
    if (!(width > 0.0)) throw InvalidInput("scalar bump width must be > 0");
    auto phi = [=](double, double x) {
        const double d = (x - center) / width;
        return amplitude * std::exp(-0.5 * d * d);
    };
    auto grad = [=](double, double x) {
        const double d = (x - center) / width;
        return SpacetimeVector{0.0, -amplitude * d / width * std::exp(-0.5 * d * d)};
    };
    return {"gaussian", phi, grad};
}

/// phi = k rho_0 - m read off a stored flow (k is already inside the flow).
/// With it the effective mass m + phi is the rest density itself.
inline ScalarBackground flow_scalar(const FlowInterpolant& flow, double mass) {
    return {"flow_rest_density",
            [&flow, mass](double t, double x) { return flow.flow_sample(t, x).rho0() - mass; },
            [&flow](double t, double x) { return flow.flow_sample(t, x).grad_rho0(); }};
}

namespace detail {

struct ClassicalRate {
    double t, x, u0, u1;
};

inline ClassicalRate classical_axpy(const ClassicalRate& y, double h, const ClassicalRate& k) {
    return {y.t + h * k.t, y.x + h * k.x, y.u0 + h * k.u0, y.u1 + h * k.u1};
}

template <class Rate>
ParticleState rk4_proper_time(const ParticleState& p, double dtau, Rate rate) {
    const ClassicalRate y{p.t, p.x, p.u.t, p.u.x};
    const auto k1 = rate(y);
    const auto k2 = rate(classical_axpy(y, 0.5 * dtau, k1));
    const auto k3 = rate(classical_axpy(y, 0.5 * dtau, k2));
    const auto k4 = rate(classical_axpy(y, dtau, k3));
    ParticleState next = p;
    next.t = y.t + dtau / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t);
    next.x = y.x + dtau / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    next.u.t = y.u0 + dtau / 6.0 * (k1.u0 + 2.0 * k2.u0 + 2.0 * k3.u0 + k4.u0);
    next.u.x = y.u1 + dtau / 6.0 * (k1.u1 + 2.0 * k2.u1 + 2.0 * k3.u1 + k4.u1);
    next.tau = p.tau + dtau;
    return next;
}

}  // namespace detail

inline ParticleState lorentz_force_step(const ParticleState& p, const EmBackground& bg, double dtau) {
    if (!(p.mass > 0.0)) throw InvalidInput("particle mass must be > 0");
    const double qm = bg.charge / p.mass;
    return detail::rk4_proper_time(p, dtau, [&](const detail::ClassicalRate& y) {
        const double e = bg.electric(y.t, y.x);
        return detail::ClassicalRate{y.u0, y.u1, qm * e * y.u1, qm * e * y.u0};
    });
}

/// (m + phi) du^a/dtau = d^a phi - u^a (u . d phi).
inline ParticleState scalar_eom_step(const ParticleState& p, const ScalarBackground& bg, double dtau) {
    return detail::rk4_proper_time(p, dtau, [&](const detail::ClassicalRate& y) {
        const double mass = p.mass + bg.phi(y.t, y.x);
        if (!(mass > 0.0)) throw EffectiveMassNonPositive(y.t, y.x);
        const SpacetimeVector g = bg.gradient(y.t, y.x);
        const double along = y.u0 * g.t + y.u1 * g.x;
        return detail::ClassicalRate{y.u0, y.u1, (g.t - y.u0 * along) / mass, (-g.x - y.u1 * along) / mass};
    });
}

/// (m + phi) u_0 at the particle; conserved when phi is static.
inline double scalar_energy(const ParticleState& p, const ScalarBackground& bg) {
    return (p.mass + bg.phi(p.t, p.x)) * p.u.t;
}

/// Worldline of `steps` proper-time steps of any classical stepper.
template <class Stepper>
Worldline integrate_classical(ParticleState p, double dtau, std::size_t steps, Stepper step,
                              const std::string& method) {
    if (!(dtau > 0.0)) throw InvalidInput("proper-time step must be > 0");
    Worldline w;
    w.method = method;
    w.step = dtau;
    w.record(p);
    for (std::size_t n = 0; n < steps; ++n) {
        p = step(p, dtau);
        w.record(p);
    }
    return w;
}

/// Closed-form motion from rest at the origin in a uniform field.
inline ParticleState hyperbolic_motion(double charge, double field, double mass, double tau) {
    const double a = charge * field / mass;
    ParticleState p;
    p.mass = mass;
    p.tau = tau;
    if (a == 0.0) {
        p.t = tau;
        return p;
    }
    p.t = std::sinh(a * tau) / a;
    p.x = (std::cosh(a * tau) - 1.0) / a;
    p.u = {std::cosh(a * tau), std::sinh(a * tau)};
    return p;
}

}  // namespace pilotwave
