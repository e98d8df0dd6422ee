#pragma once

// Particle-sourced wave equations.
//
// Dirac:         i gamma^a d_a psi - m psi = k sigma_0 (u_a - ubar_a) gamma^a psi
// Any backend:   source = -d_a[k sigma_0 (u_b - ubar_b) dj^b/d(d_a Psi*)]
//                         + k sigma_0 (u_b - ubar_b) dj^b/dPsi*
//
// The particle density is a regularized delta, so particle-side factors are
// evaluated at the particle: ubar means ubar(x_p). The source is then
// identically zero when u = ubar(x_p). For Dirac the role of Psi* is played
// by the adjoint psibar, giving dj^b/dpsibar = gamma^b psi.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pilotwave/currents.hpp"
#include "pilotwave/dirac.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/interpolation.hpp"
#include "pilotwave/klein_gordon.hpp"
#include "pilotwave/regularized_density.hpp"

namespace pilotwave {

/// Everything the source needs from the particle at one instant.
struct SourceCoupling {
    RegularizedDensity sigma0;      // gamma_factor must equal u^0
    SpacetimeVector u;              // particle 4-velocity, contravariant
    SpacetimeVector ubar_particle;  // flow 4-velocity at x_p, contravariant
    double coupling_k = 1.0;
    SpacetimeVector velocity_gap_rate{};  // d/dt of (u - ubar(x_p)), covariant

    /// (u - ubar(x_p)) with the index lowered.
    SpacetimeVector velocity_gap() const { return lower_index(u - ubar_particle); }
};

/// Builds the coupling for a particle at x_p with 4-velocity u, reading the
/// flow velocity at x_p off `current`. Throws NonTimelike if it is undefined.
inline SourceCoupling make_coupling(const CurrentField& current, double x_p, SpacetimeVector u,
                                    double width_in_cells, double coupling_k = 1.0) {
    SourceCoupling c;
    c.sigma0 = RegularizedDensity{x_p, width_in_cells, u.t};
    c.u = u;
    c.ubar_particle = sample_slice(current, x_p).ubar();
    c.coupling_k = coupling_k;
    return c;
}

/// Right-hand side of the sourced Dirac equation at every site (direct route).
inline std::vector<Spinor> dirac_source_term(const SpinorField& field, const SourceCoupling& coupling) {
    const auto& rep = dirac_representation();
    const SpacetimeVector w = coupling.velocity_gap();
    Matrix2 m{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = w.t * rep.gamma0[i][j] + w.x * rep.gamma1[i][j];
    std::vector<Spinor> out(field.size(), Spinor{});
    const double inv_gamma = 1.0 / coupling.sigma0.gamma_factor;
    for (const auto& site : coupling.sigma0.support(field.grid)) {
        const double weight = coupling.coupling_k * site.sigma * inv_gamma;
        const Spinor s = matvec(m, field.at(site.index));
        out[site.index][0] += weight * s[0];
        out[site.index][1] += weight * s[1];
    }
    return out;
}

/// Convenience overload that derives ubar(x_p) from `current`.
inline std::vector<Spinor> dirac_source_term(const SpinorField& field, SpacetimeVector particle_u,
                                             const RegularizedDensity& sigma0, const CurrentField& current,
                                             double coupling_k = 1.0) {
    SourceCoupling c;
    c.sigma0 = sigma0;
    c.u = particle_u;
    c.ubar_particle = sample_slice(current, sigma0.center).ubar();
    c.coupling_k = coupling_k;
    return dirac_source_term(field, c);
}

/// Functional derivatives of a backend's current with respect to the
/// conjugate field and its gradient, per site. Amplitudes have one entry per
/// field component.
template <std::size_t Components>
struct CurrentDerivatives {
    using Amplitude = std::array<cplx, Components>;
    std::array<std::vector<Amplitude>, 2> by_field;  // [beta]: dj^beta / dPsi*
    bool has_gradient_terms = false;
    std::array<std::array<std::vector<Amplitude>, 2>, 2> by_gradient;  // [a][beta]: dj^beta / d(d_a Psi*)
    std::array<std::array<std::vector<Amplitude>, 2>, 2> by_gradient_rate;  // [a][beta]: d_a of by_gradient[a][beta]
};

/// Dirac: dj^b/dpsibar = gamma^b psi; no gradient dependence.
inline CurrentDerivatives<2> current_derivatives(const SpinorField& field) {
    const auto& rep = dirac_representation();
    CurrentDerivatives<2> d;
    for (int b = 0; b < 2; ++b) {
        d.by_field[b].resize(field.size());
        for (std::size_t i = 0; i < field.size(); ++i) d.by_field[b][i] = matvec(rep.gamma(b), field.at(i));
    }
    return d;
}

/// Klein-Gordon: dj^b/dphi* = (i/2m) d^b phi, dj^b/d(d_a phi*) = -(i/2m) phi g^{ab}.
inline CurrentDerivatives<1> current_derivatives(const ScalarFieldState& state) {
    CurrentDerivatives<1> d;
    const std::size_t n = state.size();
    const cplx c{0.0, 0.5 / state.mass};
    const auto dphi = spectral_derivative(state.grid, std::span<const cplx>(state.phi));
    d.has_gradient_terms = true;
    for (int b = 0; b < 2; ++b) d.by_field[b].resize(n);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            d.by_gradient[a][b].assign(n, {cplx{}});
            d.by_gradient_rate[a][b].assign(n, {cplx{}});
        }
    for (std::size_t i = 0; i < n; ++i) {
        d.by_field[0][i] = {c * state.dphi_dt[i]};
        d.by_field[1][i] = {-c * dphi[i]};  // d^1 = -d_x
        d.by_gradient[0][0][i] = {-c * state.phi[i]};
        d.by_gradient[1][1][i] = {c * state.phi[i]};  // g^{11} = -1
        d.by_gradient_rate[0][0][i] = {-c * state.dphi_dt[i]};
        d.by_gradient_rate[1][1][i] = {c * dphi[i]};
    }
    return d;
}

/// General source term evaluated on the regulator support.
///
/// The time derivative of the bracket uses the backend's field rate and
/// treats sigma_0 as rigidly carried at the particle velocity; the rate of
/// the velocity gap is taken from `coupling.velocity_gap_rate`.
template <std::size_t Components>
std::vector<std::array<cplx, Components>> generic_source_term(const LatticeGrid& grid,
                                                              const SourceCoupling& coupling,
                                                              const CurrentDerivatives<Components>& derivs) {
    using Amplitude = std::array<cplx, Components>;
    const SpacetimeVector w = coupling.velocity_gap();
    const SpacetimeVector w_rate = coupling.velocity_gap_rate;
    const double k = coupling.coupling_k;
    const double inv_gamma = 1.0 / coupling.sigma0.gamma_factor;
    const double v = coupling.u.x / coupling.u.t;
    const double width = coupling.sigma0.width * grid.dx();
    std::vector<Amplitude> out(grid.size(), Amplitude{});
    for (const auto& site : coupling.sigma0.support(grid)) {
        const std::size_t i = site.index;
        const double s0 = site.sigma * inv_gamma;
        const double offset = grid.separation(grid.x(i), coupling.sigma0.center);
        const double ds0_dx = -offset / (width * width) * s0;
        const double ds0_dt = -v * ds0_dx;
        for (std::size_t c = 0; c < Components; ++c) {
            cplx value{};
            for (int b = 0; b < 2; ++b) value += k * s0 * w[b] * derivs.by_field[b][i][c];
            if (derivs.has_gradient_terms) {
                for (int b = 0; b < 2; ++b) {
                    // d_t [s0 w_b D^{0b}] and d_x [s0 w_b D^{1b}] by the product rule.
                    const cplx d0 = derivs.by_gradient[0][b][i][c];
                    const cplx d1 = derivs.by_gradient[1][b][i][c];
                    const cplx time_part = ds0_dt * w[b] * d0 + s0 * w_rate[b] * d0 +
                                           s0 * w[b] * derivs.by_gradient_rate[0][b][i][c];
                    const cplx space_part = ds0_dx * w[b] * d1 + s0 * w[b] * derivs.by_gradient_rate[1][b][i][c];
                    value -= k * (time_part + space_part);
                }
            }
            out[i][c] = value;
        }
    }
    return out;
}

/// Particle data handed to the sourced stepper. The caller passes the state at
/// the midpoint of the step. With follow_flow the particle velocity is set to
/// ubar(x_p) and the source vanishes.
struct SourceParticle {
    double position = 0.0;
    SpacetimeVector u{1.0, 0.0};
    double width_in_cells = 3.0;
    double coupling_k = 1.0;
    bool follow_flow = false;
};

/// One Strang step: free half step, exact pointwise source step, free half step.
///
/// gamma^0 times the source is k sigma_0 (w_0 + w_1 sigma_1), Hermitian, so the
/// pointwise step is unitary and the field norm is preserved for any u.
inline SpinorField step_dirac_sourced(const SpinorField& field, double dt, const SourceParticle& particle) {
    SpinorField half = step_dirac_free(field, 0.5 * dt);
    const CurrentField current = dirac_current(half);
    const SpacetimeVector ubar = sample_slice(current, particle.position).ubar();
    const SpacetimeVector u = particle.follow_flow ? ubar : particle.u;
    const SpacetimeVector w = lower_index(u - ubar);
    if (w.t != 0.0 || w.x != 0.0) {
        const RegularizedDensity sigma{particle.position, particle.width_in_cells, u.t};
        for (const auto& site : sigma.support(field.grid)) {
            const double s0 = particle.coupling_k * site.sigma / u.t;
            const double a = s0 * w.t;
            const double b = s0 * w.x;
            const cplx phase = std::polar(1.0, -a * dt);
            const double cb = std::cos(b * dt);
            const cplx msb{0.0, -std::sin(b * dt)};
            const Spinor psi = half.at(site.index);
            half.set(site.index, {phase * (cb * psi[0] + msb * psi[1]), phase * (msb * psi[0] + cb * psi[1])});
        }
    }
    SpinorField out = step_dirac_free(half, 0.5 * dt);
    out.time = field.time + dt;
    return out;
}

}  // namespace pilotwave
