#pragma once

// Canonical energy-momentum tensor on the lattice, split into field,
// particle and interaction parts.
//
// Dirac convention: L_field = psibar(-i gamma^a d_a + m) psi, the sign that
// yields i gamma^a d_a psi - m psi on the left of the sourced equation. With
// it T_field^{ab} = Re(-i psibar gamma^b d^a psi) - g^{ab} Re L_field, so the
// energy density of a positive-energy mode is -E |psi|^2. The imaginary part
// of the canonical expression is a total derivative and is dropped.
//
// Klein-Gordon: L = |d_t phi|^2 - |d_x phi|^2 - m^2 |phi|^2, symmetric tensor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "pilotwave/currents.hpp"
#include "pilotwave/dirac.hpp"
#include "pilotwave/dynamics.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/field_history.hpp"
#include "pilotwave/interpolation.hpp"
#include "pilotwave/klein_gordon.hpp"
#include "pilotwave/regularized_density.hpp"

namespace pilotwave {

enum class TensorPart { field, particle, interaction, total };

inline std::string to_string(TensorPart p) {
    switch (p) {
        case TensorPart::field: return "field";
        case TensorPart::particle: return "particle";
        case TensorPart::interaction: return "interaction";
        case TensorPart::total: return "total";
    }
    return "?";
}

struct StressEnergyField {
    using Components = std::array<double, 4>;  // T00 T01 T10 T11

    LatticeGrid grid;
    double time = 0.0;
    TensorPart part = TensorPart::field;
    std::vector<Components> values;

    StressEnergyField() = default;
    StressEnergyField(const LatticeGrid& g, double t, TensorPart p)
        : grid(g), time(t), part(p), values(g.size(), Components{}) {}

    std::size_t size() const noexcept { return values.size(); }
    double operator()(std::size_t i, int a, int b) const { return values[i][2 * a + b]; }
    double& operator()(std::size_t i, int a, int b) { return values[i][2 * a + b]; }

    /// Largest |T^{01} - T^{10}| over the lattice.
    double max_asymmetry() const {
        double worst = 0.0;
        for (const auto& v : values) worst = std::max(worst, std::abs(v[1] - v[2]));
        return worst;
    }
};

inline StressEnergyField sum_parts(std::span<const StressEnergyField> parts) {
    if (parts.empty()) throw InvalidInput("sum_parts needs at least one tensor");
    StressEnergyField total(parts.front().grid, parts.front().time, TensorPart::total);
    for (const auto& p : parts) {
        if (!(p.grid == total.grid)) throw InvalidInput("tensor parts must share one lattice");
        for (std::size_t i = 0; i < total.size(); ++i)
            for (int c = 0; c < 4; ++c) total.values[i][c] += p.values[i][c];
    }
    return total;
}

/// P^a = sum_x T^{a0} dx.
inline SpacetimeVector total_momentum(const StressEnergyField& t) {
    double p0 = 0.0, p1 = 0.0;
    for (const auto& v : t.values) {
        p0 += v[0];
        p1 += v[2];
    }
    return {p0 * t.grid.dx(), p1 * t.grid.dx()};
}

namespace detail {

/// Time derivative of stored data at slice n: centered in the interior,
/// second-order one-sided at the ends.
template <class Field, class Get>
std::vector<cplx> slice_time_derivative(const FieldHistory<Field>& history, std::size_t n, Get get) {
    const std::size_t count = history.size();
    if (count < 3) throw InsufficientHistory("time derivative needs at least three stored slices");
    if (n >= count) throw InsufficientHistory("slice index outside history");
    const double dt = history.dt_store();
    const std::size_t sites = history[n].size();
    std::vector<cplx> out(sites);
    if (n == 0) {
        const auto& a = get(history[0]);
        const auto& b = get(history[1]);
        const auto& c = get(history[2]);
        for (std::size_t i = 0; i < sites; ++i) out[i] = (-3.0 * a[i] + 4.0 * b[i] - c[i]) / (2.0 * dt);
    } else if (n + 1 == count) {
        const auto& a = get(history[n]);
        const auto& b = get(history[n - 1]);
        const auto& c = get(history[n - 2]);
        for (std::size_t i = 0; i < sites; ++i) out[i] = (3.0 * a[i] - 4.0 * b[i] + c[i]) / (2.0 * dt);
    } else {
        const auto& a = get(history[n + 1]);
        const auto& b = get(history[n - 1]);
        for (std::size_t i = 0; i < sites; ++i) out[i] = (a[i] - b[i]) / (2.0 * dt);
    }
    return out;
}

struct DiracDerivatives {
    std::array<std::vector<cplx>, 2> dt;
    std::array<std::vector<cplx>, 2> dx;
};

inline DiracDerivatives dirac_derivatives(const FieldHistory<SpinorField>& history, std::size_t n) {
    DiracDerivatives d;
    for (int s = 0; s < 2; ++s) {
        d.dt[s] = slice_time_derivative(history, n, [s](const SpinorField& f) -> const std::vector<cplx>& {
            return f.components[s];
        });
        d.dx[s] = spectral_derivative(history[n].grid, std::span<const cplx>(history[n].components[s]));
    }
    return d;
}

/// Re(-i a^dagger b) for two-component columns.
inline double re_minus_i_dot(cplx a0, cplx a1, cplx b0, cplx b1) {
    return std::imag(std::conj(a0) * b0 + std::conj(a1) * b1);
}

}  // namespace detail

/// Dirac field Lagrangian density Re psibar(-i gamma^a d_a + m) psi per site.
inline std::vector<double> field_lagrangian_density(const FieldHistory<SpinorField>& history, std::size_t n) {
    const auto d = detail::dirac_derivatives(history, n);
    const SpinorField& f = history[n];
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx a = f.components[0][i], b = f.components[1][i];
        // psibar gamma^0 = psi^dagger, psibar gamma^1 = psi^dagger sigma_1
        const double kinetic_t = detail::re_minus_i_dot(a, b, d.dt[0][i], d.dt[1][i]);
        const double kinetic_x = detail::re_minus_i_dot(a, b, d.dx[1][i], d.dx[0][i]);
        out[i] = kinetic_t + kinetic_x + f.mass * (std::norm(a) - std::norm(b));
    }
    return out;
}

/// Klein-Gordon Lagrangian density |d_t phi|^2 - |d_x phi|^2 - m^2 |phi|^2.
inline std::vector<double> field_lagrangian_density(const ScalarFieldState& s) {
    const auto dphi = spectral_derivative(s.grid, std::span<const cplx>(s.phi));
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = std::norm(s.dphi_dt[i]) - std::norm(dphi[i]) - s.mass * s.mass * std::norm(s.phi[i]);
    return out;
}

inline std::vector<double> field_lagrangian_density(const FieldHistory<ScalarFieldState>& history, std::size_t n) {
    if (n >= history.size()) throw InsufficientHistory("slice index outside history");
    return field_lagrangian_density(history[n]);
}

inline StressEnergyField field_tensor(const FieldHistory<SpinorField>& history, std::size_t n) {
    const auto d = detail::dirac_derivatives(history, n);
    const SpinorField& f = history[n];
    StressEnergyField t(f.grid, f.time, TensorPart::field);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx a = f.components[0][i], b = f.components[1][i];
        const double ht = detail::re_minus_i_dot(a, b, d.dt[0][i], d.dt[1][i]);        // Re -i psi^+ d_t psi
        const double hs = detail::re_minus_i_dot(a, b, d.dt[1][i], d.dt[0][i]);        // Re -i psi^+ s1 d_t psi
        const double px = detail::re_minus_i_dot(a, b, d.dx[0][i], d.dx[1][i]);        // Re -i psi^+ d_x psi
        const double sx = detail::re_minus_i_dot(a, b, d.dx[1][i], d.dx[0][i]);        // Re -i psi^+ s1 d_x psi
        const double lagrangian = ht + sx + f.mass * (std::norm(a) - std::norm(b));
        t.values[i] = {ht - lagrangian, hs, -px, -sx + lagrangian};
    }
    return t;
}

inline StressEnergyField field_tensor(const ScalarFieldState& s) {
    const auto dphi = spectral_derivative(s.grid, std::span<const cplx>(s.phi));
    StressEnergyField t(s.grid, s.time, TensorPart::field);
    const double m2 = s.mass * s.mass;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double kt = std::norm(s.dphi_dt[i]);
        const double kx = std::norm(dphi[i]);
        const double pot = m2 * std::norm(s.phi[i]);
        const double mixed = -2.0 * std::real(std::conj(s.dphi_dt[i]) * dphi[i]);  // d^0 phi* d^1 phi + c.c.
        t.values[i] = {kt + kx + pot, mixed, mixed, kt + kx - pot};
    }
    return t;
}

inline StressEnergyField field_tensor(const FieldHistory<ScalarFieldState>& history, std::size_t n) {
    if (n >= history.size()) throw InsufficientHistory("slice index outside history");
    return field_tensor(history[n]);
}

/// sigma_0 k rho_0(x_p) u^a u^b deposited with the regulator.
inline StressEnergyField particle_tensor(const LatticeGrid& grid, double time, const ParticleState& p,
                                         double width_in_cells, double rho0_at_p, double coupling_k = 1.0) {
    if (!(rho0_at_p > 0.0)) throw VanishingRestDensity(p.t, p.x);
    StressEnergyField t(grid, time, TensorPart::particle);
    const RegularizedDensity sigma{p.x, width_in_cells, p.u.t};
    const double u[2] = {p.u.t, p.u.x};
    for (const auto& site : sigma.support(grid)) {
        const double s0 = site.sigma / p.u.t * coupling_k * rho0_at_p;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) t(site.index, a, b) += s0 * u[a] * u[b];
    }
    return t;
}

/// sigma_0 k (u_l - ubar_l) {brace}^{ab} - sigma_0 k j^a(x_p) u^b.
///
/// The brace vanishes for Dirac. For Klein-Gordon it equals g^{lb} j^a(x),
/// giving sigma_0 (u^b - ubar^b) j^a(x) at each site.
template <class Field>
StressEnergyField interaction_tensor(const FieldHistory<Field>& history, std::size_t n, const ParticleState& p,
                                     double width_in_cells, double coupling_k = 1.0) {
    if (n >= history.size()) throw InsufficientHistory("slice index outside history");
    const Field& f = history[n];
    const CurrentField current = current_of(f);
    const FlowSample at_p = sample_slice(current, p.x);
    if (!(at_p.j.t > 0.0)) throw UndefinedFlow(f.time, p.x);
    const SpacetimeVector ubar = at_p.ubar();
    StressEnergyField t(f.grid, f.time, TensorPart::interaction);
    const RegularizedDensity sigma{p.x, width_in_cells, p.u.t};
    const double u[2] = {p.u.t, p.u.x};
    const double j_p[2] = {at_p.j.t, at_p.j.x};
    const double gap[2] = {p.u.t - ubar.t, p.u.x - ubar.x};  // contravariant
    for (const auto& site : sigma.support(f.grid)) {
        const double s0 = coupling_k * site.sigma / p.u.t;
        const double j_x[2] = {current.j0[site.index], current.j1[site.index]};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double value = -j_p[a] * u[b];
                if constexpr (std::is_same_v<Field, ScalarFieldState>) value += gap[b] * j_x[a];
                t(site.index, a, b) += s0 * value;
            }
    }
    return t;
}

/// d_b T^{ab} at slice n of a tensor sequence spaced dt apart: centered time
/// difference and spectral x derivative.
inline std::vector<SpacetimeVector> divergence(std::span<const StressEnergyField> sequence, std::size_t n,
                                               double dt) {
    if (sequence.size() < 3 || n == 0 || n + 1 >= sequence.size())
        throw InsufficientHistory("divergence needs a slice on each side");
    const auto& prev = sequence[n - 1];
    const auto& next = sequence[n + 1];
    const auto& here = sequence[n];
    const std::size_t sites = here.size();
    std::vector<SpacetimeVector> out(sites);
    for (int a = 0; a < 2; ++a) {
        std::vector<double> flux(sites);
        for (std::size_t i = 0; i < sites; ++i) flux[i] = here(i, a, 1);
        const auto dflux = spectral_derivative(here.grid, std::span<const double>(flux));
        for (std::size_t i = 0; i < sites; ++i) {
            const double value = (next(i, a, 0) - prev(i, a, 0)) / (2.0 * dt) + dflux[i];
            if (a == 0)
                out[i].t = value;
            else
                out[i].x = value;
        }
    }
    return out;
}

/// Largest |d_b T^{ab}| per component over the lattice.
inline SpacetimeVector max_abs(const std::vector<SpacetimeVector>& residual) {
    SpacetimeVector worst{};
    for (const auto& r : residual) {
        worst.t = std::max(worst.t, std::abs(r.t));
        worst.x = std::max(worst.x, std::abs(r.x));
    }
    return worst;
}

}  // namespace pilotwave
