#pragma once

// Probability current j^a, rest density rho_0 = sqrt(j.j), flow 4-velocity
// ubar = j / rho_0 and flow 3-velocity vbar = j^1 / j^0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pilotwave/dirac.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/klein_gordon.hpp"

namespace pilotwave {

/// Sites whose j^0 is below this fraction of the slice maximum carry no flow.
inline constexpr double kDensityFloor = 1e-12;

struct CurrentField {
    LatticeGrid grid;
    double time = 0.0;
    std::vector<double> j0;
    std::vector<double> j1;
    std::vector<double> rho0;              // NaN where undefined
    std::vector<SpacetimeVector> ubar;     // NaN where undefined
    std::vector<double> vbar;              // NaN where j^0 is below the floor
    std::vector<std::uint8_t> defined;     // 1 where rho0 and ubar are defined

    std::size_t size() const noexcept { return j0.size(); }
    SpacetimeVector j(std::size_t i) const { return {j0[i], j1[i]}; }
    double max_j0() const { return j0.empty() ? 0.0 : *std::max_element(j0.begin(), j0.end()); }
    std::size_t undefined_count() const {
        return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), std::uint8_t{0}));
    }
};

inline double rest_density(SpacetimeVector j) {
    const double norm2 = (j.t - j.x) * (j.t + j.x);
    if (!(norm2 > 0.0)) throw NonTimelike("current is not timelike");
    return std::sqrt(norm2);
}

inline SpacetimeVector flow_velocity(SpacetimeVector j) { return normalize_timelike(j); }

namespace detail {

inline void fill_derived(CurrentField& c) {
    const std::size_t n = c.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    c.rho0.assign(n, nan);
    c.ubar.assign(n, {nan, nan});
    c.vbar.assign(n, nan);
    c.defined.assign(n, 0);
    const double floor = kDensityFloor * c.max_j0();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = c.j0[i];
        const double b = c.j1[i];
        if (!(a > floor) || !(a > 0.0)) continue;
        c.vbar[i] = b / a;
        const double norm2 = (a - b) * (a + b);
        if (!(norm2 > 0.0)) continue;
        const double r = std::sqrt(norm2);
        c.rho0[i] = r;
        c.ubar[i] = {a / r, b / r};
        c.defined[i] = 1;
    }
}

}  // namespace detail

/// j^a = psibar gamma^a psi. Computed as j^0 +- j^1 = |psi_1 +- psi_2|^2 so
/// that |j^1| <= j^0 holds exactly in floating point.
inline CurrentField dirac_current(const SpinorField& field) {
    CurrentField c;
    c.grid = field.grid;
    c.time = field.time;
    const std::size_t n = field.size();
    c.j0.resize(n);
    c.j1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a = field.components[0][i];
        const cplx b = field.components[1][i];
        const double plus = std::norm(a + b);
        const double minus = std::norm(a - b);
        c.j0[i] = 0.5 * (plus + minus);
        c.j1[i] = 0.5 * (plus - minus);
        if (std::abs(c.j1[i]) > c.j0[i]) throw std::logic_error("Dirac current violates |j1| <= j0");
    }
    detail::fill_derived(c);
    return c;
}

/// j^a = (i / 2m)(phi^* d^a phi - phi d^a phi^*), spatial derivative spectral.
inline CurrentField kg_current(const ScalarFieldState& state) {
    CurrentField c;
    c.grid = state.grid;
    c.time = state.time;
    const std::size_t n = state.size();
    const auto dphi = spectral_derivative(state.grid, std::span<const cplx>(state.phi));
    c.j0.resize(n);
    c.j1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.j0[i] = -std::imag(std::conj(state.phi[i]) * state.dphi_dt[i]) / state.mass;
        c.j1[i] = std::imag(std::conj(state.phi[i]) * dphi[i]) / state.mass;
    }
    detail::fill_derived(c);
    return c;
}

inline CurrentField current_of(const SpinorField& f) { return dirac_current(f); }
inline CurrentField current_of(const ScalarFieldState& f) { return kg_current(f); }

}  // namespace pilotwave
