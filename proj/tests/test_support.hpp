#pragma once

// Shared fixtures: lattices, reference fields and plain-loop oracles that do
// not go through the library's own reductions.

#include <cmath>
#include <numbers>
#include <vector>

#include "pilotwave/pilotwave.hpp"

namespace testing_support {

using namespace pilotwave;

inline constexpr double kPi = std::numbers::pi;

/// Box on which p = 0.75 and p = 1.5 are lattice momenta (n = 24, 48).
inline LatticeGrid plane_wave_grid(std::size_t n = 1024) { return LatticeGrid(n, 64.0 * kPi); }

inline LatticeGrid desk_grid() { return LatticeGrid(1024, 200.0); }

/// Two packets approaching each other, the reference interference setup.
inline SpinorField interference_field(const LatticeGrid& g, double mass = 1.0) {
    const GaussianPacket packets[] = {{-12.0, 0.5, 2.5, {1.0, 0.0}}, {12.0, -0.5, 2.5, {1.0, 0.0}}};
    return init_gaussian_packets(g, mass, packets);
}

inline ScalarFieldState interference_kg(const LatticeGrid& g, double mass = 1.0) {
    const GaussianPacket packets[] = {{-12.0, 0.5, 2.5, {1.0, 0.0}}, {12.0, -0.5, 2.5, {1.0, 0.0}}};
    return init_kg_gaussian_packets(g, mass, packets);
}

inline FieldHistory<SpinorField> free_history(const SpinorField& f0, double t_final, double dts) {
    return evolve_history(f0, t_final, dts, [](const SpinorField& f, double dt) { return step_dirac_free(f, dt); });
}

inline FieldHistory<ScalarFieldState> free_kg_history(const ScalarFieldState& s0, double t_final, double dts) {
    return evolve_history(s0, t_final, dts,
                          [](const ScalarFieldState& s, double dt) { return step_klein_gordon(s, dt); });
}

template <class Field>
FlowInterpolant flow_of(const FieldHistory<Field>& h, double k = 1.0) {
    std::vector<CurrentField> c;
    for (const auto& s : h.slices()) c.push_back(current_of(s));
    return FlowInterpolant(c, h.dt_store(), k);
}

/// <p/E> of a positive-energy Gaussian packet, summed over lattice momenta.
inline double packet_mean_velocity(const LatticeGrid& g, double p0, double s, double m) {
    double num = 0.0, den = 0.0;
    const auto n = static_cast<long long>(g.size());
    for (long long k = -n / 2; k < n / 2; ++k) {
        const double p = 2.0 * kPi * static_cast<double>(k) / g.length();
        const double w = std::exp(-2.0 * (p - p0) * (p - p0) * s * s);
        num += w * p / std::sqrt(p * p + m * m);
        den += w;
    }
    return num / den;
}

/// Sum x psi^dagger psi dx with a plain loop.
inline double centroid(const SpinorField& f) {
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = std::norm(f.components[0][i]) + std::norm(f.components[1][i]);
        s += f.grid.x(i) * d;
        w += d;
    }
    return s / w;
}

inline double max_abs_diff(const SpinorField& a, const SpinorField& b) {
    double worst = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a.components[c][i] - b.components[c][i]));
    return worst;
}

inline double l2_diff(const SpinorField& a, const SpinorField& b) {
    double s = 0.0;
    for (int c = 0; c < 2; ++c)
        for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a.components[c][i] - b.components[c][i]);
    return std::sqrt(s * a.grid.dx());
}

}  // namespace testing_support
