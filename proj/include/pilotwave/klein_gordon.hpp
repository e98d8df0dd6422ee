#pragma once

// Complex Klein-Gordon field stored as (phi, dphi/dt) on the periodic lattice.

#include <cmath>
#include <span>
#include <vector>

#include "pilotwave/dirac.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/lattice.hpp"

namespace pilotwave {

struct ScalarFieldState {
    LatticeGrid grid;
    std::vector<cplx> phi;
    std::vector<cplx> dphi_dt;
    double time = 0.0;
    double mass = 1.0;

    ScalarFieldState() = default;
    ScalarFieldState(LatticeGrid g, double m, double t = 0.0)
        : grid(g), phi(g.size()), dphi_dt(g.size()), time(t), mass(m) {
        if (!(m > 0.0)) throw InvalidInput("Klein-Gordon mass must be > 0");
    }

    std::size_t size() const noexcept { return grid.size(); }

    /// Sum j^0 dx with j^0 = -Im(phi^* dphi/dt) / m.
    double charge() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += -std::imag(std::conj(phi[i]) * dphi_dt[i]) / mass;
        return s * grid.dx();
    }

    void scale(double factor) {
        for (auto& v : phi) v *= factor;
        for (auto& v : dphi_dt) v *= factor;
    }
};

inline double kg_frequency(double p, double mass) { return std::hypot(p, mass); }

/// Positive-frequency plane wave e^{-i(omega t - p x)} with unit total charge.
inline ScalarFieldState init_kg_plane_wave(const LatticeGrid& grid, double mass, double p) {
    const auto n = lattice_mode_index(grid, p);
    const double p_lattice = 2.0 * std::numbers::pi * static_cast<double>(n) / grid.length();
    const double omega = kg_frequency(p_lattice, mass);
    const double amplitude = std::sqrt(mass / (omega * grid.length()));
    ScalarFieldState state(grid, mass);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n) * static_cast<double>(i) /
                             static_cast<double>(grid.size());
        state.phi[i] = amplitude * std::polar(1.0, phase) * std::polar(1.0, p_lattice * grid.x_min());
        state.dphi_dt[i] = cplx{0.0, -omega} * state.phi[i];
    }
    return state;
}

/// Positive-frequency Gaussian superposition with unit total charge.
inline ScalarFieldState init_kg_gaussian_packets(const LatticeGrid& grid, double mass,
                                                 std::span<const GaussianPacket> packets) {
    for (const auto& packet : packets) check_packet_resolution(grid, packet);
    ScalarFieldState state(grid, mass);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = grid.wavenumber(k);
        cplx c{};
        for (const auto& packet : packets) c += packet_amplitude(packet, p);
        c *= std::polar(1.0, p * grid.x_min());
        state.phi[k] = c;
        state.dphi_dt[k] = cplx{0.0, -kg_frequency(p, mass)} * c;
    }
    fft_inverse(state.phi);
    fft_inverse(state.dphi_dt);
    const double q = state.charge();
    if (!(q > 0.0)) throw InvalidInput("initial packets cancel to a zero field");
    state.scale(1.0 / std::sqrt(q));
    return state;
}

/// Exact free evolution: each mode rotates in the (phi, dphi/dt) plane at omega_p.
inline ScalarFieldState step_klein_gordon(const ScalarFieldState& state, double dt) {
    ScalarFieldState out = state;
    fft_forward(out.phi);
    fft_forward(out.dphi_dt);
    for (std::size_t k = 0; k < state.size(); ++k) {
        const double omega = kg_frequency(state.grid.wavenumber(k), state.mass);
        const double c = std::cos(omega * dt);
        const double s = std::sin(omega * dt);
        const cplx f = out.phi[k];
        const cplx g = out.dphi_dt[k];
        out.phi[k] = c * f + (s / omega) * g;
        out.dphi_dt[k] = -omega * s * f + c * g;
    }
    fft_inverse(out.phi);
    fft_inverse(out.dphi_dt);
    out.time = state.time + dt;
    return out;
}

/// Sum (|dphi/dt|^2 + |dphi/dx|^2 + m^2 |phi|^2) dx.
inline double kg_energy(const ScalarFieldState& state) {
    const auto dphi = spectral_derivative(state.grid, std::span<const cplx>(state.phi));
    double s = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        s += std::norm(state.dphi_dt[i]) + std::norm(dphi[i]) + state.mass * state.mass * std::norm(state.phi[i]);
    return s * state.grid.dx();
}

}  // namespace pilotwave
