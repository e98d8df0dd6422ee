#pragma once

// Two-component Dirac field on the periodic lattice.
//
// Representation: gamma^0 = sigma_3, gamma^1 = i sigma_2, so that
// gamma^0 gamma^1 = sigma_1 and the free Hamiltonian per momentum mode is
// H(p) = sigma_1 p + sigma_3 m. With this choice j^0 = psi^dagger psi and
// j^1 = psi^dagger sigma_1 psi are real and |j^1| <= j^0 at every site.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "pilotwave/error.hpp"
#include "pilotwave/lattice.hpp"

namespace pilotwave {

using Matrix2 = std::array<std::array<cplx, 2>, 2>;
using Spinor = std::array<cplx, 2>;

inline Matrix2 matmul(const Matrix2& a, const Matrix2& b) {
    Matrix2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

inline Matrix2 adjoint(const Matrix2& a) {
    return {{{std::conj(a[0][0]), std::conj(a[1][0])}, {std::conj(a[0][1]), std::conj(a[1][1])}}};
}

inline Spinor matvec(const Matrix2& a, const Spinor& s) {
    return {a[0][0] * s[0] + a[0][1] * s[1], a[1][0] * s[0] + a[1][1] * s[1]};
}

struct DiracRepresentation {
    Matrix2 gamma0{{{1.0, 0.0}, {0.0, -1.0}}};
    Matrix2 gamma1{{{0.0, 1.0}, {-1.0, 0.0}}};

    const Matrix2& gamma(int a) const { return a == 0 ? gamma0 : gamma1; }

    /// Largest deviation of {gamma^a, gamma^b} from 2 g^{ab} I.
    double anticommutator_defect() const {
        double worst = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const auto ab = matmul(gamma(a), gamma(b));
                const auto ba = matmul(gamma(b), gamma(a));
                const double g = (a != b) ? 0.0 : (a == 0 ? 2.0 : -2.0);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        const cplx expected = (i == j) ? cplx{g} : cplx{0.0};
                        worst = std::max(worst, std::abs(ab[i][j] + ba[i][j] - expected));
                    }
            }
        }
        return worst;
    }
};

inline const DiracRepresentation& dirac_representation() {
    static const DiracRepresentation rep{};
    return rep;
}

struct SpinorField {
    LatticeGrid grid;
    std::array<std::vector<cplx>, 2> components;
    double time = 0.0;
    double mass = 1.0;

    SpinorField() = default;
    SpinorField(LatticeGrid g, double m, double t = 0.0) : grid(g), time(t), mass(m) {
        components[0].assign(g.size(), cplx{});
        components[1].assign(g.size(), cplx{});
    }

    std::size_t size() const noexcept { return grid.size(); }
    Spinor at(std::size_t i) const { return {components[0][i], components[1][i]}; }
    void set(std::size_t i, const Spinor& s) {
        components[0][i] = s[0];
        components[1][i] = s[1];
    }

    /// Sum psi^dagger psi dx.
    double norm() const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += std::norm(components[0][i]) + std::norm(components[1][i]);
        return s * grid.dx();
    }

    void scale(double factor) {
        for (auto& c : components)
            for (auto& v : c) v *= factor;
    }
};

inline double dirac_energy(double p, double mass) { return std::hypot(p, mass); }

/// Unit positive-energy eigenspinor of H(p) = sigma_1 p + sigma_3 m.
inline Spinor positive_energy_spinor(double p, double mass) {
    const double e = dirac_energy(p, mass);
    if (e == 0.0) return {1.0, 0.0};
    const double upper = std::sqrt((e + mass) / (2.0 * e));
    const double lower = std::sqrt(std::max(0.0, e - mass) / (2.0 * e));
    return {upper, p >= 0.0 ? lower : -lower};
}

/// exp(-i H(p) dt) for the free Hamiltonian of one mode.
inline Matrix2 dirac_mode_propagator(double p, double mass, double dt) {
    const double e = dirac_energy(p, mass);
    const double c = std::cos(e * dt);
    const double s_over_e = (e == 0.0) ? dt : std::sin(e * dt) / e;
    const cplx mi{0.0, -1.0};
    return {{{c + mi * s_over_e * mass, mi * s_over_e * p}, {mi * s_over_e * p, c - mi * s_over_e * mass}}};
}

/// Lattice index of momentum p, or throws if p is not 2 pi n / L.
inline long long lattice_mode_index(const LatticeGrid& grid, double p) {
    const double n = p * grid.length() / (2.0 * std::numbers::pi);
    const double rounded = std::round(n);
    if (std::abs(n - rounded) > 1e-9 * std::max(1.0, std::abs(n)))
        throw IncommensurateMomentum("momentum is not a lattice momentum 2*pi*n/L");
    if (std::abs(rounded) >= static_cast<double>(grid.size() / 2))
        throw IncommensurateMomentum("momentum beyond the lattice Nyquist limit");
    return static_cast<long long>(rounded);
}

/// Positive-energy plane wave normalized to unit total norm.
inline SpinorField init_plane_wave(const LatticeGrid& grid, double mass, double p) {
    const auto n = lattice_mode_index(grid, p);
    // Use the exact lattice momentum so the phase is periodic to rounding.
    const double p_lattice = 2.0 * std::numbers::pi * static_cast<double>(n) / grid.length();
    const Spinor u = positive_energy_spinor(p_lattice, mass);
    const double amplitude = 1.0 / std::sqrt(grid.length());
    SpinorField field(grid, mass);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double phase = 2.0 * std::numbers::pi * static_cast<double>(n) * static_cast<double>(i) /
                             static_cast<double>(grid.size());
        const cplx w = amplitude * std::polar(1.0, phase) * std::polar(1.0, p_lattice * grid.x_min());
        field.set(i, {w * u[0], w * u[1]});
    }
    return field;
}

/// One Gaussian component of an initial state. |psi|^2 has spatial standard
/// deviation `width`; `weight` sets the relative complex amplitude.
struct GaussianPacket {
    double center = 0.0;
    double momentum = 0.0;
    double width = 1.0;
    cplx weight{1.0, 0.0};
};

inline void check_packet_resolution(const LatticeGrid& grid, const GaussianPacket& packet) {
    if (!(packet.width >= 4.0 * grid.dx()))
        throw UnderresolvedPacket("packet width must be at least 4 lattice spacings");
}

/// Momentum-space amplitude exp(-(p - p0)^2 s^2) e^{-i p x0} of a packet.
inline cplx packet_amplitude(const GaussianPacket& packet, double p) {
    const double dp = p - packet.momentum;
    return packet.weight * std::exp(-dp * dp * packet.width * packet.width) * std::polar(1.0, -p * packet.center);
}

/// Superposition of positive-energy Gaussian packets, normalized to unit norm.
inline SpinorField init_gaussian_packets(const LatticeGrid& grid, double mass, std::span<const GaussianPacket> packets) {
    for (const auto& packet : packets) check_packet_resolution(grid, packet);
    const std::size_t n = grid.size();
    std::array<std::vector<cplx>, 2> spectrum{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const double p = grid.wavenumber(k);
        cplx c{};
        for (const auto& packet : packets) c += packet_amplitude(packet, p);
        const Spinor u = positive_energy_spinor(p, mass);
        const cplx shift = std::polar(1.0, p * grid.x_min());
        spectrum[0][k] = c * u[0] * shift;
        spectrum[1][k] = c * u[1] * shift;
    }
    SpinorField field(grid, mass);
    for (int s = 0; s < 2; ++s) {
        fft_inverse(spectrum[s]);
        field.components[s] = std::move(spectrum[s]);
    }
    const double norm = field.norm();
    if (!(norm > 0.0)) throw InvalidInput("initial packets cancel to a zero field");
    field.scale(1.0 / std::sqrt(norm));
    return field;
}

inline SpinorField init_gaussian_packet(const LatticeGrid& grid, double mass, double center, double momentum,
                                        double width) {
    const GaussianPacket packet{center, momentum, width, {1.0, 0.0}};
    return init_gaussian_packets(grid, mass, std::span<const GaussianPacket>(&packet, 1));
}

/// Exact free evolution by dt via per-mode diagonalization.
inline SpinorField step_dirac_free(const SpinorField& field, double dt) {
    SpinorField out = field;
    fft_forward(out.components[0]);
    fft_forward(out.components[1]);
    for (std::size_t k = 0; k < field.size(); ++k) {
        const Matrix2 u = dirac_mode_propagator(field.grid.wavenumber(k), field.mass, dt);
        const Spinor s = matvec(u, {out.components[0][k], out.components[1][k]});
        out.components[0][k] = s[0];
        out.components[1][k] = s[1];
    }
    fft_inverse(out.components[0]);
    fft_inverse(out.components[1]);
    out.time = field.time + dt;
    return out;
}

}  // namespace pilotwave
