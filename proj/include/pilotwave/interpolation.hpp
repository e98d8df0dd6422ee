#pragma once

// Continuous current field j^a(t, x) reconstructed from stored slices.
//
// Space: quintic Hermite between lattice sites using spectral first and
// second derivatives as nodal data (C^2). Time: cubic Hermite between
// slices using centered differences of the nodal data (C^1). Derivatives
// returned with a sample are the exact derivatives of this interpolant, so
// identities that hold for any smooth current hold to rounding along
// trajectories that follow it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pilotwave/currents.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/geometry.hpp"
#include "pilotwave/lattice.hpp"

namespace pilotwave {

/// Current and its first derivatives at one spacetime point. Components are
/// contravariant; the coupling constant k has already been applied.
struct FlowSample {
    SpacetimeVector j;
    SpacetimeVector dj_dt;
    SpacetimeVector dj_dx;

    double rho0() const { return rest_density(j); }
    SpacetimeVector ubar() const { return flow_velocity(j); }
    double vbar() const { return j.x / j.t; }

    /// Covariant gradient (d_t rho0, d_x rho0).
    SpacetimeVector grad_rho0() const {
        const double r = rho0();
        return {(j.t * dj_dt.t - j.x * dj_dt.x) / r, (j.t * dj_dx.t - j.x * dj_dx.x) / r};
    }

    /// d_x j^0 + d_t j^1, the single independent component of d_a j_b - d_b j_a.
    double vorticity() const { return dj_dx.t + dj_dt.x; }
};

namespace detail {

struct QuinticBasis {
    std::array<double, 6> value;  // h0 h1 h2 h3 h4 h5
    std::array<double, 6> slope;  // d/ds
};

inline QuinticBasis quintic_basis(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    QuinticBasis b;
    b.value = {1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
               s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
               0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5,
               0.5 * s3 - s4 + 0.5 * s5,
               -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
               10.0 * s3 - 15.0 * s4 + 6.0 * s5};
    b.slope = {-30.0 * s2 + 60.0 * s3 - 30.0 * s4,
               1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
               s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4,
               1.5 * s2 - 4.0 * s3 + 2.5 * s4,
               -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
               30.0 * s2 - 60.0 * s3 + 30.0 * s4};
    return b;
}

struct CubicBasis {
    std::array<double, 4> value;  // left value, left slope, right value, right slope
    std::array<double, 4> slope;
};

inline CubicBasis cubic_basis(double u) {
    const double u2 = u * u, u3 = u2 * u;
    return {{2.0 * u3 - 3.0 * u2 + 1.0, u3 - 2.0 * u2 + u, -2.0 * u3 + 3.0 * u2, u3 - u2},
            {6.0 * u2 - 6.0 * u, 3.0 * u2 - 4.0 * u + 1.0, -6.0 * u2 + 6.0 * u, 3.0 * u2 - 2.0 * u}};
}

}  // namespace detail

class FlowInterpolant {
public:
    // Per site: for each component, (f, f_x, f_xx, f_t, f_xt, f_xxt).
    using Node = std::array<double, 12>;

    FlowInterpolant() = default;

    FlowInterpolant(std::span<const CurrentField> slices, double dt_store, double coupling_k = 1.0)
        : dt_(dt_store), k_(coupling_k) {
        if (slices.empty()) throw InsufficientHistory("flow interpolant needs at least one slice");
        if (!(coupling_k > 0.0)) throw InvalidInput("coupling_k must be > 0");
        grid_ = slices.front().grid;
        t0_ = slices.front().time;
        for (const auto& s : slices) push_spatial(s);
        for (std::size_t n = 0; n < nodes_.size(); ++n) fill_time_derivatives(n);
    }

    /// Adds a slice at t_last + dt_store and refreshes the affected time derivatives.
    void append(const CurrentField& slice) {
        push_spatial(slice);
        const std::size_t n = nodes_.size();
        for (std::size_t i = (n >= 3 ? n - 3 : 0); i < n; ++i) fill_time_derivatives(i);
    }

    const LatticeGrid& grid() const noexcept { return grid_; }
    double coupling_k() const noexcept { return k_; }
    double dt_store() const noexcept { return dt_; }
    double t_first() const noexcept { return t0_; }
    double t_last() const noexcept { return t0_ + static_cast<double>(nodes_.size() - 1) * dt_; }
    std::size_t slice_count() const noexcept { return nodes_.size(); }

    bool covers(double t) const {
        const double tol = 1e-9 * dt_;
        return t >= t_first() - tol && t <= t_last() + tol;
    }

    /// Interpolated k-scaled current and derivatives; throws OutOfHistory.
    FlowSample sample(double t, double x) const {
        if (!covers(t)) throw OutOfHistory(t, x);
        std::size_t n = 0;
        double u = 0.0;
        if (nodes_.size() > 1) {
            const double tau = (t - t0_) / dt_;
            const double fl = std::floor(tau);
            n = static_cast<std::size_t>(std::clamp(fl, 0.0, static_cast<double>(nodes_.size() - 2)));
            u = std::clamp(tau - static_cast<double>(n), 0.0, 1.0);
        }
        const double dx = grid_.dx();
        const double pos = (grid_.wrap(x) - grid_.x_min()) / dx;
        const double cell = std::floor(pos);
        const double s = pos - cell;
        const auto N = grid_.size();
        const std::size_t i0 = static_cast<std::size_t>(cell) % N;
        const std::size_t i1 = (i0 + 1) % N;

        const auto qb = detail::quintic_basis(s);
        // spatial(v, node_a, node_b, q0): quintic of quantities (q0, q0+1, q0+2).
        auto spatial = [&](const std::array<double, 6>& h, const Node& a, const Node& b, int q0) {
            return h[0] * a[q0] + h[1] * dx * a[q0 + 1] + h[2] * dx * dx * a[q0 + 2] + h[5] * b[q0] +
                   h[4] * dx * b[q0 + 1] + h[3] * dx * dx * b[q0 + 2];
        };

        FlowSample out{};
        if (nodes_.size() == 1) {
            const Node& a = nodes_[0][i0];
            const Node& b = nodes_[0][i1];
            for (int c = 0; c < 2; ++c) {
                out.j[c] = k_ * spatial(qb.value, a, b, 6 * c);
                out.dj_dx[c] = k_ * spatial(qb.slope, a, b, 6 * c) / dx;
                out.dj_dt[c] = 0.0;
            }
            return out;
        }

        const auto cb = detail::cubic_basis(u);
        const Node& a0 = nodes_[n][i0];
        const Node& b0 = nodes_[n][i1];
        const Node& a1 = nodes_[n + 1][i0];
        const Node& b1 = nodes_[n + 1][i1];
        for (int c = 0; c < 2; ++c) {
            const int f = 6 * c;
            const int ft = 6 * c + 3;
            const double v0 = spatial(qb.value, a0, b0, f);
            const double w0 = spatial(qb.value, a0, b0, ft);
            const double v1 = spatial(qb.value, a1, b1, f);
            const double w1 = spatial(qb.value, a1, b1, ft);
            const double g0 = spatial(qb.slope, a0, b0, f);
            const double y0 = spatial(qb.slope, a0, b0, ft);
            const double g1 = spatial(qb.slope, a1, b1, f);
            const double y1 = spatial(qb.slope, a1, b1, ft);
            out.j[c] = k_ * (cb.value[0] * v0 + cb.value[1] * dt_ * w0 + cb.value[2] * v1 + cb.value[3] * dt_ * w1);
            out.dj_dx[c] =
                k_ * (cb.value[0] * g0 + cb.value[1] * dt_ * y0 + cb.value[2] * g1 + cb.value[3] * dt_ * y1) / dx;
            out.dj_dt[c] =
                k_ * (cb.slope[0] * v0 + cb.slope[1] * dt_ * w0 + cb.slope[2] * v1 + cb.slope[3] * dt_ * w1) / dt_;
        }
        return out;
    }

    /// k-scaled density floor at time t (largest of the bracketing slices).
    double density_floor(double t) const { return kDensityFloor * k_ * bracket_max(max_j0_, t); }

    /// k-scaled rest-density floor used by the general equation of motion.
    double rest_density_floor(double t) const { return 1e-10 * k_ * bracket_max(max_rho0_, t); }

    /// True where the interpolated current has a flow velocity.
    bool defined(const FlowSample& s, double t) const {
        if (!(s.j.t > density_floor(t))) return false;
        return (s.j.t - s.j.x) * (s.j.t + s.j.x) > 0.0;
    }

    /// Sample that must carry a flow velocity; throws UndefinedFlow otherwise.
    FlowSample flow_sample(double t, double x) const {
        const FlowSample s = sample(t, x);
        if (!defined(s, t)) throw UndefinedFlow(t, x);
        return s;
    }

private:
    void push_spatial(const CurrentField& c) {
        if (!(c.grid == grid_)) throw InvalidInput("current slices must share one lattice");
        const double expected = t0_ + static_cast<double>(nodes_.size()) * dt_;
        if (std::abs(c.time - expected) > 1e-9 * std::max(1.0, dt_))
            throw InvalidInput("current slices must be uniformly spaced in time");
        const auto d0 = spectral_derivative(grid_, std::span<const double>(c.j0), 1);
        const auto dd0 = spectral_derivative(grid_, std::span<const double>(c.j0), 2);
        const auto d1 = spectral_derivative(grid_, std::span<const double>(c.j1), 1);
        const auto dd1 = spectral_derivative(grid_, std::span<const double>(c.j1), 2);
        std::vector<Node> nodes(c.size());
        double max_rho = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
            nodes[i] = {c.j0[i], d0[i], dd0[i], 0.0, 0.0, 0.0, c.j1[i], d1[i], dd1[i], 0.0, 0.0, 0.0};
            if (c.defined[i]) max_rho = std::max(max_rho, c.rho0[i]);
        }
        nodes_.push_back(std::move(nodes));
        max_j0_.push_back(c.max_j0());
        max_rho0_.push_back(max_rho);
    }

    void fill_time_derivatives(std::size_t n) {
        const std::size_t count = nodes_.size();
        auto& target = nodes_[n];
        for (std::size_t i = 0; i < target.size(); ++i) {
            for (int c = 0; c < 2; ++c) {
                for (int q = 0; q < 3; ++q) {
                    const int src = 6 * c + q;
                    double d = 0.0;
                    if (count >= 3) {
                        if (n == 0)
                            d = (-3.0 * nodes_[0][i][src] + 4.0 * nodes_[1][i][src] - nodes_[2][i][src]) / (2.0 * dt_);
                        else if (n + 1 == count)
                            d = (3.0 * nodes_[n][i][src] - 4.0 * nodes_[n - 1][i][src] + nodes_[n - 2][i][src]) /
                                (2.0 * dt_);
                        else
                            d = (nodes_[n + 1][i][src] - nodes_[n - 1][i][src]) / (2.0 * dt_);
                    } else if (count == 2) {
                        d = (nodes_[1][i][src] - nodes_[0][i][src]) / dt_;
                    }
                    target[i][src + 3] = d;
                }
            }
        }
    }

    double bracket_max(const std::vector<double>& per_slice, double t) const {
        if (per_slice.size() == 1) return per_slice[0];
        const double tau = (t - t0_) / dt_;
        const auto n = static_cast<std::size_t>(
            std::clamp(std::floor(tau), 0.0, static_cast<double>(per_slice.size() - 2)));
        return std::max(per_slice[n], per_slice[n + 1]);
    }

    LatticeGrid grid_;
    double dt_ = 1.0;
    double k_ = 1.0;
    double t0_ = 0.0;
    std::vector<std::vector<Node>> nodes_;
    std::vector<double> max_j0_;
    std::vector<double> max_rho0_;
};

/// Current and flow at a single point of one slice, using the same spatial
/// reconstruction as FlowInterpolant.
inline FlowSample sample_slice(const CurrentField& current, double x, double coupling_k = 1.0) {
    const FlowInterpolant single(std::span<const CurrentField>(&current, 1), 1.0, coupling_k);
    return single.sample(current.time, x);
}

}  // namespace pilotwave
