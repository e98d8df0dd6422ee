#pragma once

// Ensemble statistics under guidance: draw positions from j^0, carry them
// along the flow and compare the final histogram and binned rho<v> with the
// quantum density and current.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pilotwave/currents.hpp"
#include "pilotwave/dynamics.hpp"
#include "pilotwave/error.hpp"
#include "pilotwave/interpolation.hpp"

namespace pilotwave {

/// Uniform double in [0, 1) from the top 53 bits; portable across standard
/// libraries, unlike std::uniform_real_distribution.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Independent generator for sample `index` so results do not depend on
/// scheduling.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

/// Periodic piecewise-linear density on the lattice with an exact inverse CDF.
class PiecewiseLinearDensity {
public:
    PiecewiseLinearDensity(const LatticeGrid& grid, std::span<const double> values) : grid_(grid) {
        const std::size_t n = grid.size();
        if (values.size() != n) throw InvalidInput("density must have one value per site");
        values_.resize(n);
        double peak = 0.0;
        for (double v : values) peak = std::max(peak, v);
        // Scalar charge densities carry rounding-level negatives in far tails.
        const double slack = 1e-12 * peak;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(values[i] >= -slack)) throw InvalidInput("density must be non-negative");
            values_[i] = std::max(values[i], 0.0);
        }
        cdf_.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) cdf_[i + 1] = cdf_[i] + 0.5 * grid.dx() * (left(i) + right(i));
        if (!(cdf_.back() > 0.0)) throw DegenerateDensity("density integrates to zero");
    }

    double total() const noexcept { return cdf_.back(); }

    /// Probability of the lattice-aligned interval [x(first), x(first + count)).
    double interval_probability(std::size_t first, std::size_t count) const {
        return (cdf_[first + count] - cdf_[first]) / total();
    }

    /// Position with cumulative probability r in [0, 1).
    double quantile(double r) const {
        const double target = r * total();
        const auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), target);
        const std::size_t cell = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()) - 1, size() - 1);
        const double a = left(cell);
        const double b = right(cell);
        const double rem = std::max(0.0, (target - cdf_[cell]) / grid_.dx());
        // Solve a s + (b - a) s^2 / 2 = rem for s in [0, 1].
        const double disc = std::max(0.0, a * a + 2.0 * (b - a) * rem);
        const double denom = a + std::sqrt(disc);
        double s = denom > 0.0 ? 2.0 * rem / denom : 0.5;
        s = std::clamp(s, 0.0, 1.0);
        return grid_.x(cell) + s * grid_.dx();
    }

private:
    std::size_t size() const noexcept { return values_.size(); }
    double left(std::size_t i) const { return values_[i]; }
    double right(std::size_t i) const { return values_[(i + 1) % values_.size()]; }

    LatticeGrid grid_;
    std::vector<double> values_;
    std::vector<double> cdf_;
};

/// N positions distributed as j^0 of the slice; deterministic in (seed, N).
inline std::vector<double> sample_initial_positions(const CurrentField& slice, std::size_t count, std::uint64_t seed) {
    const PiecewiseLinearDensity density(slice.grid, slice.j0);
    std::vector<double> out(count);
    for (std::size_t s = 0; s < count; ++s) {
        auto rng = sample_rng(seed, s);
        out[s] = density.quantile(unit_uniform(rng));
    }
    return out;
}

/// Seam for phase-space particle models. Bohm guidance is the only one
/// provided; any positive model must supply a position update and the
/// velocity it assigns at a point.
class VelocityModel {
public:
    virtual ~VelocityModel() = default;
    virtual std::string name() const = 0;
    virtual ParticleState advance(const ParticleState& p, const FlowInterpolant& flow, double dt) const = 0;
    virtual double velocity(const FlowInterpolant& flow, double t, double x) const = 0;
};

class BohmGuidance final : public VelocityModel {
public:
    std::string name() const override { return "bohm"; }
    ParticleState advance(const ParticleState& p, const FlowInterpolant& flow, double dt) const override {
        return guidance_step(p, flow, dt);
    }
    double velocity(const FlowInterpolant& flow, double t, double x) const override {
        return flow.flow_sample(t, x).vbar();
    }
};

struct EnsembleResult {
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    double t_initial = 0.0;
    double t_final = 0.0;
    std::vector<double> initial_positions;
    std::vector<double> final_positions;  // unwrapped; NaN for lost samples
    std::vector<double> final_velocities;  // NaN for lost samples
    std::vector<std::uint8_t> lost;
    std::size_t lost_count = 0;

    double lost_fraction() const {
        return sample_count == 0 ? 0.0 : static_cast<double>(lost_count) / static_cast<double>(sample_count);
    }
    std::size_t valid_count() const { return sample_count - lost_count; }
};

/// Advances every position from the first slice time to t_final in steps of
/// dt. Samples meeting an undefined flow are marked lost, not dropped.
inline EnsembleResult propagate_ensemble(std::span<const double> positions, const FlowInterpolant& flow,
                                         double t_final, double dt, const VelocityModel& model = BohmGuidance{}) {
    if (!flow.covers(t_final)) throw OutOfHistory(t_final, 0.0);
    if (!(dt > 0.0)) throw InvalidInput("ensemble step must be > 0");
    const double t0 = flow.t_first();
    EnsembleResult r;
    r.sample_count = positions.size();
    r.t_initial = t0;
    r.t_final = t_final;
    r.initial_positions.assign(positions.begin(), positions.end());
    r.final_positions.assign(positions.size(), std::numeric_limits<double>::quiet_NaN());
    r.final_velocities.assign(positions.size(), std::numeric_limits<double>::quiet_NaN());
    r.lost.assign(positions.size(), 0);
    const auto steps = static_cast<long long>(std::ceil((t_final - t0) / dt - 1e-9));
    for (std::size_t s = 0; s < positions.size(); ++s) {
        try {
            ParticleState p;
            p.t = t0;
            p.x = positions[s];
            for (long long n = 1; n <= steps; ++n) {
                const double target = std::min(t_final, t0 + static_cast<double>(n) * dt);
                p = model.advance(p, flow, target - p.t);
                p.t = target;
            }
            r.final_positions[s] = p.x;
            r.final_velocities[s] = model.velocity(flow, p.t, p.x);
        } catch (const UndefinedFlow&) {
            r.lost[s] = 1;
            ++r.lost_count;
        }
    }
    return r;
}

/// True when the final order of the surviving samples matches their initial
/// order (1D trajectories of a single-valued velocity field cannot cross).
inline bool order_preserved(const EnsembleResult& r) {
    std::vector<std::size_t> idx;
    idx.reserve(r.sample_count);
    for (std::size_t s = 0; s < r.sample_count; ++s)
        if (!r.lost[s]) idx.push_back(s);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return r.initial_positions[a] < r.initial_positions[b];
    });
    for (std::size_t k = 1; k < idx.size(); ++k)
        if (r.final_positions[idx[k]] < r.final_positions[idx[k - 1]]) return false;
    return true;
}

/// Lattice-aligned bins of equal width.
struct Binning {
    LatticeGrid grid;
    std::size_t bins = 64;

    Binning(const LatticeGrid& g, std::size_t count) : grid(g), bins(count) {
        if (count == 0 || g.size() % count != 0) throw InvalidInput("bin count must divide the lattice size");
    }
    std::size_t sites_per_bin() const { return grid.size() / bins; }
    double width() const { return grid.length() / static_cast<double>(bins); }
    std::size_t bin_of(double x) const {
        const double pos = (grid.wrap(x) - grid.x_min()) / width();
        return std::min(static_cast<std::size_t>(std::max(pos, 0.0)), bins - 1);
    }
};

struct DensityReport {
    std::vector<double> empirical;  // count / N_valid
    std::vector<double> expected;   // bin probability of j^0
    double tv_distance = 0.0;
};

/// Total-variation distance between the final histogram and normalized j^0.
inline DensityReport density_check(const EnsembleResult& r, const CurrentField& final_slice, std::size_t bins) {
    const Binning binning(final_slice.grid, bins);
    const PiecewiseLinearDensity density(final_slice.grid, final_slice.j0);
    DensityReport rep;
    rep.empirical.assign(bins, 0.0);
    rep.expected.resize(bins);
    const double valid = static_cast<double>(r.valid_count());
    for (std::size_t s = 0; s < r.sample_count; ++s)
        if (!r.lost[s]) rep.empirical[binning.bin_of(r.final_positions[s])] += 1.0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (valid > 0.0) rep.empirical[b] /= valid;
        rep.expected[b] = density.interval_probability(b * binning.sites_per_bin(), binning.sites_per_bin());
        rep.tv_distance += 0.5 * std::abs(rep.empirical[b] - rep.expected[b]);
    }
    return rep;
}

struct CurrentReport {
    std::vector<double> empirical;  // sum v / (N_valid width)
    std::vector<double> expected;   // bin average of j^1 / integral of j^0
    std::vector<double> noise;      // one standard deviation of `empirical`
    std::vector<std::size_t> counts;
    std::size_t min_count = 100;    // bins with fewer samples are not compared
    double max_error = 0.0;
    double noise_floor = 0.0;       // largest noise over compared bins

    bool within(double multiple) const { return max_error <= multiple * noise_floor; }
};

/// Binned rho<v> from the samples against the quantum current j^1.
inline CurrentReport current_check(const EnsembleResult& r, const CurrentField& final_slice, std::size_t bins,
                                   std::size_t min_count = 100) {
    const Binning binning(final_slice.grid, bins);
    const PiecewiseLinearDensity density(final_slice.grid, final_slice.j0);
    const LatticeGrid& grid = final_slice.grid;
    CurrentReport rep;
    rep.min_count = min_count;
    rep.empirical.assign(bins, 0.0);
    rep.expected.assign(bins, 0.0);
    rep.noise.assign(bins, 0.0);
    rep.counts.assign(bins, 0);
    std::vector<double> sum_v2(bins, 0.0);
    const double valid = static_cast<double>(r.valid_count());
    const double width = binning.width();
    for (std::size_t s = 0; s < r.sample_count; ++s) {
        if (r.lost[s]) continue;
        const std::size_t b = binning.bin_of(r.final_positions[s]);
        const double v = r.final_velocities[s];
        rep.empirical[b] += v;
        sum_v2[b] += v * v;
        ++rep.counts[b];
    }
    const std::size_t per = binning.sites_per_bin();
    const std::size_t n = grid.size();
    for (std::size_t b = 0; b < bins; ++b) {
        double integral = 0.0;
        for (std::size_t k = 0; k < per; ++k) {
            const std::size_t i = b * per + k;
            integral += 0.5 * grid.dx() * (final_slice.j1[i] + final_slice.j1[(i + 1) % n]);
        }
        rep.expected[b] = integral / (width * density.total());
        if (valid > 0.0) {
            const double m1 = rep.empirical[b] / valid;
            const double m2 = sum_v2[b] / valid;
            rep.empirical[b] = m1 / width;
            rep.noise[b] = std::sqrt(std::max(0.0, m2 - m1 * m1) / valid) / width;
        }
        if (rep.counts[b] >= min_count) {
            rep.max_error = std::max(rep.max_error, std::abs(rep.empirical[b] - rep.expected[b]));
            rep.noise_floor = std::max(rep.noise_floor, rep.noise[b]);
        }
    }
    return rep;
}

}  // namespace pilotwave
