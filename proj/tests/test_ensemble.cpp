#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"

using namespace pilotwave;
using namespace testing_support;

namespace {

CurrentField current_from(const LatticeGrid& g, const std::vector<double>& j0, double time = 0.0) {
    CurrentField c;
    c.grid = g;
    c.time = time;
    c.j0 = j0;
    c.j1.assign(j0.size(), 0.0);
    detail::fill_derived(c);
    return c;
}

// Expected TV distance of an N-sample multinomial histogram: sum over bins of
// E|X/N - p| / 2 with the normal approximation E|Z| = sqrt(2/pi).
double multinomial_tv(const std::vector<double>& p, double n) {
    double s = 0.0;
    for (double q : p) s += std::sqrt(q * (1.0 - q) / n);
    return 0.5 * std::sqrt(2.0 / kPi) * s;
}

}  // namespace

TEST(Sampling, UniformDensityPassesKolmogorovSmirnov) {
    const auto g = LatticeGrid(256, 10.0);
    const auto c = current_from(g, std::vector<double>(g.size(), 0.7));
    const std::size_t n = 20000;
    auto x = sample_initial_positions(c, n, 42);
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = (x[i] - g.x_min()) / g.length();
        d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampling, HotBinCapturesEverySample) {
    const auto g = LatticeGrid(256, 10.0);
    std::vector<double> j0(g.size(), 0.0);
    for (std::size_t i = 33; i < 40; ++i) j0[i] = 1.0;
    const auto c = current_from(g, j0);
    const Binning bins(g, 32);
    for (double x : sample_initial_positions(c, 5000, 7)) EXPECT_EQ(bins.bin_of(x), 4u);
}

TEST(Sampling, DeterministicPerSeed) {
    const auto c = dirac_current(interference_field(desk_grid()));
    const auto a = sample_initial_positions(c, 1000, 99);
    const auto b = sample_initial_positions(c, 1000, 99);
    const auto other = sample_initial_positions(c, 1000, 100);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, other);
    // Sample s does not depend on how many are drawn.
    EXPECT_EQ(sample_initial_positions(c, 10, 99)[7], a[7]);
}

TEST(Sampling, ZeroDensityIsDegenerate) {
    const auto g = LatticeGrid(64, 10.0);
    EXPECT_THROW(sample_initial_positions(current_from(g, std::vector<double>(64, 0.0)), 10, 1), DegenerateDensity);
    EXPECT_THROW(PiecewiseLinearDensity(g, std::vector<double>(64, -1.0)), InvalidInput);
}

TEST(Sampling, RoundingNegativesAreZeroButRealNegativesThrow) {
    const auto g = LatticeGrid(64, 10.0);
    std::vector<double> d(64, 1.0);
    d[10] = -1e-20;
    const PiecewiseLinearDensity ok(g, d);
    EXPECT_EQ(ok.interval_probability(10, 1), 0.5 / 63.0);
    d[10] = -1e-6;
    EXPECT_THROW(PiecewiseLinearDensity(g, d), InvalidInput);
}

TEST(Sampling, KleinGordonPacketsCanBeSampled) {
    const auto c = kg_current(interference_kg(desk_grid()));
    const auto x = sample_initial_positions(c, 2000, 9);
    double mean_abs = 0.0;
    for (double v : x) mean_abs += std::abs(v) / 2000.0;
    EXPECT_NEAR(mean_abs, 12.0, 0.3);
}

TEST(Propagation, PlaneWaveShiftsEverySample) {
    const auto g = plane_wave_grid();
    const auto h = free_history(init_plane_wave(g, 1.0, 0.75), 10.0, 0.5);
    const auto flow = flow_of(h);
    const auto x0 = sample_initial_positions(dirac_current(h[0]), 500, 3);
    const auto r = propagate_ensemble(x0, flow, 10.0, 0.5);
    EXPECT_EQ(r.lost_count, 0u);
    for (std::size_t s = 0; s < x0.size(); ++s) {
        EXPECT_NEAR(r.final_positions[s], x0[s] + 6.0, 1e-10);
        EXPECT_NEAR(r.final_velocities[s], 0.6, 1e-12);
    }
    const auto cur = current_check(r, dirac_current(h.back()), 16, 1);
    for (std::size_t b = 0; b < 16; ++b)
        if (cur.counts[b] > 0) EXPECT_NEAR(cur.empirical[b] / (static_cast<double>(cur.counts[b]) / 500.0 / (g.length() / 16)), 0.6, 1e-10);
}

TEST(Propagation, ZeroDurationIsIdentity) {
    const auto h = free_history(interference_field(desk_grid()), 1.0, 0.1);
    const auto flow = flow_of(h);
    const auto x0 = sample_initial_positions(dirac_current(h[0]), 200, 5);
    const auto r = propagate_ensemble(x0, flow, 0.0, 0.1);
    EXPECT_EQ(r.final_positions, x0);
}

TEST(Propagation, OutOfHistoryIsAnError) {
    const auto h = free_history(interference_field(desk_grid()), 1.0, 0.1);
    const auto flow = flow_of(h);
    const std::vector<double> x0{-12.0};
    EXPECT_THROW(propagate_ensemble(x0, flow, 2.0, 0.1), OutOfHistory);
}

TEST(DensityCheck, DirectSamplesSitAtTheMultinomialFloor) {
    const auto c = dirac_current(interference_field(desk_grid()));
    const std::size_t n = 20000;
    EnsembleResult r;
    r.sample_count = n;
    r.final_positions = sample_initial_positions(c, n, 11);
    r.lost.assign(n, 0);
    const auto rep = density_check(r, c, 64);
    const double floor = multinomial_tv(rep.expected, static_cast<double>(n));
    EXPECT_GT(rep.tv_distance, 0.5 * floor);
    EXPECT_LT(rep.tv_distance, 1.5 * floor);
}

TEST(DensityCheck, WrongSliceIsFarAboveNoise) {
    const auto h = free_history(interference_field(desk_grid()), 20.0, 0.1);
    const auto flow = flow_of(h);
    const auto x0 = sample_initial_positions(dirac_current(h[0]), 4000, 13);
    const auto r = propagate_ensemble(x0, flow, 20.0, 0.1);
    const auto right = density_check(r, dirac_current(h.back()), 64);
    const auto wrong = density_check(r, dirac_current(h[0]), 64);
    const double floor = multinomial_tv(right.expected, 4000.0);
    EXPECT_LT(right.tv_distance, 2.0 * floor);
    EXPECT_GT(wrong.tv_distance, 10.0 * floor);
    EXPECT_TRUE(order_preserved(r));
}

TEST(CurrentCheck, ZeroCurrentGivesZeroMeanVelocity) {
    const auto g = desk_grid();
    SpinorField f(g, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) f.components[0][i] = std::exp(-0.5 * g.x(i) * g.x(i) / 9.0);
    const auto c = dirac_current(f);
    const FlowInterpolant flow(std::span<const CurrentField>(&c, 1), 0.1);
    const auto x0 = sample_initial_positions(c, 3000, 17);
    const auto r = propagate_ensemble(x0, flow, 0.0, 0.1);
    const auto rep = current_check(r, c, 64);
    for (double v : rep.empirical) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(rep.max_error, 0.0);
}

TEST(VelocityModels, BohmIsTheDefaultSeam) {
    const BohmGuidance bohm;
    EXPECT_EQ(bohm.name(), "bohm");
    const auto flow = flow_of(free_history(init_plane_wave(plane_wave_grid(), 1.0, 0.75), 1.0, 0.5));
    EXPECT_NEAR(bohm.velocity(flow, 0.3, 2.0), 0.6, 1e-12);
}

TEST(Binning, RequiresDivisibility) {
    EXPECT_THROW(Binning(desk_grid(), 100), InvalidInput);
    const Binning b(desk_grid(), 64);
    EXPECT_EQ(b.bin_of(-100.0), 0u);
    EXPECT_EQ(b.bin_of(99.99), 63u);
    EXPECT_EQ(b.bin_of(100.0), 0u);
}
