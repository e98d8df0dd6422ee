#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pilotwave/geometry.hpp"

using namespace pilotwave;

TEST(Geometry, DotProductOfBasisVectors) {
    EXPECT_EQ(minkowski_dot({1, 0}, {1, 0}), 1.0);
    EXPECT_EQ(minkowski_dot({0, 1}, {0, 1}), -1.0);
    EXPECT_EQ(minkowski_dot({1, 1}, {1, 1}), 0.0);
}

TEST(Geometry, DotProductIsSymmetricAndBilinear) {
    const SpacetimeVector a{1.3, -0.4}, b{-2.1, 0.7}, c{0.25, 3.5};
    EXPECT_DOUBLE_EQ(minkowski_dot(a, b), minkowski_dot(b, a));
    EXPECT_NEAR(minkowski_dot(2.5 * a + c, b), 2.5 * minkowski_dot(a, b) + minkowski_dot(c, b), 1e-14);
}

TEST(Geometry, LowerIndexFlipsSpatialComponent) {
    EXPECT_EQ(lower_index({1, 0}), (SpacetimeVector{1, 0}));
    EXPECT_EQ(lower_index({0, 1}), (SpacetimeVector{0, -1}));
    EXPECT_EQ(lower_index({2, 3}), (SpacetimeVector{2, -3}));
    const SpacetimeVector v{0.3, -7.25};
    EXPECT_EQ(lower_index(lower_index(v)), v);
    EXPECT_EQ(raise_index(lower_index(v)), v);
}

TEST(Geometry, MetricInvertsItself) {
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
            double s = 0.0;
            for (int b = 0; b < 2; ++b) s += Metric::component(a, b) * Metric::component(b, c);
            EXPECT_EQ(s, a == c ? 1.0 : 0.0);
        }
}

TEST(Geometry, NormalizeTimelike) {
    EXPECT_EQ(normalize_timelike({1, 0}), (SpacetimeVector{1, 0}));
    const auto w = normalize_timelike({5, 3});
    EXPECT_DOUBLE_EQ(w.t, 1.25);
    EXPECT_DOUBLE_EQ(w.x, 0.75);
    EXPECT_THROW(normalize_timelike({1, 1}), NonTimelike);
    EXPECT_THROW(normalize_timelike({1, 2}), NonTimelike);
    EXPECT_THROW(normalize_timelike({-2, 1}), NegativeTimeOrientation);
}

TEST(Geometry, NormalizedVectorsAreUnitAcrossRapidities) {
    for (double eta = -8.0; eta <= 8.0; eta += 0.37) {
        const SpacetimeVector v{3.0 * std::cosh(eta), 3.0 * std::sinh(eta)};
        const auto w = normalize_timelike(v);
        // u0^2 - u1^2 cancels, so the rounding floor grows with u0^2.
        const double floor = 8.0 * std::numeric_limits<double>::epsilon() * (w.t * w.t + w.x * w.x);
        EXPECT_LE(std::abs(minkowski_dot(w, w) - 1.0), floor) << "eta=" << eta;
        EXPECT_NEAR(w.x / w.t, std::tanh(eta), 1e-15);
    }
}

TEST(Geometry, BoostPreservesInterval) {
    const SpacetimeVector u{1.25, 0.75};
    const auto b = boost(u, 0.3);
    EXPECT_NEAR(minkowski_dot(b, b), 1.0, 1e-14);
    const auto back = boost(b, -0.3);
    EXPECT_NEAR(back.t, u.t, 1e-14);
    EXPECT_NEAR(back.x, u.x, 1e-14);
}
