#pragma once

// Minkowski algebra in 1+1 dimensions, signature (+, -), natural units.

#include <cmath>

#include "pilotwave/error.hpp"

namespace pilotwave {

/// Two-component spacetime vector. Whether the components are contravariant
/// or covariant is a property of the call site; the type does not track it.
struct SpacetimeVector {
    double t = 0.0;
    double x = 0.0;

    constexpr double operator[](int index) const { return index == 0 ? t : x; }
    constexpr double& operator[](int index) { return index == 0 ? t : x; }

    friend constexpr SpacetimeVector operator+(SpacetimeVector a, SpacetimeVector b) {
        return {a.t + b.t, a.x + b.x};
    }
    friend constexpr SpacetimeVector operator-(SpacetimeVector a, SpacetimeVector b) {
        return {a.t - b.t, a.x - b.x};
    }
    friend constexpr SpacetimeVector operator*(double s, SpacetimeVector a) { return {s * a.t, s * a.x}; }
    friend constexpr SpacetimeVector operator*(SpacetimeVector a, double s) { return {s * a.t, s * a.x}; }
    friend constexpr SpacetimeVector operator/(SpacetimeVector a, double s) { return {a.t / s, a.x / s}; }
    friend constexpr bool operator==(SpacetimeVector, SpacetimeVector) = default;
};

/// Diagonal metric g = diag(+1, -1). g^{ab} and g_{ab} coincide.
struct Metric {
    static constexpr double component(int a, int b) {
        if (a != b) return 0.0;
        return a == 0 ? 1.0 : -1.0;
    }
};

constexpr double minkowski_dot(SpacetimeVector a, SpacetimeVector b) { return a.t * b.t - a.x * b.x; }

constexpr SpacetimeVector lower_index(SpacetimeVector v) { return {v.t, -v.x}; }

constexpr SpacetimeVector raise_index(SpacetimeVector v) { return {v.t, -v.x}; }

/// Euclidean component norm, used for residual reporting only.
inline double component_norm(SpacetimeVector v) { return std::hypot(v.t, v.x); }

inline bool is_finite(SpacetimeVector v) { return std::isfinite(v.t) && std::isfinite(v.x); }

/// v / sqrt(v.v) for a future-pointing timelike v.
inline SpacetimeVector normalize_timelike(SpacetimeVector v) {
    // (t - x)(t + x) keeps the sign exact when |x| is close to t.
    const double norm2 = (v.t - v.x) * (v.t + v.x);
    if (!(norm2 > 0.0)) throw NonTimelike("vector is not timelike");
    if (!(v.t > 0.0)) throw NegativeTimeOrientation("vector is past-pointing");
    return v / std::sqrt(norm2);
}

/// Boost of a contravariant vector by rapidity eta along +x.
inline SpacetimeVector boost(SpacetimeVector v, double eta) {
    const double c = std::cosh(eta);
    const double s = std::sinh(eta);
    return {c * v.t + s * v.x, s * v.t + c * v.x};
}

}  // namespace pilotwave
