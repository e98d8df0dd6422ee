#pragma once

// Gaussian stand-in for the particle's point density. sigma is a normalized
// Gaussian of width w (lattice units) truncated at 6w and renormalized so the
// lattice sum of sigma dx is exactly one; sigma_0 = sigma / u^0.

#include <cmath>
#include <cstddef>
#include <vector>

#include "pilotwave/error.hpp"
#include "pilotwave/lattice.hpp"

namespace pilotwave {

struct RegularizedDensity {
    double center = 0.0;
    double width = 3.0;  // in lattice spacings
    double gamma_factor = 1.0;

    struct Site {
        std::size_t index;
        double sigma;
    };

    /// Lattice sites inside the truncation window with their sigma values.
    std::vector<Site> support(const LatticeGrid& grid) const {
        if (!(width > 0.0)) throw InvalidInput("regulator width must be > 0");
        if (!(gamma_factor >= 1.0)) throw InvalidInput("regulator gamma factor must be >= 1");
        const double w = width * grid.dx();
        const double cutoff = 6.0 * w;
        const auto n = static_cast<long long>(grid.size());
        const double offset = (grid.wrap(center) - grid.x_min()) / grid.dx();
        const auto first = static_cast<long long>(std::floor(offset - 6.0 * width)) - 1;
        const auto last = static_cast<long long>(std::ceil(offset + 6.0 * width)) + 1;
        std::vector<Site> sites;
        double total = 0.0;
        for (long long k = first; k <= last; ++k) {
            const double d = (static_cast<double>(k) - offset) * grid.dx();
            if (std::abs(d) > cutoff) continue;
            const auto idx = static_cast<std::size_t>(((k % n) + n) % n);
            const double g = std::exp(-0.5 * d * d / (w * w));
            sites.push_back({idx, g});
            total += g;
        }
        const double norm = 1.0 / (total * grid.dx());
        for (auto& s : sites) s.sigma *= norm;
        return sites;
    }

    /// sigma on the full lattice.
    std::vector<double> sigma(const LatticeGrid& grid) const {
        std::vector<double> out(grid.size(), 0.0);
        for (const auto& s : support(grid)) out[s.index] += s.sigma;
        return out;
    }

    /// sigma_0 = sigma / u^0 on the full lattice.
    std::vector<double> sigma0(const LatticeGrid& grid) const {
        auto out = sigma(grid);
        for (auto& v : out) v /= gamma_factor;
        return out;
    }
};

}  // namespace pilotwave
