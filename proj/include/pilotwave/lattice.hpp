#pragma once

// Periodic 1D lattice and the spectral machinery on it. Transforms are
// delegated to FFTW; plans are created once per size and shared.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "pilotwave/error.hpp"

namespace pilotwave {

using cplx = std::complex<double>;

/// Periodic grid on [-L/2, L/2) with num_points sites.
class LatticeGrid {
public:
    LatticeGrid() = default;

    LatticeGrid(std::size_t num_points, double box_length) : num_points_(num_points), box_length_(box_length) {
        if (num_points < 8) throw ConfigInvalid("grid.num_points", "must be >= 8");
        if ((num_points & (num_points - 1)) != 0) throw ConfigInvalid("grid.num_points", "must be a power of two");
        if (!(box_length > 0.0) || !std::isfinite(box_length)) throw ConfigInvalid("grid.box_length", "must be > 0");
    }

    std::size_t size() const noexcept { return num_points_; }
    double length() const noexcept { return box_length_; }
    double dx() const noexcept { return box_length_ / static_cast<double>(num_points_); }
    double x_min() const noexcept { return -0.5 * box_length_; }
    double x(std::size_t i) const noexcept { return x_min() + static_cast<double>(i) * dx(); }

    /// Map any coordinate into [-L/2, L/2).
    double wrap(double x) const noexcept {
        double r = std::fmod(x - x_min(), box_length_);
        if (r < 0.0) r += box_length_;
        if (r >= box_length_) r = 0.0;
        return x_min() + r;
    }

    /// Signed periodic separation a - b reduced to [-L/2, L/2).
    double separation(double a, double b) const noexcept {
        double d = std::fmod(a - b, box_length_);
        if (d >= 0.5 * box_length_) d -= box_length_;
        if (d < -0.5 * box_length_) d += box_length_;
        return d;
    }

    /// Angular wavenumber of FFT bin n (standard ordering, Nyquist bin negative).
    double wavenumber(std::size_t n) const noexcept {
        const auto N = static_cast<long long>(num_points_);
        long long k = static_cast<long long>(n);
        if (k >= N / 2) k -= N;
        return 2.0 * std::numbers::pi * static_cast<double>(k) / box_length_;
    }

    bool is_nyquist(std::size_t n) const noexcept { return n == num_points_ / 2; }

    friend bool operator==(const LatticeGrid& a, const LatticeGrid& b) {
        return a.num_points_ == b.num_points_ && a.box_length_ == b.box_length_;
    }

private:
    std::size_t num_points_ = 0;
    double box_length_ = 0.0;
};

namespace detail {

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~FftPlans() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

inline const FftPlans& fft_plans(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<FftPlans>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<FftPlans>();
        std::vector<cplx> scratch(n);
        auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
        const int len = static_cast<int>(n);
        // Unaligned plans keep results independent of allocation addresses.
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        slot->forward = fftw_plan_dft_1d(len, data, data, FFTW_FORWARD, flags);
        slot->backward = fftw_plan_dft_1d(len, data, data, FFTW_BACKWARD, flags);
    }
    return *slot;
}

}  // namespace detail

/// In-place forward DFT, no normalization.
inline void fft_forward(std::span<cplx> data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::fft_plans(data.size()).forward, p, p);
}

/// In-place inverse DFT including the 1/N factor.
inline void fft_inverse(std::span<cplx> data) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(detail::fft_plans(data.size()).backward, p, p);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

/// Spectral d^order/dx^order of periodic complex samples. The Nyquist bin is
/// dropped for odd orders so real input gives real output.
inline std::vector<cplx> spectral_derivative(const LatticeGrid& grid, std::span<const cplx> values, int order = 1) {
    std::vector<cplx> work(values.begin(), values.end());
    fft_forward(work);
    for (std::size_t n = 0; n < work.size(); ++n) {
        if (order % 2 == 1 && grid.is_nyquist(n)) {
            work[n] = 0.0;
            continue;
        }
        const cplx ik{0.0, grid.wavenumber(n)};
        cplx factor = 1.0;
        for (int o = 0; o < order; ++o) factor *= ik;
        work[n] *= factor;
    }
    fft_inverse(work);
    return work;
}

inline std::vector<double> spectral_derivative(const LatticeGrid& grid, std::span<const double> values, int order = 1) {
    std::vector<cplx> c(values.begin(), values.end());
    auto d = spectral_derivative(grid, std::span<const cplx>(c), order);
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
    return out;
}

/// Sum f dx over the lattice.
inline double lattice_integral(const LatticeGrid& grid, std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s * grid.dx();
}

}  // namespace pilotwave
