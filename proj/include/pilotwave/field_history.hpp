#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pilotwave/error.hpp"

namespace pilotwave {

/// Append-only sequence of field slices at uniform spacing dt_store.
template <class Field>
class FieldHistory {
public:
    FieldHistory() = default;
    explicit FieldHistory(double dt_store) : dt_(dt_store) {
        if (!(dt_store > 0.0)) throw InvalidInput("dt_store must be > 0");
    }

    void append(Field slice) {
        if (!slices_.empty()) {
            const double expected = slices_.back().time + dt_;
            if (!(slice.time > slices_.back().time))
                throw InvalidInput("history slices must have strictly increasing times");
            if (std::abs(slice.time - expected) > 1e-12 * std::max(1.0, std::abs(expected)))
                throw InvalidInput("history slices must be uniformly spaced");
        }
        slices_.push_back(std::move(slice));
    }

    std::size_t size() const noexcept { return slices_.size(); }
    bool empty() const noexcept { return slices_.empty(); }
    double dt_store() const noexcept { return dt_; }
    double t_first() const { return slices_.front().time; }
    double t_last() const { return slices_.back().time; }

    const Field& operator[](std::size_t i) const { return slices_.at(i); }
    const Field& back() const { return slices_.back(); }
    const std::vector<Field>& slices() const noexcept { return slices_; }

    /// Throws unless slice i has `before` slices before it and `after` after it.
    void require_neighbors(std::size_t i, std::size_t before, std::size_t after) const {
        if (i >= slices_.size() || i < before || i + after >= slices_.size())
            throw InsufficientHistory("slice " + std::to_string(i) + " needs " + std::to_string(before) +
                                      " earlier and " + std::to_string(after) + " later slices");
    }

private:
    double dt_ = 0.0;
    std::vector<Field> slices_;
};

/// Evolve `initial` with `step(field, dt)` and keep every slice up to t_final.
template <class Field, class Stepper>
FieldHistory<Field> evolve_history(Field initial, double t_final, double dt_store, Stepper&& step) {
    FieldHistory<Field> history(dt_store);
    const double t0 = initial.time;
    const auto count = static_cast<std::size_t>(std::llround((t_final - t0) / dt_store));
    history.append(initial);
    Field current = std::move(initial);
    for (std::size_t n = 1; n <= count; ++n) {
        current = step(current, dt_store);
        // Pin the clock to t0 + n dt so long runs do not accumulate rounding.
        current.time = t0 + static_cast<double>(n) * dt_store;
        history.append(current);
    }
    return history;
}

}  // namespace pilotwave
