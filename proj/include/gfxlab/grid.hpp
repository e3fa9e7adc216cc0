#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace gfx {

/// A discretized trajectory in R^dim on an explicit time grid.
/// values are stored row-major, one point of R^dim per time.
struct PathGrid {
    int dim = 1;
    std::vector<double> times;   // strictly increasing, times[0] == 0
    std::vector<double> values;  // times.size() * dim entries

    PathGrid() = default;
    PathGrid(int dim_, std::vector<double> times_, std::vector<double> values_)
        : dim(dim_), times(std::move(times_)), values(std::move(values_)) {
        validate();
    }

    std::size_t size() const { return times.size(); }
    double duration() const { return times.empty() ? 0.0 : times.back(); }

    std::span<const double> at(std::size_t i) const {
        return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
    double scalar(std::size_t i) const { return values[i * static_cast<std::size_t>(dim)]; }

    /// Componentwise linear interpolation at time t (t inside the grid range).
    std::vector<double> interpolate(double t) const {
        const std::size_t i = bracket_index(t);
        const double t0 = times[i], t1 = times[i + 1];
        const double w = (t - t0) / (t1 - t0);
        std::vector<double> out(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k)
            out[static_cast<std::size_t>(k)] =
                (1.0 - w) * values[i * dim + k] + w * values[(i + 1) * dim + k];
        return out;
    }

    /// Index i with times[i] <= t <= times[i+1].
    std::size_t bracket_index(double t) const {
        if (times.size() < 2 || t < times.front() || t > times.back())
            throw std::out_of_range("PathGrid: time outside grid");
        std::size_t lo = 0, hi = times.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (times[mid] <= t) lo = mid; else hi = mid;
        }
        return lo;
    }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("PathGrid: dim must be >= 1");
        if (times.empty() || times.front() != 0.0)
            throw std::invalid_argument("PathGrid: grid must start at time 0");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument("PathGrid: times must be strictly increasing");
        if (values.size() != times.size() * static_cast<std::size_t>(dim))
            throw std::invalid_argument("PathGrid: values size mismatch");
    }
};

/// Uniform grid 0, h, 2h, ..., duration with `steps` intervals.
inline std::vector<double> uniform_times(double duration, int steps) {
    if (steps < 2) throw std::invalid_argument("uniform grid needs steps >= 2");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        t[static_cast<std::size_t>(i)] = duration * static_cast<double>(i) / steps;
    t.back() = duration;
    return t;
}

} // namespace gfx
