#pragma once

#include <stdexcept>
#include <vector>

namespace qsync {

// Scalar samples on a uniform time grid.
struct TimeSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double time(int i) const { return t0 + dt * i; }
    double span() const { return values.empty() ? 0.0 : dt * (size() - 1); }
};

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int count = 0;

    TimeGrid() = default;
    TimeGrid(double start, double step, int n) : t0(start), dt(step), count(n) {
        if (n < 1) throw std::invalid_argument("TimeGrid: need at least one sample");
        if (step <= 0.0) throw std::invalid_argument("TimeGrid: step must be positive");
    }
    double time(int i) const { return t0 + dt * i; }
    double t_end() const { return time(count - 1); }
};

}  // namespace qsync
