#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lir {

/// A point in 3-D phase space.
struct State3 {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    friend State3 operator+(const State3& a, const State3& b) {
        return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
    }
    friend State3 operator-(const State3& a, const State3& b) {
        return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
    }
    friend State3 operator*(double c, const State3& s) {
        return {c * s.x1, c * s.x2, c * s.x3};
    }
    friend bool operator==(const State3& a, const State3& b) {
        return a.x1 == b.x1 && a.x2 == b.x2 && a.x3 == b.x3;
    }
};

inline double norm(const State3& s) {
    return std::sqrt(s.x1 * s.x1 + s.x2 * s.x2 + s.x3 * s.x3);
}

inline bool all_finite(const State3& s) {
    return std::isfinite(s.x1) && std::isfinite(s.x2) && std::isfinite(s.x3);
}

/// Uniform sampling grid: sample i lives at t0 + i*dt.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1e-3;
    std::size_t n = 0;

    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
        return a.t0 == b.t0 && a.dt == b.dt && a.n == b.n;
    }
};

struct Trajectory {
    TimeGrid grid;
    std::vector<State3> states;
};

/// A uniformly sampled scalar time series (transmitted signal, noise, ...).
struct ScalarSeries {
    TimeGrid grid;
    std::vector<double> values;
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite state encountered during integration.
struct BlowupError : Error {
    using Error::Error;
};

/// Two series with different grids were combined.
struct GridMismatchError : Error {
    using Error::Error;
};

/// Reference trajectory too short for the requested lookahead.
struct NotEnoughDataError : Error {
    using Error::Error;
};

/// Bad configuration value or unparsable config file.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace lir
