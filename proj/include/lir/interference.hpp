#pragma once

#include <cstdint>

#include "lir/types.hpp"

namespace lir {

enum class NoiseKind { None, Uniform, Sine };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double amplitude = 2.0;
    double frequency = 50.0;  // Hz, Sine only
    double phase = 0.0;       // rad, Sine only
    std::uint64_t seed = 0;   // Uniform only
};

/// Uniform -> seeded i.i.d. on [-amplitude, +amplitude); Sine ->
/// amplitude*sin(2*pi*f*t + phase) on the grid; None -> zeros.
ScalarSeries generate_noise(const NoiseSpec& spec, const TimeGrid& grid);

/// Pointwise sum; grids must match.
ScalarSeries add_series(const ScalarSeries& a, const ScalarSeries& b);

/// v(t) = u(t) + d.
ScalarSeries add_dc(const ScalarSeries& u, double d);

/// +1 for value >= 0, -1 otherwise.
inline int sign_of(double value) { return value >= 0.0 ? +1 : -1; }

/// 10*log10(sum s^2 / sum u^2). Zero-power noise yields +infinity (the
/// "clean" sentinel).
double snr_db(const ScalarSeries& signal, const ScalarSeries& noise);

}  // namespace lir
