#include "lir/interference.hpp"

#include <cmath>
#include <limits>

#include "lir/rng.hpp"

namespace lir {

ScalarSeries generate_noise(const NoiseSpec& spec, const TimeGrid& grid) {
    if (spec.amplitude < 0.0) throw ConfigError("noise amplitude must be >= 0");
    ScalarSeries out;
    out.grid = grid;
    out.values.resize(grid.n, 0.0);
    switch (spec.kind) {
        case NoiseKind::None:
            break;
        case NoiseKind::Uniform: {
            Xoshiro256pp rng(spec.seed);
            for (auto& v : out.values) v = rng.next_symmetric(spec.amplitude);
            break;
        }
        case NoiseKind::Sine: {
            const double w = 2.0 * M_PI * spec.frequency;
            for (std::size_t i = 0; i < grid.n; ++i)
                out.values[i] = spec.amplitude * std::sin(w * grid.time(i) + spec.phase);
            break;
        }
    }
    return out;
}

ScalarSeries add_series(const ScalarSeries& a, const ScalarSeries& b) {
    if (!(a.grid == b.grid)) throw GridMismatchError("add_series: grids differ");
    ScalarSeries out;
    out.grid = a.grid;
    out.values.resize(a.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i)
        out.values[i] = a.values[i] + b.values[i];
    return out;
}

ScalarSeries add_dc(const ScalarSeries& u, double d) {
    ScalarSeries out;
    out.grid = u.grid;
    out.values.resize(u.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i) out.values[i] = u.values[i] + d;
    return out;
}

double snr_db(const ScalarSeries& signal, const ScalarSeries& noise) {
    if (!(signal.grid == noise.grid)) throw GridMismatchError("snr_db: grids differ");
    double ps = 0.0, pu = 0.0;
    for (std::size_t i = 0; i < signal.values.size(); ++i) {
        ps += signal.values[i] * signal.values[i];
        pu += noise.values[i] * noise.values[i];
    }
    if (pu == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ps / pu);
}

}  // namespace lir
