#include "lir/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lir {

std::size_t autocorr_delay(const ScalarSeries& series, DelayRule rule) {
    const auto& x = series.values;
    const std::size_t n = x.size();
    if (n < 4) throw ConfigError("autocorr_delay: series too short");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double v : x) denom += (v - mean) * (v - mean);
    if (denom == 0.0) return 1;
    const double threshold = rule == DelayRule::AutocorrZero ? 0.0 : 1.0 / M_E;
    for (std::size_t lag = 1; lag < n / 2; ++lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) c += (x[i] - mean) * (x[i + lag] - mean);
        if (c / denom <= threshold) return lag;
    }
    return std::max<std::size_t>(1, n / 10);
}

namespace detail {

LyapunovEstimate finish_estimate(const std::vector<double>& segment_rates, double lambda,
                                 std::size_t n_skips) {
    LyapunovEstimate est;
    est.lambda_max = lambda;
    est.n_segments = segment_rates.size();
    est.n_skips = n_skips;
    if (segment_rates.size() > 1) {
        double mean = 0.0;
        for (double r : segment_rates) mean += r;
        mean /= static_cast<double>(segment_rates.size());
        double var = 0.0;
        for (double r : segment_rates) var += (r - mean) * (r - mean);
        var /= static_cast<double>(segment_rates.size() - 1);
        est.ci_halfwidth = 1.96 * std::sqrt(var / static_cast<double>(segment_rates.size()));
    }
    return est;
}

}  // namespace detail

namespace {

// Delay-embedded view of a scalar series.
struct Embedding {
    const double* x;
    std::size_t m;
    std::size_t delay;
    std::size_t count;

    double dist(std::size_t i, std::size_t j) const {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = x[i + k * delay] - x[j + k * delay];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Nearest point to `i` with distance in [lo, hi], outside the Theiler window,
// with room to evolve. Deterministic regardless of thread count: ties break
// toward the lower index.
std::size_t nearest_in_annulus(const Embedding& emb, std::size_t i, double lo, double hi,
                               std::size_t theiler, std::size_t evolve) {
    const std::size_t limit = emb.count > evolve ? emb.count - evolve : 0;
    double best_d = std::numeric_limits<double>::infinity();
    std::size_t best_j = kNone;
#ifdef _OPENMP
#pragma omp parallel
    {
        double loc_d = std::numeric_limits<double>::infinity();
        std::size_t loc_j = kNone;
#pragma omp for nowait
        for (long long jj = 0; jj < static_cast<long long>(limit); ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            const std::size_t sep = j > i ? j - i : i - j;
            if (sep <= theiler) continue;
            const double d = emb.dist(i, j);
            if (d < lo || d > hi) continue;
            if (d < loc_d || (d == loc_d && j < loc_j)) {
                loc_d = d;
                loc_j = j;
            }
        }
#pragma omp critical
        {
            if (loc_d < best_d || (loc_d == best_d && loc_j < best_j)) {
                best_d = loc_d;
                best_j = loc_j;
            }
        }
    }
#else
    for (std::size_t j = 0; j < limit; ++j) {
        const std::size_t sep = j > i ? j - i : i - j;
        if (sep <= theiler) continue;
        const double d = emb.dist(i, j);
        if (d < lo || d > hi) continue;
        if (d < best_d) {
            best_d = d;
            best_j = j;
        }
    }
#endif
    return best_j;
}

// Candidate in [lo, hi] minimizing the orientation change relative to
// `dir` (a vector rooted at point i). Deterministic as above.
std::size_t best_oriented(const Embedding& emb, std::size_t i, const std::vector<double>& dir,
                          double lo, double hi, std::size_t theiler, std::size_t evolve) {
    const std::size_t limit = emb.count > evolve ? emb.count - evolve : 0;
    double best_c = -2.0;
    std::size_t best_j = kNone;
#ifdef _OPENMP
#pragma omp parallel
    {
        double loc_c = -2.0;
        std::size_t loc_j = kNone;
#pragma omp for nowait
        for (long long jj = 0; jj < static_cast<long long>(limit); ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            const std::size_t sep = j > i ? j - i : i - j;
            if (sep <= theiler) continue;
            const double d = emb.dist(i, j);
            if (d < lo || d > hi || d == 0.0) continue;
            double dot = 0.0;
            for (std::size_t k = 0; k < emb.m; ++k)
                dot += (emb.x[j + k * emb.delay] - emb.x[i + k * emb.delay]) * dir[k];
            const double c = dot / d;
            if (c > loc_c || (c == loc_c && j < loc_j)) {
                loc_c = c;
                loc_j = j;
            }
        }
#pragma omp critical
        {
            if (loc_c > best_c || (loc_c == best_c && loc_j < best_j)) {
                best_c = loc_c;
                best_j = loc_j;
            }
        }
    }
#else
    for (std::size_t j = 0; j < limit; ++j) {
        const std::size_t sep = j > i ? j - i : i - j;
        if (sep <= theiler) continue;
        const double d = emb.dist(i, j);
        if (d < lo || d > hi || d == 0.0) continue;
        double dot = 0.0;
        for (std::size_t k = 0; k < emb.m; ++k)
            dot += (emb.x[j + k * emb.delay] - emb.x[i + k * emb.delay]) * dir[k];
        const double c = dot / d;
        if (c > best_c) {
            best_c = c;
            best_j = j;
        }
    }
#endif
    return best_j;
}

}  // namespace

LyapunovEstimate lyapunov_wolf(const ScalarSeries& series, const EmbeddingSpec& emb_spec,
                               const WolfParams& params) {
    const std::size_t n = series.values.size();
    if (emb_spec.dimension < 1 || emb_spec.delay < 1)
        throw ConfigError("lyapunov_wolf: dimension and delay must be >= 1");
    if ((emb_spec.dimension - 1) * emb_spec.delay >= n)
        throw ConfigError("lyapunov_wolf: series too short for the embedding");

    Embedding emb;
    emb.x = series.values.data();
    emb.m = emb_spec.dimension;
    emb.delay = emb_spec.delay;
    emb.count = n - (emb_spec.dimension - 1) * emb_spec.delay;

    double lo_v = series.values[0], hi_v = series.values[0];
    for (double v : series.values) {
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
    }
    const double extent = hi_v - lo_v;
    const double min_sep = params.min_sep > 0.0 ? params.min_sep : 1e-3 * extent;
    const double max_sep = params.max_sep > 0.0 ? params.max_sep : 0.05 * extent;
    if (min_sep >= max_sep) throw ConfigError("lyapunov_wolf: min_sep must be < max_sep");
    const std::size_t theiler = params.theiler_window > 0
                                    ? params.theiler_window
                                    : (emb_spec.dimension - 1) * emb_spec.delay;
    const std::size_t evolve = params.evolve_steps;
    if (evolve == 0) throw ConfigError("lyapunov_wolf: evolve_steps must be > 0");

    const double dt = series.grid.dt;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> rates;
    std::size_t n_skips = 0;
    double sum_log = 0.0;

    std::size_t i = 0;
    std::size_t j = nearest_in_annulus(emb, i, min_sep, inf, theiler, evolve);
    while (j != kNone && i + evolve < emb.count) {
        const double d0 = emb.dist(i, j);
        const std::size_t i2 = i + evolve;
        const std::size_t j2 = j + evolve;
        const double d1 = emb.dist(i2, j2);
        if (d0 > 0.0 && d1 > 0.0) {
            const double lg = std::log(d1 / d0);
            sum_log += lg;
            rates.push_back(lg / (static_cast<double>(evolve) * dt));
        }
        i = i2;
        if (i + evolve >= emb.count) break;

        std::vector<double> dir(emb.m);
        for (std::size_t k = 0; k < emb.m; ++k)
            dir[k] = emb.x[j2 + k * emb.delay] - emb.x[i + k * emb.delay];
        std::size_t jn = best_oriented(emb, i, dir, min_sep, max_sep, theiler, evolve);
        if (jn == kNone)
            jn = best_oriented(emb, i, dir, min_sep, 2.0 * max_sep, theiler, evolve);
        if (jn == kNone) {
            // no admissible neighbor even after widening: skip a segment and restart
            ++n_skips;
            i += evolve;
            if (i + evolve >= emb.count) break;
            jn = nearest_in_annulus(emb, i, min_sep, inf, theiler, evolve);
        }
        j = jn;
    }

    const double total_time = static_cast<double>(rates.size() * evolve) * dt;
    const double lambda = total_time > 0.0 ? sum_log / total_time : 0.0;
    return detail::finish_estimate(rates, lambda, n_skips);
}

}  // namespace lir
