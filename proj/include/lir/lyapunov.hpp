#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "lir/ode.hpp"
#include "lir/rng.hpp"
#include "lir/types.hpp"

namespace lir {

struct LyapunovEstimate {
    double lambda_max = 0.0;      // 1/time units of the grid
    std::size_t n_segments = 0;   // renormalizations or replacements accumulated
    double ci_halfwidth = 0.0;    // ~95% normal CI half-width of per-segment rates
    std::size_t n_skips = 0;      // segments dropped (no admissible neighbor / collapse)
};

struct EmbeddingSpec {
    std::size_t dimension = 3;
    std::size_t delay = 1;  // samples
};

enum class DelayRule { AutocorrZero, AutocorrEFold };

/// Delay at the first crossing of the autocorrelation below `threshold`
/// (0 for the zero-crossing rule, 1/e for the e-fold rule).
std::size_t autocorr_delay(const ScalarSeries& series, DelayRule rule);

struct WolfParams {
    std::size_t evolve_steps = 400;
    double min_sep = 0.0;             // 0 -> 0.1% of series extent
    double max_sep = 0.0;             // 0 -> 5% of series extent
    std::size_t theiler_window = 0;   // 0 -> (dimension-1)*delay
};

/// Largest Lyapunov exponent from a scalar series by delay embedding and
/// neighbor tracking: evolve a fiducial/neighbor pair for evolve_steps,
/// accumulate ln(d'/d), then replace the neighbor with one minimizing
/// orientation change within [min_sep, max_sep]. If none exists the bound is
/// widened once; if still none the next segment is skipped (counted) and the
/// pair restarts from the plain nearest neighbor.
LyapunovEstimate lyapunov_wolf(const ScalarSeries& series, const EmbeddingSpec& emb,
                               const WolfParams& params = {});

namespace detail {
LyapunovEstimate finish_estimate(const std::vector<double>& segment_rates,
                                 double lambda, std::size_t n_skips);
}

/// Model-based oracle: two-trajectory renormalization. Evolves a fiducial
/// and a perturbed copy, accumulating ln(d/delta0) every renorm_every steps
/// and rescaling the separation back to delta0 along its current direction.
/// A transient of `transient_steps` is discarded before accumulation starts.
template <VectorField F>
LyapunovEstimate lyapunov_benettin(F&& field, const State3& s0, double dt, double t_total,
                                   std::size_t renorm_every = 10, double delta0 = 1e-8,
                                   std::size_t transient_steps = 10000) {
    State3 fid = s0;
    double t = 0.0;
    for (std::size_t i = 0; i < transient_steps; ++i) {
        fid = rk4_step(field, fid, t, dt);
        t += dt;
    }
    Xoshiro256pp reseed_rng(0x5eed);
    State3 pert = fid + State3{delta0, 0.0, 0.0};
    const auto n_steps = static_cast<std::size_t>(t_total / dt);
    const std::size_t n_seg = n_steps / renorm_every;
    std::vector<double> rates;
    rates.reserve(n_seg);
    double sum_log = 0.0;
    std::size_t n_skips = 0;
    const double seg_time = static_cast<double>(renorm_every) * dt;
    for (std::size_t seg = 0; seg < n_seg; ++seg) {
        for (std::size_t i = 0; i < renorm_every; ++i) {
            fid = rk4_step(field, fid, t, dt);
            pert = rk4_step(field, pert, t, dt);
            t += dt;
        }
        const State3 diff = pert - fid;
        const double d = norm(diff);
        if (d == 0.0) {
            // degenerate direction: reseed the perturbation and drop the segment
            ++n_skips;
            State3 dir{reseed_rng.next_symmetric(1.0), reseed_rng.next_symmetric(1.0),
                       reseed_rng.next_symmetric(1.0)};
            const double dn = norm(dir);
            pert = fid + (delta0 / (dn > 0.0 ? dn : 1.0)) * dir;
            continue;
        }
        const double lg = std::log(d / delta0);
        sum_log += lg;
        rates.push_back(lg / seg_time);
        pert = fid + (delta0 / d) * diff;
    }
    const double accum_time = static_cast<double>(rates.size()) * seg_time;
    const double lambda = accum_time > 0.0 ? sum_log / accum_time : 0.0;
    return detail::finish_estimate(rates, lambda, n_skips);
}

}  // namespace lir
