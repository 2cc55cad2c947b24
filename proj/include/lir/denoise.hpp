#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lir/models.hpp"
#include "lir/types.hpp"

namespace lir {

/// All knobs of the interference-removal procedure.
struct DenoiseConfig {
    std::size_t k = 20;         // section length, samples
    double eta = 1.0;           // safety margin added to the escape time
    double d = 2.0;             // DC offset fixing the deviation signs
    double L0 = 6.0;            // fixed length for the first pass
    double dL = 1.0;            // per-pass decrement of L
    double L_min = 1.0;         // floor for L
    std::size_t passes = 5;
    double lambda_max = 1.40;   // per unit time
    double tau_max = 12.0 / 1.40;  // escape-time cap
    bool resimulate_response = true;

    void validate() const;
};

/// Outcome of evolving one seeded deviation to the fixed length L.
struct EscapeMeasurement {
    double tau = 0.0;
    bool reached = false;
    double final_separation = 0.0;
};

/// What happened to each sample during one pass.
enum class PointAction : std::uint8_t { Small, Reduced, Unreached, NoLookahead };

struct PassDiagnostics {
    std::vector<PointAction> actions;
    std::size_t reduced = 0;
    std::size_t small = 0;
    std::size_t unreached = 0;
    std::size_t no_lookahead = 0;
    double mean_tau = 0.0;  // over reached points
};

struct DenoiseDiagnostics {
    std::vector<PassDiagnostics> per_pass;
    std::vector<double> snr_per_pass_db;  // filled when a clean reference is supplied
    double lambda_used = 0.0;
};

/// Consecutive disjoint ranges of length k covering [0, n); a final short
/// remainder is kept as its own section.
std::vector<std::pair<std::size_t, std::size_t>> partition_sections(std::size_t n,
                                                                    std::size_t k);

/// Per section with mean w: mask[j] = values[j] >= w ("large", reduce this
/// pass). Constant sections are forced all-false.
std::vector<std::uint8_t> classify_large(
    const ScalarSeries& series,
    const std::vector<std::pair<std::size_t, std::size_t>>& ranges);

/// The received scalar replaces the first coordinate of the synchronized
/// response state; the deviation from the true trajectory is then exactly
/// the interference on that sample.
inline State3 seed_auxiliary(double received_sample, const State3& response_state) {
    return {received_sample, response_state.x2, response_state.x3};
}

/// Integrates the auxiliary copy from aux_start alongside the stored
/// reference trajectory; tau is the first grid time with Euclidean
/// separation >= L. Throws NotEnoughDataError if the reference does not
/// extend ceil(tau_max/dt) samples past start_index.
EscapeMeasurement measure_escape_time(const State3& aux_start, const Trajectory& reference,
                                      std::size_t start_index, double L, double tau_max,
                                      const LorenzParams& params);

/// L * exp(-lambda_max * (tau + eta)); equals L iff tau + eta = 0.
inline double estimate_deviation(double L, double lambda_max, double tau, double eta) {
    return L * std::exp(-lambda_max * (tau + eta));
}

inline double signed_estimate(double L, double lambda_max, double tau, double eta, int sign) {
    return static_cast<double>(sign) * estimate_deviation(L, lambda_max, tau, eta);
}

/// One reduction pass over the working (DC-shifted) series. Samples flagged
/// large get a seeded escape measurement and the signed estimate subtracted;
/// small, unreached, and lookahead-starved samples pass through bit-identical.
/// The response trajectory may extend past the series (lookahead tail).
/// Escape measurements run data-parallel (OpenMP); the serial variant is the
/// reference implementation and produces bit-identical output.
std::pair<ScalarSeries, PassDiagnostics> denoise_pass(const ScalarSeries& working,
                                                      const Trajectory& response,
                                                      const DenoiseConfig& cfg,
                                                      double L_current,
                                                      const LorenzParams& params);

std::pair<ScalarSeries, PassDiagnostics> denoise_pass_serial(const ScalarSeries& working,
                                                             const Trajectory& response,
                                                             const DenoiseConfig& cfg,
                                                             double L_current,
                                                             const LorenzParams& params);

struct DenoiseResult {
    ScalarSeries cleaned;
    DenoiseDiagnostics diagnostics;
};

/// Full procedure on a received record. The leading `window` samples are
/// cleaned and returned; any samples beyond the window are lookahead the
/// reference response can evolve into (a receiver that keeps running).
/// Passes: shift the window by +d, simulate the response driven by the
/// current cleaned (unshifted) record, reduce large samples, repeat with L
/// decreasing by dL (floored at L_min). The deviation consumed by the
/// reduction is v = u + d as a whole. passes = 0 returns the window
/// unchanged. `clean_reference`, when given, fills per-pass SNR bookkeeping.
DenoiseResult denoise(const ScalarSeries& received, std::size_t window,
                      const DenoiseConfig& cfg, const LorenzParams& params,
                      CouplingVariant variant = CouplingVariant::Standard,
                      const std::optional<State3>& response_ic = std::nullopt,
                      const ScalarSeries* clean_reference = nullptr);

}  // namespace lir
