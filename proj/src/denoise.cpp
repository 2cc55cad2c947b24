#include "lir/denoise.hpp"

#include <cmath>
#include <sstream>

#include "lir/interference.hpp"
#include "lir/ode.hpp"

namespace lir {

void DenoiseConfig::validate() const {
    if (k < 2) throw ConfigError("denoise: section length k must be >= 2");
    if (L0 <= 0.0) throw ConfigError("denoise: L0 must be > 0");
    if (L_min <= 0.0) throw ConfigError("denoise: L_min must be > 0");
    if (lambda_max <= 0.0) throw ConfigError("denoise: lambda_max must be > 0");
    if (eta < 0.0) throw ConfigError("denoise: eta must be >= 0");
    if (tau_max <= 0.0) throw ConfigError("denoise: tau_max must be > 0");
    if (dL < 0.0) throw ConfigError("denoise: dL must be >= 0");
}

std::vector<std::pair<std::size_t, std::size_t>> partition_sections(std::size_t n,
                                                                    std::size_t k) {
    if (k < 2) throw ConfigError("partition_sections: k must be >= 2");
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    ranges.reserve(n / k + 1);
    for (std::size_t a = 0; a < n; a += k) ranges.emplace_back(a, std::min(a + k, n));
    return ranges;
}

std::vector<std::uint8_t> classify_large(
    const ScalarSeries& series, const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
    std::vector<std::uint8_t> mask(series.values.size(), 0);
    for (const auto& [a, b] : ranges) {
        double lo = series.values[a], hi = series.values[a], sum = 0.0;
        for (std::size_t j = a; j < b; ++j) {
            const double v = series.values[j];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        if (hi == lo) continue;  // constant section: the mean rule is vacuous
        const double mean = sum / static_cast<double>(b - a);
        for (std::size_t j = a; j < b; ++j) mask[j] = series.values[j] >= mean ? 1 : 0;
    }
    return mask;
}

EscapeMeasurement measure_escape_time(const State3& aux_start, const Trajectory& reference,
                                      std::size_t start_index, double L, double tau_max,
                                      const LorenzParams& params) {
    const double dt = reference.grid.dt;
    const auto m_max = static_cast<std::size_t>(std::ceil(tau_max / dt));
    if (start_index + m_max >= reference.states.size()) {
        std::ostringstream msg;
        msg << "measure_escape_time: reference too short for lookahead at index "
            << start_index << " (need " << m_max << " samples ahead, have "
            << (reference.states.size() - 1 - start_index) << ")";
        throw NotEnoughDataError(msg.str());
    }
    const LorenzField aux = auxiliary_field(params);
    EscapeMeasurement out;
    State3 z = aux_start;
    double sep = norm(z - reference.states[start_index]);
    if (sep >= L) {
        out.tau = 0.0;
        out.reached = true;
        out.final_separation = sep;
        return out;
    }
    double t = reference.grid.time(start_index);
    for (std::size_t m = 1; m <= m_max; ++m) {
        z = rk4_step(aux, z, t, dt);
        t += dt;
        sep = norm(z - reference.states[start_index + m]);
        if (sep >= L) {
            out.tau = static_cast<double>(m) * dt;
            out.reached = true;
            out.final_separation = sep;
            return out;
        }
    }
    out.tau = static_cast<double>(m_max) * dt;
    out.reached = false;
    out.final_separation = sep;
    return out;
}

namespace {

std::pair<ScalarSeries, PassDiagnostics> run_pass(const ScalarSeries& working,
                                                  const Trajectory& response,
                                                  const DenoiseConfig& cfg, double L_current,
                                                  const LorenzParams& params, bool parallel) {
    cfg.validate();
    const std::size_t n = working.values.size();
    ScalarSeries out = working;
    PassDiagnostics diag;
    diag.actions.assign(n, PointAction::Small);

    const auto ranges = partition_sections(n, cfg.k);
    const auto mask = classify_large(working, ranges);
    const int sign = sign_of(cfg.d);

    std::vector<std::size_t> flagged;
    flagged.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (mask[i]) flagged.push_back(i);

    const auto m_max = static_cast<std::size_t>(std::ceil(cfg.tau_max / response.grid.dt));
    std::vector<double> taus(flagged.size(), 0.0);
    std::vector<std::uint8_t> outcome(flagged.size(), 0);  // 0 unreached, 1 reached, 2 no lookahead

    // Independent per-point measurements; parallel and serial orders produce
    // bit-identical results because no state is shared across points.
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (long long fi = 0; fi < static_cast<long long>(flagged.size()); ++fi) {
        const std::size_t i = flagged[static_cast<std::size_t>(fi)];
        if (i + m_max >= response.states.size()) {
            outcome[static_cast<std::size_t>(fi)] = 2;
            continue;
        }
        const State3 seed = seed_auxiliary(working.values[i], response.states[i]);
        const EscapeMeasurement em =
            measure_escape_time(seed, response, i, L_current, cfg.tau_max, params);
        if (em.reached) {
            outcome[static_cast<std::size_t>(fi)] = 1;
            taus[static_cast<std::size_t>(fi)] = em.tau;
        }
    }

    double tau_sum = 0.0;
    for (std::size_t fi = 0; fi < flagged.size(); ++fi) {
        const std::size_t i = flagged[fi];
        switch (outcome[fi]) {
            case 1:
                out.values[i] -= signed_estimate(L_current, cfg.lambda_max, taus[fi], cfg.eta, sign);
                diag.actions[i] = PointAction::Reduced;
                ++diag.reduced;
                tau_sum += taus[fi];
                break;
            case 2:
                diag.actions[i] = PointAction::NoLookahead;
                ++diag.no_lookahead;
                break;
            default:
                diag.actions[i] = PointAction::Unreached;
                ++diag.unreached;
                break;
        }
    }
    diag.small = n - flagged.size();
    diag.mean_tau = diag.reduced > 0 ? tau_sum / static_cast<double>(diag.reduced) : 0.0;
    return {std::move(out), std::move(diag)};
}

}  // namespace

std::pair<ScalarSeries, PassDiagnostics> denoise_pass(const ScalarSeries& working,
                                                      const Trajectory& response,
                                                      const DenoiseConfig& cfg, double L_current,
                                                      const LorenzParams& params) {
    return run_pass(working, response, cfg, L_current, params, true);
}

std::pair<ScalarSeries, PassDiagnostics> denoise_pass_serial(const ScalarSeries& working,
                                                             const Trajectory& response,
                                                             const DenoiseConfig& cfg,
                                                             double L_current,
                                                             const LorenzParams& params) {
    return run_pass(working, response, cfg, L_current, params, false);
}

DenoiseResult denoise(const ScalarSeries& received, std::size_t window,
                      const DenoiseConfig& cfg, const LorenzParams& params,
                      CouplingVariant variant, const std::optional<State3>& response_ic,
                      const ScalarSeries* clean_reference) {
    cfg.validate();
    if (window == 0 || window > received.values.size())
        throw ConfigError("denoise: window must be in [1, received length]");
    if (clean_reference && clean_reference->values.size() < window)
        throw ConfigError("denoise: clean reference shorter than the window");

    DenoiseResult result;
    result.diagnostics.lambda_used = cfg.lambda_max;
    result.cleaned.grid = received.grid;
    result.cleaned.grid.n = window;
    result.cleaned.values.assign(received.values.begin(),
                                 received.values.begin() + static_cast<long>(window));
    if (cfg.passes == 0) return result;

    // Working copy: the window shifted by +d so every deviation shares one
    // sign. The reduction consumes the shifted deviation v = u + d whole.
    std::vector<double> work(result.cleaned.values);
    for (auto& v : work) v += cfg.d;

    const State3 ic = response_ic.value_or(
        State3{received.values[0], received.values[0], std::max(params.r - 1.0, 1.0)});

    ScalarSeries drive;
    drive.grid = received.grid;
    Trajectory response;
    const auto resp = response_field(params, variant);

    for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
        const double L = std::max(cfg.L0 - static_cast<double>(pass) * cfg.dL, cfg.L_min);
        if (pass == 0 || cfg.resimulate_response) {
            // the receiver is driven by the unshifted record: the cleaned
            // window followed by the raw lookahead tail
            drive.values.assign(received.values.begin(), received.values.end());
            for (std::size_t i = 0; i < window; ++i) drive.values[i] = work[i] - cfg.d;
            response = integrate_driven(resp, ic, drive);
        }
        ScalarSeries shifted;
        shifted.grid = result.cleaned.grid;
        shifted.values = work;
        auto [cleaned_pass, diag] = denoise_pass(shifted, response, cfg, L, params);
        work = cleaned_pass.values;
        if (clean_reference) {
            ScalarSeries resid, clean_win;
            resid.grid = clean_win.grid = result.cleaned.grid;
            resid.values.resize(window);
            clean_win.values.assign(clean_reference->values.begin(),
                                    clean_reference->values.begin() + static_cast<long>(window));
            for (std::size_t i = 0; i < window; ++i)
                resid.values[i] = work[i] - clean_win.values[i];
            result.diagnostics.snr_per_pass_db.push_back(snr_db(clean_win, resid));
        }
        result.diagnostics.per_pass.push_back(std::move(diag));
    }
    result.cleaned.values = std::move(work);
    return result;
}

}  // namespace lir
