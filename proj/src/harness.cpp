#include "lir/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lir/lyapunov.hpp"
#include "lir/ode.hpp"

namespace lir {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void config_fail(const std::string& origin, std::size_t line,
                              const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw ConfigError(os.str());
}

double parse_double(const std::string& v, const std::string& origin, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) config_fail(origin, line, "trailing characters in number '" + v + "'");
        return x;
    } catch (const std::invalid_argument&) {
        config_fail(origin, line, "not a number: '" + v + "'");
    } catch (const std::out_of_range&) {
        config_fail(origin, line, "number out of range: '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& origin, std::size_t line) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) config_fail(origin, line, "trailing characters in integer '" + v + "'");
        return x;
    } catch (const std::exception&) {
        config_fail(origin, line, "not an unsigned integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& origin, std::size_t line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    config_fail(origin, line, "expected true/false: '" + v + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_fail(origin, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) config_fail(origin, lineno, "empty key");

        if (key == "model.sigma") cfg.model.sigma = parse_double(val, origin, lineno);
        else if (key == "model.r") cfg.model.r = parse_double(val, origin, lineno);
        else if (key == "model.b") cfg.model.b = parse_double(val, origin, lineno);
        else if (key == "model.coupling") {
            if (val == "standard") cfg.coupling = CouplingVariant::Standard;
            else if (val == "nonstandard") cfg.coupling = CouplingVariant::Nonstandard;
            else config_fail(origin, lineno, "model.coupling must be standard|nonstandard");
        } else if (key == "grid.t0") cfg.grid.t0 = parse_double(val, origin, lineno);
        else if (key == "grid.dt") {
            cfg.grid.dt = parse_double(val, origin, lineno);
            if (cfg.grid.dt <= 0.0) config_fail(origin, lineno, "grid.dt must be > 0");
        } else if (key == "grid.n") {
            cfg.grid.n = parse_u64(val, origin, lineno);
            if (cfg.grid.n < 1) config_fail(origin, lineno, "grid.n must be >= 1");
        } else if (key == "sim.warmup_steps") cfg.warmup_steps = parse_u64(val, origin, lineno);
        else if (key == "sim.ic_x1") cfg.initial_state.x1 = parse_double(val, origin, lineno);
        else if (key == "sim.ic_x2") cfg.initial_state.x2 = parse_double(val, origin, lineno);
        else if (key == "sim.ic_x3") cfg.initial_state.x3 = parse_double(val, origin, lineno);
        else if (key == "noise.kind") {
            if (val == "none") cfg.noise.kind = NoiseKind::None;
            else if (val == "uniform") cfg.noise.kind = NoiseKind::Uniform;
            else if (val == "sine") cfg.noise.kind = NoiseKind::Sine;
            else config_fail(origin, lineno,
                             "noise.kind must be none|uniform|sine (got '" + val + "')");
        } else if (key == "noise.amplitude") cfg.noise.amplitude = parse_double(val, origin, lineno);
        else if (key == "noise.frequency") cfg.noise.frequency = parse_double(val, origin, lineno);
        else if (key == "noise.phase") cfg.noise.phase = parse_double(val, origin, lineno);
        else if (key == "noise.seed") cfg.noise.seed = parse_u64(val, origin, lineno);
        else if (key == "noise.target_snr_db") {
            if (val == "none") cfg.target_snr_db = std::numeric_limits<double>::quiet_NaN();
            else cfg.target_snr_db = parse_double(val, origin, lineno);
        } else if (key == "denoise.k") cfg.denoise.k = parse_u64(val, origin, lineno);
        else if (key == "denoise.eta") cfg.denoise.eta = parse_double(val, origin, lineno);
        else if (key == "denoise.d") cfg.denoise.d = parse_double(val, origin, lineno);
        else if (key == "denoise.l0") cfg.denoise.L0 = parse_double(val, origin, lineno);
        else if (key == "denoise.dl") cfg.denoise.dL = parse_double(val, origin, lineno);
        else if (key == "denoise.l_min") cfg.denoise.L_min = parse_double(val, origin, lineno);
        else if (key == "denoise.passes") cfg.denoise.passes = parse_u64(val, origin, lineno);
        else if (key == "denoise.lambda") {
            if (val == "auto") cfg.lambda_auto = true;
            else {
                cfg.lambda_auto = false;
                cfg.denoise.lambda_max = parse_double(val, origin, lineno);
            }
        } else if (key == "denoise.tau_max") cfg.denoise.tau_max = parse_double(val, origin, lineno);
        else if (key == "denoise.resimulate")
            cfg.denoise.resimulate_response = parse_bool(val, origin, lineno);
        else if (key == "denoise.lookahead_extend")
            cfg.lookahead_extend = parse_bool(val, origin, lineno);
        else if (key == "output.dir") cfg.output_dir = val;
        else if (key == "output.emit_series") cfg.emit_series = parse_bool(val, origin, lineno);
        else config_fail(origin, lineno, "unknown key '" + key + "'");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "model.sigma = " << format_double(cfg.model.sigma) << "\n";
    os << "model.r = " << format_double(cfg.model.r) << "\n";
    os << "model.b = " << format_double(cfg.model.b) << "\n";
    os << "model.coupling = "
       << (cfg.coupling == CouplingVariant::Standard ? "standard" : "nonstandard") << "\n";
    os << "grid.t0 = " << format_double(cfg.grid.t0) << "\n";
    os << "grid.dt = " << format_double(cfg.grid.dt) << "\n";
    os << "grid.n = " << cfg.grid.n << "\n";
    os << "sim.warmup_steps = " << cfg.warmup_steps << "\n";
    os << "sim.ic_x1 = " << format_double(cfg.initial_state.x1) << "\n";
    os << "sim.ic_x2 = " << format_double(cfg.initial_state.x2) << "\n";
    os << "sim.ic_x3 = " << format_double(cfg.initial_state.x3) << "\n";
    const char* kind = cfg.noise.kind == NoiseKind::None
                           ? "none"
                           : cfg.noise.kind == NoiseKind::Uniform ? "uniform" : "sine";
    os << "noise.kind = " << kind << "\n";
    os << "noise.amplitude = " << format_double(cfg.noise.amplitude) << "\n";
    os << "noise.frequency = " << format_double(cfg.noise.frequency) << "\n";
    os << "noise.phase = " << format_double(cfg.noise.phase) << "\n";
    os << "noise.seed = " << cfg.noise.seed << "\n";
    os << "noise.target_snr_db = "
       << (std::isnan(cfg.target_snr_db) ? "none" : format_double(cfg.target_snr_db)) << "\n";
    os << "denoise.k = " << cfg.denoise.k << "\n";
    os << "denoise.eta = " << format_double(cfg.denoise.eta) << "\n";
    os << "denoise.d = " << format_double(cfg.denoise.d) << "\n";
    os << "denoise.l0 = " << format_double(cfg.denoise.L0) << "\n";
    os << "denoise.dl = " << format_double(cfg.denoise.dL) << "\n";
    os << "denoise.l_min = " << format_double(cfg.denoise.L_min) << "\n";
    os << "denoise.passes = " << cfg.denoise.passes << "\n";
    if (cfg.lambda_auto)
        os << "denoise.lambda = auto\n";
    else
        os << "denoise.lambda = " << format_double(cfg.denoise.lambda_max) << "\n";
    os << "denoise.tau_max = " << format_double(cfg.denoise.tau_max) << "\n";
    os << "denoise.resimulate = " << (cfg.denoise.resimulate_response ? "true" : "false") << "\n";
    os << "denoise.lookahead_extend = " << (cfg.lookahead_extend ? "true" : "false") << "\n";
    os << "output.dir = " << cfg.output_dir << "\n";
    os << "output.emit_series = " << (cfg.emit_series ? "true" : "false") << "\n";
    return os.str();
}

void write_config_file(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    out << serialize_config(cfg);
}

double StageReport::compute_gain(double initial_db, double final_db) {
    if (std::isinf(initial_db) && std::isinf(final_db)) return 0.0;
    return final_db - initial_db;
}

void write_series_csv(const ScalarSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "t,value\n";
    for (std::size_t i = 0; i < series.values.size(); ++i)
        out << format_double(series.grid.time(i)) << "," << format_double(series.values[i])
            << "\n";
}

void emit_phase_portrait(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "t,x1,x2,x3\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        out << format_double(traj.grid.time(i)) << "," << format_double(traj.states[i].x1) << ","
            << format_double(traj.states[i].x2) << "," << format_double(traj.states[i].x3)
            << "\n";
}

void emit_phase_portrait(const ScalarSeries& x1_override, const Trajectory& traj,
                         const std::string& path) {
    if (x1_override.values.size() != traj.states.size())
        throw GridMismatchError("emit_phase_portrait: series/trajectory length mismatch");
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "t,x1,x2,x3\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        out << format_double(traj.grid.time(i)) << "," << format_double(x1_override.values[i])
            << "," << format_double(traj.states[i].x2) << ","
            << format_double(traj.states[i].x3) << "\n";
}

void write_report_csv(const StageReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "key,value\n";
    out << "snr_initial_db," << format_double(report.snr_initial_db) << "\n";
    out << "snr_after_dc_db," << format_double(report.snr_after_dc_db) << "\n";
    for (std::size_t p = 0; p < report.snr_per_pass_db.size(); ++p)
        out << "snr_pass_" << (p + 1) << "_db," << format_double(report.snr_per_pass_db[p])
            << "\n";
    out << "gain_db," << format_double(report.gain_db) << "\n";
    out << "lambda_used," << format_double(report.lambda_used) << "\n";
    out << "reduced_total," << report.reduced_total << "\n";
    out << "small_total," << report.small_total << "\n";
    out << "unreached_total," << report.unreached_total << "\n";
    out << "no_lookahead_total," << report.no_lookahead_total << "\n";
    out << "mean_tau_last_pass," << format_double(report.mean_tau_last_pass) << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "level,d,L,stage1_db,stage2_db,stage3_db\n";
    for (const auto& r : rows)
        out << format_double(r.level) << "," << format_double(r.d) << "," << format_double(r.L)
            << "," << format_double(r.stage1_db) << "," << format_double(r.stage2_db) << ","
            << format_double(r.stage3_db) << "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.denoise.validate();
    const std::size_t W = cfg.warmup_steps;
    const std::size_t N = cfg.grid.n;
    const std::size_t X =
        (cfg.lookahead_extend && cfg.denoise.passes > 0)
            ? static_cast<std::size_t>(std::ceil(cfg.denoise.tau_max / cfg.grid.dt)) + 1
            : 0;

    TimeGrid full_grid{cfg.grid.t0 - static_cast<double>(W) * cfg.grid.dt, cfg.grid.dt,
                       W + N + X};
    const auto drive = drive_field(cfg.model, cfg.coupling);
    const Trajectory traj_full = integrate(drive, cfg.initial_state, full_grid);

    ScalarSeries s_full;
    s_full.grid = full_grid;
    s_full.values.resize(full_grid.n);
    for (std::size_t i = 0; i < full_grid.n; ++i) s_full.values[i] = traj_full.states[i].x1;

    ExperimentResult result;
    result.clean.grid = cfg.grid;
    result.clean.values.assign(s_full.values.begin() + static_cast<long>(W),
                               s_full.values.begin() + static_cast<long>(W + N));
    result.drive_window.grid = cfg.grid;
    result.drive_window.states.assign(traj_full.states.begin() + static_cast<long>(W),
                                      traj_full.states.begin() + static_cast<long>(W + N));

    // Interference: a unit-amplitude draw scaled either by the configured
    // amplitude or to hit the requested initial SNR on the window exactly.
    NoiseSpec unit = cfg.noise;
    unit.amplitude = cfg.noise.kind == NoiseKind::None ? 0.0 : 1.0;
    const ScalarSeries unit_noise = generate_noise(unit, full_grid);
    double amplitude = cfg.noise.amplitude;
    if (!std::isnan(cfg.target_snr_db) && cfg.noise.kind != NoiseKind::None) {
        double ps = 0.0, pu = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ps += result.clean.values[i] * result.clean.values[i];
            pu += unit_noise.values[W + i] * unit_noise.values[W + i];
        }
        if (pu == 0.0) throw ConfigError("target_snr_db: unit noise draw has zero power");
        amplitude = std::sqrt(ps / (pu * std::pow(10.0, cfg.target_snr_db / 10.0)));
    }
    result.noise_amplitude_used = amplitude;

    ScalarSeries noise_full;
    noise_full.grid = full_grid;
    noise_full.values.resize(full_grid.n);
    for (std::size_t i = 0; i < full_grid.n; ++i)
        noise_full.values[i] = amplitude * unit_noise.values[i];

    const ScalarSeries received_full = add_series(s_full, noise_full);

    result.noise.grid = cfg.grid;
    result.noise.values.assign(noise_full.values.begin() + static_cast<long>(W),
                               noise_full.values.begin() + static_cast<long>(W + N));
    result.received.grid = cfg.grid;
    result.received.values.assign(received_full.values.begin() + static_cast<long>(W),
                                  received_full.values.begin() + static_cast<long>(W + N));

    // Receiver warm-start: drive the response through the warmup so its
    // state at the window start is synchronized (to the noise floor).
    std::optional<State3> response_ic;
    if (W > 0) {
        ScalarSeries warm_drive;
        warm_drive.grid = TimeGrid{full_grid.t0, full_grid.dt, W + 1};
        warm_drive.values.assign(received_full.values.begin(),
                                 received_full.values.begin() + static_cast<long>(W + 1));
        const State3 crude{warm_drive.values[0], warm_drive.values[0],
                           std::max(cfg.model.r - 1.0, 1.0)};
        const Trajectory warm =
            integrate_driven(response_field(cfg.model, cfg.coupling), crude, warm_drive);
        response_ic = warm.states.back();
    }

    ScalarSeries record;
    record.grid = TimeGrid{cfg.grid.t0, cfg.grid.dt, N + X};
    record.values.assign(received_full.values.begin() + static_cast<long>(W),
                         received_full.values.end());

    DenoiseConfig dcfg = cfg.denoise;
    if (cfg.lambda_auto) {
        const ScalarSeries& window = result.received;
        EmbeddingSpec emb;
        emb.dimension = 3;
        emb.delay = autocorr_delay(window, DelayRule::AutocorrEFold);
        // The window is heavily oversampled, so one-step differences are
        // noise-dominated; neighbor separations must start above that ball.
        double diff2 = 0.0;
        for (std::size_t i = 0; i + 1 < N; ++i) {
            const double d = window.values[i + 1] - window.values[i];
            diff2 += d * d;
        }
        const double noise_scale = std::sqrt(diff2 / (2.0 * static_cast<double>(N - 1)));
        double lo = window.values[0], hi = window.values[0];
        for (double v : window.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        WolfParams wp;
        wp.evolve_steps = 400;
        wp.min_sep = std::max(1e-3 * (hi - lo), 2.6 * noise_scale);
        wp.max_sep = 0.3 * (hi - lo);
        wp.theiler_window = 300;
        const LyapunovEstimate est = lyapunov_wolf(window, emb, wp);
        if (est.lambda_max <= 0.0)
            throw Error("lambda auto-estimate came out non-positive; supply denoise.lambda");
        dcfg.lambda_max = est.lambda_max;
    }

    const DenoiseResult dres = denoise(record, N, dcfg, cfg.model, cfg.coupling, response_ic,
                                       &result.clean);
    result.cleaned = dres.cleaned;

    StageReport& rep = result.report;
    rep.snr_initial_db = snr_db(result.clean, result.noise);
    rep.snr_after_dc_db = snr_db(result.clean, add_dc(result.noise, dcfg.d));
    rep.snr_per_pass_db = dres.diagnostics.snr_per_pass_db;
    rep.lambda_used = dres.diagnostics.lambda_used;
    for (const auto& p : dres.diagnostics.per_pass) {
        rep.reduced_total += p.reduced;
        rep.small_total += p.small;
        rep.unreached_total += p.unreached;
        rep.no_lookahead_total += p.no_lookahead;
    }
    if (!dres.diagnostics.per_pass.empty())
        rep.mean_tau_last_pass = dres.diagnostics.per_pass.back().mean_tau;
    const double final_snr =
        rep.snr_per_pass_db.empty() ? rep.snr_initial_db : rep.snr_per_pass_db.back();
    rep.gain_db = StageReport::compute_gain(rep.snr_initial_db, final_snr);

    std::filesystem::create_directories(cfg.output_dir);
    write_report_csv(rep, cfg.output_dir + "/report.csv");
    if (cfg.emit_series) {
        write_series_csv(result.clean, cfg.output_dir + "/clean.csv");
        write_series_csv(result.noise, cfg.output_dir + "/noise.csv");
        write_series_csv(result.received, cfg.output_dir + "/received.csv");
        write_series_csv(result.cleaned, cfg.output_dir + "/cleaned.csv");
        emit_phase_portrait(result.drive_window, cfg.output_dir + "/portrait_clean.csv");
        emit_phase_portrait(result.received, result.drive_window,
                            cfg.output_dir + "/portrait_received.csv");
        emit_phase_portrait(result.cleaned, result.drive_window,
                            cfg.output_dir + "/portrait_cleaned.csv");
    }
    return result;
}

std::vector<SweepRow> sweep_noise_levels(const std::vector<double>& levels,
                                         const ExperimentConfig& cfg) {
    std::vector<SweepRow> rows;
    rows.reserve(levels.size());
    for (double level : levels) {
        ExperimentConfig c = cfg;
        if (c.noise.kind == NoiseKind::None) c.noise.kind = NoiseKind::Uniform;
        c.noise.amplitude = level;
        c.target_snr_db = std::numeric_limits<double>::quiet_NaN();
        c.denoise.d = level;
        c.denoise.L0 = 3.0 * level;
        c.denoise.dL = c.denoise.L0 / 6.0;
        c.emit_series = false;
        c.output_dir = cfg.output_dir + "/level_" + format_double(level);
        const ExperimentResult res = run_experiment(c);
        SweepRow row;
        row.level = level;
        row.d = c.denoise.d;
        row.L = c.denoise.L0;
        row.stage1_db = res.report.snr_initial_db;
        row.stage2_db = res.report.snr_after_dc_db;
        row.stage3_db = res.report.snr_per_pass_db.empty() ? res.report.snr_initial_db
                                                           : res.report.snr_per_pass_db.back();
        rows.push_back(row);
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_sweep_csv(rows, cfg.output_dir + "/sweep.csv");
    return rows;
}

}  // namespace lir
