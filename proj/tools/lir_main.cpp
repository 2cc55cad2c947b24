// lir: interference removal for synchronized chaotic signals.
//
// Verbs: simulate (drive only), denoise (full pipeline), lyapunov
// (exponent estimators), sweep (noise-level table). Exit codes: 0 success,
// 1 configuration error, 2 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lir/harness.hpp"
#include "lir/lyapunov.hpp"
#include "lir/ode.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> passes;
    std::optional<std::string> noise_kind;
    std::optional<double> noise_amplitude;
    bool emit_series = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "config file (key = value lines)");
    cmd->add_option("--seed", o.seed, "override noise.seed");
    cmd->add_option("--out-dir", o.out_dir, "override output.dir");
    cmd->add_option("--passes", o.passes, "override denoise.passes");
    cmd->add_option("--noise-kind", o.noise_kind, "override noise.kind (none|uniform|sine)");
    cmd->add_option("--noise-amplitude", o.noise_amplitude, "override noise.amplitude");
    cmd->add_flag("--emit-series", o.emit_series, "write series and portrait CSVs");
}

lir::ExperimentConfig load_config(const CommonOpts& o) {
    lir::ExperimentConfig cfg;
    if (!o.config_path.empty()) cfg = lir::parse_config_file(o.config_path);
    if (o.seed) cfg.noise.seed = *o.seed;
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.passes) cfg.denoise.passes = *o.passes;
    if (o.noise_kind) {
        if (*o.noise_kind == "none") cfg.noise.kind = lir::NoiseKind::None;
        else if (*o.noise_kind == "uniform") cfg.noise.kind = lir::NoiseKind::Uniform;
        else if (*o.noise_kind == "sine") cfg.noise.kind = lir::NoiseKind::Sine;
        else throw lir::ConfigError("--noise-kind must be none|uniform|sine");
    }
    if (o.noise_amplitude) {
        cfg.noise.amplitude = *o.noise_amplitude;
        cfg.target_snr_db = std::numeric_limits<double>::quiet_NaN();
    }
    if (o.emit_series) cfg.emit_series = true;
    return cfg;
}

void print_report(const lir::StageReport& rep) {
    std::printf("snr_initial_db   %.3f\n", rep.snr_initial_db);
    std::printf("snr_after_dc_db  %.3f\n", rep.snr_after_dc_db);
    for (std::size_t p = 0; p < rep.snr_per_pass_db.size(); ++p)
        std::printf("snr_pass_%zu_db    %.3f\n", p + 1, rep.snr_per_pass_db[p]);
    std::printf("gain_db          %+.3f\n", rep.gain_db);
    std::printf("lambda_used      %.4f\n", rep.lambda_used);
    std::printf("reduced/small/unreached/no_lookahead  %zu/%zu/%zu/%zu\n", rep.reduced_total,
                rep.small_total, rep.unreached_total, rep.no_lookahead_total);
}

int cmd_simulate(const CommonOpts& o) {
    lir::ExperimentConfig cfg = load_config(o);
    const std::size_t W = cfg.warmup_steps;
    lir::TimeGrid full{cfg.grid.t0 - static_cast<double>(W) * cfg.grid.dt, cfg.grid.dt,
                       W + cfg.grid.n};
    const auto traj = lir::integrate(lir::drive_field(cfg.model, cfg.coupling),
                                     cfg.initial_state, full);
    lir::Trajectory window;
    window.grid = cfg.grid;
    window.states.assign(traj.states.begin() + static_cast<long>(W), traj.states.end());
    lir::ScalarSeries x1;
    x1.grid = cfg.grid;
    x1.values.resize(cfg.grid.n);
    for (std::size_t i = 0; i < cfg.grid.n; ++i) x1.values[i] = window.states[i].x1;

    std::filesystem::create_directories(cfg.output_dir);
    lir::write_series_csv(x1, cfg.output_dir + "/clean.csv");
    lir::emit_phase_portrait(window, cfg.output_dir + "/portrait_clean.csv");
    std::printf("simulated %zu samples (dt = %g) after %zu warmup steps -> %s\n", cfg.grid.n,
                cfg.grid.dt, W, cfg.output_dir.c_str());
    return 0;
}

int cmd_denoise(const CommonOpts& o) {
    lir::ExperimentConfig cfg = load_config(o);
    const lir::ExperimentResult res = lir::run_experiment(cfg);
    std::printf("noise amplitude used: %.6g\n", res.noise_amplitude_used);
    print_report(res.report);
    std::printf("report -> %s/report.csv\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<double>& levels) {
    lir::ExperimentConfig cfg = load_config(o);
    const auto rows = lir::sweep_noise_levels(levels, cfg);
    std::printf("%8s %8s %8s %10s %10s %10s\n", "level", "d", "L", "stage1", "stage2", "stage3");
    for (const auto& r : rows)
        std::printf("%8.3f %8.3f %8.3f %10.3f %10.3f %10.3f\n", r.level, r.d, r.L, r.stage1_db,
                    r.stage2_db, r.stage3_db);
    std::printf("table -> %s/sweep.csv\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_lyapunov(const CommonOpts& o, const std::string& method, const std::string& series_sel,
                 double t_total, std::size_t emb_dim, std::size_t emb_delay,
                 const std::string& delay_rule, std::size_t evolve, double min_sep,
                 double max_sep, std::size_t theiler) {
    lir::ExperimentConfig cfg = load_config(o);
    if (method == "benettin" || method == "both") {
        const auto est = lir::lyapunov_benettin(lir::drive_field(cfg.model, cfg.coupling),
                                                cfg.initial_state, cfg.grid.dt, t_total);
        std::printf("benettin: lambda_max = %.6f  (segments %zu, ci ±%.4f, reseeds %zu)\n",
                    est.lambda_max, est.n_segments, est.ci_halfwidth, est.n_skips);
    }
    if (method == "wolf" || method == "both") {
        lir::ExperimentConfig sim_cfg = cfg;
        sim_cfg.emit_series = false;
        sim_cfg.denoise.passes = 0;
        const lir::ExperimentResult res = lir::run_experiment(sim_cfg);
        const lir::ScalarSeries& series = series_sel == "received" ? res.received : res.clean;
        lir::EmbeddingSpec emb;
        emb.dimension = emb_dim;
        emb.delay = emb_delay > 0
                        ? emb_delay
                        : lir::autocorr_delay(series, delay_rule == "efold"
                                                          ? lir::DelayRule::AutocorrEFold
                                                          : lir::DelayRule::AutocorrZero);
        lir::WolfParams wp;
        wp.evolve_steps = evolve;
        wp.min_sep = min_sep;
        wp.max_sep = max_sep;
        wp.theiler_window = theiler;
        const auto est = lir::lyapunov_wolf(series, emb, wp);
        std::printf(
            "wolf (%s series, m=%zu, delay=%zu): lambda_max = %.6f  (segments %zu, ci ±%.4f, "
            "skips %zu)\n",
            series_sel.c_str(), emb.dimension, emb.delay, est.lambda_max, est.n_segments,
            est.ci_halfwidth, est.n_skips);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"interference removal for synchronized chaotic signals"};
    app.require_subcommand(1);

    CommonOpts sim_o, den_o, swp_o, lya_o;
    auto* sim = app.add_subcommand("simulate", "integrate the drive system and dump series");
    add_common(sim, sim_o);

    auto* den = app.add_subcommand("denoise", "run the full interference-removal pipeline");
    add_common(den, den_o);

    std::vector<double> levels{1.0, 2.0, 4.0};
    auto* swp = app.add_subcommand("sweep", "repeat the pipeline across noise levels");
    add_common(swp, swp_o);
    swp->add_option("--levels", levels, "noise amplitudes to sweep")->delimiter(',');

    std::string method = "both", series_sel = "clean", delay_rule = "zero";
    double t_total = 200.0, min_sep = 0.0, max_sep = 0.0;
    std::size_t emb_dim = 3, emb_delay = 0, evolve = 400, theiler = 0;
    auto* lya = app.add_subcommand("lyapunov", "estimate the largest Lyapunov exponent");
    add_common(lya, lya_o);
    lya->add_option("--method", method, "benettin|wolf|both")
        ->check(CLI::IsMember({"benettin", "wolf", "both"}));
    lya->add_option("--series", series_sel, "wolf input: clean|received")
        ->check(CLI::IsMember({"clean", "received"}));
    lya->add_option("--t-total", t_total, "benettin accumulation time");
    lya->add_option("--emb-dim", emb_dim, "embedding dimension");
    lya->add_option("--emb-delay", emb_delay, "embedding delay in samples (0 = auto)");
    lya->add_option("--delay-rule", delay_rule, "zero|efold autocorrelation rule")
        ->check(CLI::IsMember({"zero", "efold"}));
    lya->add_option("--evolve", evolve, "steps between replacements");
    lya->add_option("--min-sep", min_sep, "neighbor separation lower bound (0 = auto)");
    lya->add_option("--max-sep", max_sep, "neighbor separation upper bound (0 = auto)");
    lya->add_option("--theiler", theiler, "Theiler window in samples (0 = auto)");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(sim_o);
        if (den->parsed()) return cmd_denoise(den_o);
        if (swp->parsed()) return cmd_sweep(swp_o, levels);
        if (lya->parsed())
            return cmd_lyapunov(lya_o, method, series_sel, t_total, emb_dim, emb_delay,
                                delay_rule, evolve, min_sep, max_sep, theiler);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const lir::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const lir::Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
