#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "lir/harness.hpp"

using namespace lir;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig small_cfg(const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.grid.n = 1200;
    cfg.warmup_steps = 3000;
    cfg.noise.kind = NoiseKind::Uniform;
    cfg.noise.amplitude = 2.0;
    cfg.noise.seed = 2024;
    cfg.denoise.passes = 3;
    cfg.denoise.tau_max = 1.0;
    cfg.output_dir = out_dir;
    return cfg;
}

const std::string kTmp = "harness_test_out";

}  // namespace

TEST_CASE("config: serialize/parse round trip is the identity") {
    ExperimentConfig cfg;
    cfg.model.sigma = 16.0;
    cfg.model.r = 45.92;
    cfg.model.b = 4.0;
    cfg.coupling = CouplingVariant::Nonstandard;
    cfg.grid = {0.25, 2e-3, 777};
    cfg.warmup_steps = 123;
    cfg.initial_state = {0.1, -0.2, 0.3};
    cfg.noise.kind = NoiseKind::Sine;
    cfg.noise.amplitude = 1.75;
    cfg.noise.frequency = 47.5;
    cfg.noise.phase = 0.125;
    cfg.noise.seed = 999;
    cfg.target_snr_db = 18.0;
    cfg.denoise.k = 25;
    cfg.denoise.eta = 0.5;
    cfg.denoise.d = 3.0;
    cfg.denoise.L0 = 9.0;
    cfg.denoise.dL = 1.5;
    cfg.denoise.L_min = 2.0;
    cfg.denoise.passes = 7;
    cfg.denoise.lambda_max = 1.3731;
    cfg.denoise.tau_max = 2.5;
    cfg.denoise.resimulate_response = false;
    cfg.lookahead_extend = false;
    cfg.output_dir = "elsewhere";
    cfg.emit_series = true;

    const std::string text = serialize_config(cfg);
    const ExperimentConfig back = parse_config_text(text, "mem");
    CHECK(serialize_config(back) == text);

    ExperimentConfig with_auto = cfg;
    with_auto.lambda_auto = true;
    const std::string text2 = serialize_config(with_auto);
    CHECK(text2.find("denoise.lambda = auto") != std::string::npos);
    CHECK(serialize_config(parse_config_text(text2, "mem")) == text2);
}

TEST_CASE("config: errors carry file and line context") {
    CHECK_THROWS_WITH_AS(parse_config_text("model.sigma = 10\nbogus = 1\n", "f.cfg"),
                         doctest::Contains("f.cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("model.sigma ten\n", "f.cfg"),
                         doctest::Contains("f.cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("grid.dt = -1\n", "g.cfg"),
                         doctest::Contains("g.cfg:1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("noise.kind = pink\n", "g.cfg"),
                         doctest::Contains("pink"), ConfigError);
}

TEST_CASE("config: comments and blank lines are ignored") {
    const auto cfg = parse_config_text("# header\n\nmodel.sigma = 12 # trailing\n", "m");
    CHECK(cfg.model.sigma == 12.0);
}

TEST_CASE("run_experiment: gain equals the recomputable difference") {
    const auto res = run_experiment(small_cfg(kTmp + "/gain"));
    REQUIRE(!res.report.snr_per_pass_db.empty());
    CHECK(res.report.gain_db ==
          res.report.snr_per_pass_db.back() - res.report.snr_initial_db);
    CHECK(res.report.snr_after_dc_db < res.report.snr_initial_db);
}

TEST_CASE("run_experiment: clean sentinel for no noise and no passes") {
    ExperimentConfig cfg = small_cfg(kTmp + "/clean");
    cfg.noise.kind = NoiseKind::None;
    cfg.denoise.passes = 0;
    const auto res = run_experiment(cfg);
    CHECK(std::isinf(res.report.snr_initial_db));
    CHECK(res.report.gain_db == 0.0);
}

TEST_CASE("run_experiment: target_snr_db tunes the realized initial SNR exactly") {
    ExperimentConfig cfg = small_cfg(kTmp + "/tuned");
    cfg.target_snr_db = 19.7;
    const auto res = run_experiment(cfg);
    CHECK(res.report.snr_initial_db == doctest::Approx(19.7).epsilon(1e-9));
    CHECK(res.noise_amplitude_used > 0.0);
}

TEST_CASE("run_experiment: bit-reproducible outputs for identical config") {
    ExperimentConfig cfg = small_cfg(kTmp + "/repro_a");
    cfg.emit_series = true;
    run_experiment(cfg);
    ExperimentConfig cfg2 = cfg;
    cfg2.output_dir = kTmp + "/repro_b";
    run_experiment(cfg2);
    CHECK(slurp(kTmp + "/repro_a/report.csv") == slurp(kTmp + "/repro_b/report.csv"));
    CHECK(slurp(kTmp + "/repro_a/cleaned.csv") == slurp(kTmp + "/repro_b/cleaned.csv"));
    CHECK(slurp(kTmp + "/repro_a/received.csv") == slurp(kTmp + "/repro_b/received.csv"));
}

TEST_CASE("run_experiment: per-pass SNR climbs monotonically on the reference setup") {
    ExperimentConfig cfg;  // reference-style defaults
    cfg.noise.kind = NoiseKind::Uniform;
    cfg.noise.seed = 12345;
    cfg.target_snr_db = 19.7;
    cfg.denoise.tau_max = 2.0;
    cfg.output_dir = kTmp + "/passes";
    const auto res = run_experiment(cfg);
    const auto& snr = res.report.snr_per_pass_db;
    REQUIRE(snr.size() == 5);
    for (std::size_t p = 0; p + 1 < snr.size(); ++p)
        CHECK(snr[p + 1] >= snr[p] - 0.5);  // small fluctuation allowed
    CHECK(res.report.gain_db > 0.0);       // net multi-pass gain must be positive
}

TEST_CASE("run_experiment: lambda=auto estimates the exponent from the received window") {
    ExperimentConfig cfg;
    cfg.noise.kind = NoiseKind::Uniform;
    cfg.noise.seed = 12345;
    cfg.target_snr_db = 19.7;
    cfg.lambda_auto = true;
    cfg.denoise.passes = 1;
    cfg.denoise.tau_max = 1.0;
    cfg.output_dir = kTmp + "/auto";
    const auto res = run_experiment(cfg);
    MESSAGE("auto lambda = ", res.report.lambda_used);
    CHECK(res.report.lambda_used > 0.5);
    CHECK(res.report.lambda_used < 2.5);
}

TEST_CASE("run_experiment: denoising moves the series toward the clean signal") {
    const auto res = run_experiment(small_cfg(kTmp + "/rmse"));
    double rmse_before = 0.0, rmse_after = 0.0;
    for (std::size_t i = 0; i < res.clean.values.size(); ++i) {
        const double db = res.received.values[i] - res.clean.values[i];
        const double da = res.cleaned.values[i] - res.clean.values[i];
        rmse_before += db * db;
        rmse_after += da * da;
    }
    CHECK(rmse_after < rmse_before);
}

TEST_CASE("emit_phase_portrait: layout and column semantics") {
    Trajectory traj;
    traj.grid = {0.0, 0.5, 3};
    traj.states = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    std::filesystem::create_directories(kTmp);
    emit_phase_portrait(traj, kTmp + "/p_clean.csv");

    ScalarSeries noisy;
    noisy.grid = traj.grid;
    noisy.values = {1.5, 4.5, 7.5};
    emit_phase_portrait(noisy, traj, kTmp + "/p_noisy.csv");

    const std::string clean = slurp(kTmp + "/p_clean.csv");
    const std::string contaminated = slurp(kTmp + "/p_noisy.csv");
    CHECK(std::count(clean.begin(), clean.end(), '\n') == 4);  // header + 3 rows

    // identical except column 2
    std::istringstream ca(clean), cb(contaminated);
    std::string la, lb;
    std::getline(ca, la);
    std::getline(cb, lb);
    CHECK(la == lb);  // header
    while (std::getline(ca, la) && std::getline(cb, lb)) {
        std::vector<std::string> fa, fb;
        std::istringstream sa(la), sb(lb);
        std::string tok;
        while (std::getline(sa, tok, ',')) fa.push_back(tok);
        while (std::getline(sb, tok, ',')) fb.push_back(tok);
        REQUIRE(fa.size() == 4);
        REQUIRE(fb.size() == 4);
        CHECK(fa[0] == fb[0]);
        CHECK(fa[1] != fb[1]);
        CHECK(fa[2] == fb[2]);
        CHECK(fa[3] == fb[3]);
    }

    CHECK_THROWS_AS(emit_phase_portrait(ScalarSeries{{0.0, 0.5, 2}, {1.0, 2.0}}, traj,
                                        kTmp + "/p_bad.csv"),
                    GridMismatchError);
}

TEST_CASE("sweep: scaling rule and stage ordering") {
    ExperimentConfig cfg = small_cfg(kTmp + "/sweep");
    cfg.grid.n = 5000;
    cfg.warmup_steps = 10000;
    cfg.denoise.passes = 5;
    cfg.denoise.tau_max = 2.0;
    const std::vector<double> levels{1.0, 2.0};
    const auto rows = sweep_noise_levels(levels, cfg);
    REQUIRE(rows.size() == 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].level == levels[i]);
        CHECK(rows[i].d >= rows[i].level);  // v(t) > 0 needs d at least the amplitude bound
        CHECK(rows[i].L == 3.0 * rows[i].d);
        CHECK(rows[i].stage2_db < rows[i].stage1_db);
        CHECK(rows[i].stage3_db > rows[i].stage1_db);
    }
    CHECK(std::filesystem::exists(kTmp + "/sweep/sweep.csv"));

    SUBCASE("sweep is a uniform-noise experiment even when the base config says none") {
        ExperimentConfig none_cfg = cfg;
        none_cfg.noise.kind = NoiseKind::None;
        none_cfg.grid.n = 1200;
        none_cfg.warmup_steps = 3000;
        none_cfg.denoise.passes = 1;
        none_cfg.denoise.tau_max = 1.0;
        none_cfg.output_dir = kTmp + "/sweep_none";
        const auto r = sweep_noise_levels({2.0}, none_cfg);
        CHECK(std::isfinite(r[0].stage1_db));
    }

    SUBCASE("degenerate single-level sweep matches run_experiment") {
        ExperimentConfig manual = cfg;
        manual.noise.amplitude = 2.0;
        manual.target_snr_db = std::numeric_limits<double>::quiet_NaN();
        manual.denoise.d = 2.0;
        manual.denoise.L0 = 6.0;
        manual.denoise.dL = 1.0;
        manual.emit_series = false;
        manual.output_dir = kTmp + "/sweep_manual";
        const auto res = run_experiment(manual);
        CHECK(rows[1].stage1_db == res.report.snr_initial_db);
        CHECK(rows[1].stage2_db == res.report.snr_after_dc_db);
        CHECK(rows[1].stage3_db == res.report.snr_per_pass_db.back());
    }
}

TEST_CASE("report csv: fields present") {
    StageReport rep;
    rep.snr_initial_db = 19.7;
    rep.snr_after_dc_db = 14.3;
    rep.snr_per_pass_db = {16.0, 18.5};
    rep.gain_db = StageReport::compute_gain(rep.snr_initial_db, rep.snr_per_pass_db.back());
    std::filesystem::create_directories(kTmp);
    write_report_csv(rep, kTmp + "/rep.csv");
    const std::string text = slurp(kTmp + "/rep.csv");
    CHECK(text.find("key,value\n") == 0);
    CHECK(text.find("snr_initial_db," + format_double(19.7)) != std::string::npos);
    CHECK(text.find("snr_pass_2_db," + format_double(18.5)) != std::string::npos);
    CHECK(text.find("gain_db," + format_double(rep.gain_db)) != std::string::npos);
}
