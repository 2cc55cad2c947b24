#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lir/denoise.hpp"
#include "lir/interference.hpp"
#include "lir/models.hpp"
#include "lir/types.hpp"

namespace lir {

/// Everything one experiment needs; losslessly serializable to a flat
/// key=value file (see README for the field list).
struct ExperimentConfig {
    LorenzParams model;
    CouplingVariant coupling = CouplingVariant::Standard;
    TimeGrid grid{0.0, 1e-3, 5000};
    std::size_t warmup_steps = 10000;
    State3 initial_state{1.0, 1.0, 1.0};
    NoiseSpec noise;
    double target_snr_db = std::numeric_limits<double>::quiet_NaN();  // NaN = use amplitude
    DenoiseConfig denoise;
    bool lambda_auto = false;       // estimate lambda from the received window
    bool lookahead_extend = true;   // receiver keeps running past the window
    std::string output_dir = "out";
    bool emit_series = false;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
std::string serialize_config(const ExperimentConfig& cfg);
void write_config_file(const ExperimentConfig& cfg, const std::string& path);

/// SNR at each stage of the procedure plus run diagnostics.
struct StageReport {
    double snr_initial_db = 0.0;
    double snr_after_dc_db = 0.0;
    std::vector<double> snr_per_pass_db;
    double gain_db = 0.0;
    double lambda_used = 0.0;
    std::size_t reduced_total = 0;
    std::size_t small_total = 0;
    std::size_t unreached_total = 0;
    std::size_t no_lookahead_total = 0;
    double mean_tau_last_pass = 0.0;

    /// Gain of the final stage over the initial one; 0 when both are the
    /// clean (+inf) sentinel.
    static double compute_gain(double initial_db, double final_db);
};

struct ExperimentResult {
    StageReport report;
    ScalarSeries clean;     // window-length ground truth x1
    ScalarSeries noise;     // window-length injected interference
    ScalarSeries received;  // window-length contaminated signal
    ScalarSeries cleaned;   // window-length denoised output
    Trajectory drive_window;
    double noise_amplitude_used = 0.0;
};

/// Simulates the drive (discarding warmup), injects interference, runs the
/// denoiser, computes per-stage SNR against the ground-truth noise, and
/// writes report + optional series/portrait files under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes columns (t, x1, x2, x3); the two-argument overload substitutes the
/// scalar series for column 2 (a contaminated or cleaned signal against the
/// drive's remaining coordinates).
void emit_phase_portrait(const Trajectory& traj, const std::string& path);
void emit_phase_portrait(const ScalarSeries& x1_override, const Trajectory& traj,
                         const std::string& path);

struct SweepRow {
    double level = 0.0;
    double d = 0.0;
    double L = 0.0;
    double stage1_db = 0.0;
    double stage2_db = 0.0;
    double stage3_db = 0.0;
};

/// One full experiment per noise amplitude with the scaling rule d = level,
/// L = 3 d, dL = L/6. Writes sweep.csv under cfg.output_dir.
std::vector<SweepRow> sweep_noise_levels(const std::vector<double>& levels,
                                         const ExperimentConfig& cfg);

void write_report_csv(const StageReport& report, const std::string& path);
void write_series_csv(const ScalarSeries& series, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// 17-significant-digit float formatting used by every writer.
std::string format_double(double v);

}  // namespace lir
