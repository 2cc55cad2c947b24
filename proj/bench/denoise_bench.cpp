// Compares the OpenMP escape-time kernel against the serial reference on a
// scaled-up window and verifies they are bit-identical.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lir/denoise.hpp"
#include "lir/interference.hpp"
#include "lir/ode.hpp"

using namespace lir;

namespace {

double seconds_of(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count());
    }
    return best;
}

}  // namespace

int main() {
    const LorenzParams params;
    DenoiseConfig cfg;
    cfg.tau_max = 1.0;

    const std::size_t window = 20000;
    const auto lookahead = static_cast<std::size_t>(std::ceil(cfg.tau_max / 1e-3)) + 1;
    const std::size_t total = window + lookahead;

    std::printf("building problem: window %zu, lookahead %zu...\n", window, lookahead);
    const Trajectory warm = integrate(drive_field(params), {1.0, 1.0, 1.0}, {0.0, 1e-3, 10001});
    const Trajectory traj = integrate(drive_field(params), warm.states.back(),
                                      {0.0, 1e-3, total});
    ScalarSeries clean;
    clean.grid = traj.grid;
    clean.values.resize(total);
    for (std::size_t i = 0; i < total; ++i) clean.values[i] = traj.states[i].x1;

    NoiseSpec spec{NoiseKind::Uniform, 2.2, 0, 0, 777};
    const ScalarSeries received = add_series(clean, generate_noise(spec, clean.grid));
    const Trajectory response =
        integrate_driven(response_field(params), traj.states[0], received);

    ScalarSeries work;
    work.grid = {0.0, 1e-3, window};
    work.values.assign(received.values.begin(),
                       received.values.begin() + static_cast<long>(window));
    for (auto& v : work.values) v += cfg.d;

    ScalarSeries out_serial, out_parallel;
    const double t_serial = seconds_of(
        [&] {
            out_serial = denoise_pass_serial(work, response, cfg, cfg.L0, params).first;
        },
        3);
    const double t_parallel = seconds_of(
        [&] { out_parallel = denoise_pass(work, response, cfg, cfg.L0, params).first; }, 3);

    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < window; ++i)
        if (out_serial.values[i] != out_parallel.values[i]) ++mismatches;

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("serial reference : %8.1f ms\n", t_serial * 1e3);
    std::printf("openmp (%d thread%s): %8.1f ms\n", threads, threads == 1 ? "" : "s",
                t_parallel * 1e3);
    std::printf("speedup          : %8.2fx\n", t_serial / t_parallel);
    std::printf("bitwise mismatches: %zu %s\n", mismatches, mismatches == 0 ? "(ok)" : "(BAD)");
    return mismatches == 0 ? 0 : 1;
}
