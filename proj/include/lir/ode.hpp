#pragma once

#include <concepts>
#include <cstddef>
#include <string>
#include <utility>

#include "lir/types.hpp"

namespace lir {

template <typename F>
concept VectorField = requires(F f, const State3& s, double t) {
    { f(s, t) } -> std::convertible_to<State3>;
};

template <typename F>
concept DrivenField = requires(F f, const State3& s, double drive, double t) {
    { f(s, drive, t) } -> std::convertible_to<State3>;
};

/// How the sampled drive signal is held within an integration step.
enum class DriveHold { ZeroOrder, Linear };

namespace detail {
[[noreturn]] void throw_blowup(double t, std::size_t step);

inline void require_nonempty(const TimeGrid& grid) {
    if (grid.n == 0) throw ConfigError("integration grid must hold at least one sample");
}
}  // namespace detail

/// Classical 4th-order Runge-Kutta update. Deterministic: identical inputs
/// yield bit-identical outputs.
template <VectorField F>
State3 rk4_step(F&& field, const State3& s, double t, double dt) {
    const State3 k1 = field(s, t);
    const State3 k2 = field(s + (0.5 * dt) * k1, t + 0.5 * dt);
    const State3 k3 = field(s + (0.5 * dt) * k2, t + 0.5 * dt);
    const State3 k4 = field(s + dt * k3, t + dt);
    const State3 next = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(next)) detail::throw_blowup(t, 0);
    return next;
}

/// Fixed-step integration over the grid; states[0] = s0.
template <VectorField F>
Trajectory integrate(F&& field, const State3& s0, const TimeGrid& grid) {
    detail::require_nonempty(grid);
    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.n);
    traj.states.push_back(s0);
    State3 s = s0;
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
        const State3 k1 = field(s, grid.time(i));
        const State3 k2 = field(s + (0.5 * grid.dt) * k1, grid.time(i) + 0.5 * grid.dt);
        const State3 k3 = field(s + (0.5 * grid.dt) * k2, grid.time(i) + 0.5 * grid.dt);
        const State3 k4 = field(s + grid.dt * k3, grid.time(i) + grid.dt);
        s = s + (grid.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!all_finite(s)) detail::throw_blowup(grid.time(i), i);
        traj.states.push_back(s);
    }
    return traj;
}

/// Integration of a scalar-driven field along the drive's grid. The drive
/// value used within step i is sample i (zero-order hold) or the linear
/// interpolant between samples i and i+1. Trajectory length equals drive
/// length; one step consumes one drive sample.
template <DrivenField F>
Trajectory integrate_driven(F&& field, const State3& s0, const ScalarSeries& drive,
                            DriveHold hold = DriveHold::ZeroOrder) {
    detail::require_nonempty(drive.grid);
    Trajectory traj;
    traj.grid = drive.grid;
    traj.states.reserve(drive.grid.n);
    traj.states.push_back(s0);
    State3 s = s0;
    const double dt = drive.grid.dt;
    for (std::size_t i = 0; i + 1 < drive.grid.n; ++i) {
        const double t = drive.grid.time(i);
        const double d0 = drive.values[i];
        double dmid = d0;
        double dend = d0;
        if (hold == DriveHold::Linear) {
            const double d1 = drive.values[i + 1];
            dmid = 0.5 * (d0 + d1);
            dend = d1;
        }
        const State3 k1 = field(s, d0, t);
        const State3 k2 = field(s + (0.5 * dt) * k1, dmid, t + 0.5 * dt);
        const State3 k3 = field(s + (0.5 * dt) * k2, dmid, t + 0.5 * dt);
        const State3 k4 = field(s + dt * k3, dend, t + dt);
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!all_finite(s)) detail::throw_blowup(t, i);
        traj.states.push_back(s);
    }
    return traj;
}

/// Co-integration of a drive system and a response continuously coupled to
/// the drive's first coordinate (the physical closed loop, no sampling).
template <VectorField FA, DrivenField FB>
std::pair<Trajectory, Trajectory> integrate_coupled(FA&& drive_field, FB&& response_field,
                                                    const State3& a0, const State3& b0,
                                                    const TimeGrid& grid) {
    detail::require_nonempty(grid);
    Trajectory ta, tb;
    ta.grid = tb.grid = grid;
    ta.states.reserve(grid.n);
    tb.states.reserve(grid.n);
    ta.states.push_back(a0);
    tb.states.push_back(b0);
    State3 a = a0, b = b0;
    const double dt = grid.dt;
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
        const double t = grid.time(i);
        const State3 ka1 = drive_field(a, t);
        const State3 kb1 = response_field(b, a.x1, t);
        const State3 a2 = a + (0.5 * dt) * ka1;
        const State3 b2 = b + (0.5 * dt) * kb1;
        const State3 ka2 = drive_field(a2, t + 0.5 * dt);
        const State3 kb2 = response_field(b2, a2.x1, t + 0.5 * dt);
        const State3 a3 = a + (0.5 * dt) * ka2;
        const State3 b3 = b + (0.5 * dt) * kb2;
        const State3 ka3 = drive_field(a3, t + 0.5 * dt);
        const State3 kb3 = response_field(b3, a3.x1, t + 0.5 * dt);
        const State3 a4 = a + dt * ka3;
        const State3 b4 = b + dt * kb3;
        const State3 ka4 = drive_field(a4, t + dt);
        const State3 kb4 = response_field(b4, a4.x1, t + dt);
        a = a + (dt / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b = b + (dt / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        if (!all_finite(a) || !all_finite(b)) detail::throw_blowup(t, i);
        ta.states.push_back(a);
        tb.states.push_back(b);
    }
    return {std::move(ta), std::move(tb)};
}

}  // namespace lir
