#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lir/models.hpp"
#include "lir/ode.hpp"
#include "lir/rng.hpp"

using namespace lir;

TEST_CASE("drive_field: origin is a fixed point for any parameters") {
    for (const LorenzParams p : {LorenzParams{10, 60, 8.0 / 3.0}, LorenzParams{16, 45.92, 4.0},
                                 LorenzParams{10, 8.0 / 3.0, 60}}) {
        const State3 f = drive_field(p)({0.0, 0.0, 0.0}, 0.0);
        CHECK(f == State3{0.0, 0.0, 0.0});
    }
}

TEST_CASE("drive_field: hand-evaluated values at the default preset") {
    const LorenzParams p;  // (10, 60, 8/3)
    SUBCASE("at (1,1,1)") {
        // sigma*(1-1), 60*1 - 1 - 1*1, 1*1 - (8/3)*1
        const State3 f = drive_field(p)({1.0, 1.0, 1.0}, 0.0);
        CHECK(f.x1 == 0.0);
        CHECK(f.x2 == 58.0);
        CHECK(f.x3 == 1.0 - 8.0 / 3.0);  // -5/3
    }
    SUBCASE("at (1,0,0)") {
        const State3 f = drive_field(p)({1.0, 0.0, 0.0}, 0.0);
        CHECK(f.x1 == -10.0);
        CHECK(f.x2 == 60.0);
        CHECK(f.x3 == 0.0);
    }
}

TEST_CASE("response_field: hand-evaluated value at the origin with s=2") {
    const LorenzParams p;
    const State3 f = response_field(p)({0.0, 0.0, 0.0}, 2.0, 0.0);
    CHECK(f.x1 == 0.0);
    CHECK(f.x2 == 120.0);
    CHECK(f.x3 == 0.0);
}

TEST_CASE("response_field: replacement is exact when synchronized") {
    const LorenzParams p;
    Xoshiro256pp rng(99);
    for (int i = 0; i < 100; ++i) {
        const State3 s{rng.next_symmetric(30.0), rng.next_symmetric(30.0),
                       30.0 + rng.next_symmetric(30.0)};
        const State3 fd = drive_field(p)(s, 0.0);
        const State3 fr = response_field(p)(s, s.x1, 0.0);
        CHECK(fd == fr);
    }
}

TEST_CASE("nonstandard variant keeps the alternate equations") {
    const LorenzParams p;
    SUBCASE("drive at (1,0,0): second equation uses r*x2 - x2") {
        const State3 f = drive_field(p, CouplingVariant::Nonstandard)({1.0, 0.0, 0.0}, 0.0);
        CHECK(f.x1 == -10.0);
        CHECK(f.x2 == 0.0);
        CHECK(f.x3 == 0.0);
    }
    SUBCASE("response at origin, s=2: first equation couples to the drive directly") {
        const State3 f = response_field(p, CouplingVariant::Nonstandard)({0.0, 0.0, 0.0}, 2.0, 0.0);
        CHECK(f.x1 == -20.0);
        CHECK(f.x2 == 0.0);
        CHECK(f.x3 == 0.0);
    }
}

TEST_CASE("auxiliary_field: exact copy of the drive field") {
    const LorenzParams p;
    Xoshiro256pp rng(7);
    for (int i = 0; i < 100; ++i) {
        const State3 s{rng.next_symmetric(40.0), rng.next_symmetric(40.0),
                       rng.next_symmetric(80.0)};
        CHECK(auxiliary_field(p)(s, 0.0) == drive_field(p)(s, 0.0));
    }
}

TEST_CASE("auxiliary runs from identical states are bit-identical to the drive") {
    const LorenzParams p;
    const State3 s0{2.0, -1.0, 30.0};
    const Trajectory a = integrate(auxiliary_field(p), s0, {0.0, 1e-3, 3000});
    const Trajectory b = integrate(drive_field(p), s0, {0.0, 1e-3, 3000});
    for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i] == b.states[i]);
}

TEST_CASE("auxiliary trajectories diverge exponentially from 1e-8 offsets") {
    const LorenzParams p;
    const Trajectory warm = integrate(drive_field(p), {1.0, 1.0, 1.0}, {0.0, 1e-3, 10001});
    const State3 s0 = warm.states.back();
    const State3 s1 = s0 + State3{1e-8, 0.0, 0.0};
    const Trajectory a = integrate(auxiliary_field(p), s0, {0.0, 1e-3, 20001});
    const Trajectory b = integrate(auxiliary_field(p), s1, {0.0, 1e-3, 20001});
    double max_sep = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i)
        max_sep = std::max(max_sep, norm(a.states[i] - b.states[i]));
    CHECK(max_sep > 1.0);
}

TEST_CASE("synchronization: large mismatch converges below 1e-6 after a transient") {
    const LorenzParams p;
    const Trajectory warm = integrate(drive_field(p), {1.0, 1.0, 1.0}, {0.0, 1e-3, 10001});
    const State3 x0 = warm.states.back();
    const State3 y0{1.0, 1.0, 1.0};  // O(10..60) away from the attractor point
    const auto [ta, tb] =
        integrate_coupled(drive_field(p), response_field(p), x0, y0, {0.0, 1e-3, 20001});
    // after the transient the error must reach and stay at solver precision
    double worst_tail = 0.0;
    for (std::size_t i = 15000; i < ta.states.size(); ++i)
        worst_tail = std::max(worst_tail, norm(tb.states[i] - ta.states[i]));
    CHECK(worst_tail < 1e-6);
}
