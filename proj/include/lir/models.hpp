#pragma once

#include "lir/types.hpp"

namespace lir {

/// Lorenz parameter triple. The default preset (10, 60, 8/3) is chaotic with
/// largest Lyapunov exponent ~1.4.
struct LorenzParams {
    double sigma = 10.0;
    double r = 60.0;
    double b = 8.0 / 3.0;
};

/// Standard is the usual Lorenz / complete-replacement coupling form.
/// Nonstandard keeps an alternate form (r*y - y in place of r*x - y, and a
/// direct drive term in the response's first equation) for comparison runs.
enum class CouplingVariant { Standard, Nonstandard };

/// Autonomous Lorenz vector field.
struct LorenzField {
    LorenzParams p;
    CouplingVariant variant = CouplingVariant::Standard;

    State3 operator()(const State3& s, double /*t*/) const {
        if (variant == CouplingVariant::Standard) {
            return {p.sigma * (s.x2 - s.x1),
                    p.r * s.x1 - s.x2 - s.x1 * s.x3,
                    s.x1 * s.x2 - p.b * s.x3};
        }
        return {p.sigma * (s.x2 - s.x1),
                -s.x1 * s.x3 + p.r * s.x2 - s.x2,
                s.x1 * s.x2 - p.b * s.x3};
    }
};

/// Scalar-driven Lorenz response. Standard is Pecora-Carroll x-replacement:
/// the received scalar substitutes for the first coordinate everywhere it
/// appears in the second and third equations.
struct LorenzResponseField {
    LorenzParams p;
    CouplingVariant variant = CouplingVariant::Standard;

    State3 operator()(const State3& y, double s, double /*t*/) const {
        if (variant == CouplingVariant::Standard) {
            return {p.sigma * (y.x2 - y.x1),
                    p.r * s - y.x2 - s * y.x3,
                    s * y.x2 - p.b * y.x3};
        }
        return {p.sigma * (y.x2 - s),
                -s * y.x3 + p.r * y.x2 - y.x2,
                s * y.x2 - p.b * y.x3};
    }
};

inline LorenzField drive_field(const LorenzParams& p,
                               CouplingVariant variant = CouplingVariant::Standard) {
    return LorenzField{p, variant};
}

inline LorenzResponseField response_field(const LorenzParams& p,
                                          CouplingVariant variant = CouplingVariant::Standard) {
    return LorenzResponseField{p, variant};
}

/// The free-running auxiliary system is an exact copy of the drive system.
inline LorenzField auxiliary_field(const LorenzParams& p) {
    return LorenzField{p, CouplingVariant::Standard};
}

}  // namespace lir
