#pragma once

#include <cmath>
#include <limits>

#include "ssb/params.hpp"
#include "ssb/semiclassical.hpp"

namespace ssb {

/// Drift field of the peak equations with the noise terms dropped (the
/// long-time / classical limit):
///   v_s = -2h sqrt(1/4 - s^2) sin(p)
///   v_p =  2h s (1/4 - s^2)^(-1/2) cos(p) + 8 J s
struct FlowVelocity {
    double v_s = 0.0;
    double v_p = 0.0;
    bool singular = false;  // |s| = 1/2 with a diverging momentum drift
};

inline FlowVelocity classical_flow(PhasePoint pt, const ModelParams& m) {
    const double q = 0.25 - pt.s * pt.s;
    if (q <= 0.0) {
        const double cp = std::cos(pt.p);
        if (m.h == 0.0 || cp == 0.0) return {0.0, 8.0 * m.J * pt.s, false};
        const double sign = pt.s * cp > 0.0 ? 1.0 : -1.0;
        return {0.0, sign * std::numeric_limits<double>::infinity(), true};
    }
    const double rq = std::sqrt(q);
    return {-2.0 * m.h * rq * std::sin(pt.p),
            2.0 * m.h * pt.s / rq * std::cos(pt.p) + 8.0 * m.J * pt.s, false};
}

/// H(s,p) = 2h sqrt(1/4 - s^2) cos(p) - 4 J s^2. The flow above satisfies
/// (ds/dt, dp/dt) = (+dH/dp, -dH/ds), so H is conserved along it.
inline double hamiltonian(PhasePoint pt, const ModelParams& m) {
    const double q = std::max(0.0, 0.25 - pt.s * pt.s);
    return 2.0 * m.h * std::sqrt(q) * std::cos(pt.p) - 4.0 * m.J * pt.s * pt.s;
}

}  // namespace ssb
