#pragma once

#include <cmath>

#include "ssb/errors.hpp"

namespace ssb {

/// Physical constants of the collective-spin model. gamma is the noise
/// strength (J, h and all times are quoted in its units); N enters only the
/// direct wave-function solver.
struct ModelParams {
    double gamma = 1.0;  // noise strength
    double J = 0.0;      // ferromagnetic coupling
    double h = 0.0;      // transverse field
    int N = 1;           // spin count (wave-function solver only)

    void validate() const {
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw config_error("ModelParams: gamma must be finite and >= 0");
        if (!(J >= 0.0) || !std::isfinite(J))
            throw config_error("ModelParams: J must be finite and >= 0");
        if (!(h >= 0.0) || !std::isfinite(h))
            throw config_error("ModelParams: h must be finite and >= 0");
        if (N < 1) throw config_error("ModelParams: N must be >= 1");
    }
};

}  // namespace ssb
