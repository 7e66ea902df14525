#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/rng.hpp"

namespace ssb {

/// Uniform time grid t_i = i*dt, i = 0..n_steps, with t_0 = 0. Times are in
/// inverse-energy units (the noise strength sets the scale). n_steps = 0 is
/// the degenerate grid containing only t_0.
struct TimeGrid {
    double dt = 1e-3;
    std::size_t n_steps = 0;

    TimeGrid() = default;
    TimeGrid(double dt_in, std::size_t n_steps_in) : dt(dt_in), n_steps(n_steps_in) {
        if (!(dt > 0.0) || !std::isfinite(dt))
            throw config_error("TimeGrid: dt must be positive and finite");
    }

    double time(std::size_t i) const { return dt * static_cast<double>(i); }
    double t_max() const { return time(n_steps); }

    /// Grid index of t; throws if t is not (within rounding) a grid time.
    std::size_t index_of(double t) const {
        if (!(t >= 0.0)) throw config_error("TimeGrid: record time must be >= 0");
        const double x = t / dt;
        const auto i = static_cast<std::size_t>(std::llround(x));
        const double tol = 1e-9 * std::max(1.0, x);
        if (i > n_steps || std::abs(x - static_cast<double>(i)) > tol)
            throw config_error("TimeGrid: record time is off the grid");
        return i;
    }
};

/// Grid reaching t_max in steps of dt; t_max must be a grid time.
inline TimeGrid make_grid(double dt, double t_max) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw config_error("make_grid: dt must be positive");
    if (!(t_max >= 0.0)) throw config_error("make_grid: t_max must be >= 0");
    const double x = t_max / dt;
    const auto n = static_cast<std::size_t>(std::llround(x));
    if (std::abs(x - static_cast<double>(n)) > 1e-9 * std::max(1.0, x))
        throw config_error("make_grid: t_max is not an integer multiple of dt");
    return TimeGrid(dt, n);
}

/// One discretized Brownian path. increments[i] ~ N(0, dt) drives the step
/// t_i -> t_{i+1}; cumulative[i] = W_{t_i} with W_0 = 0 and
/// cumulative[i] = sum of increments[0..i-1] exactly as summed.
struct WienerPath {
    TimeGrid grid;
    std::vector<double> increments;
    std::vector<double> cumulative;
    RngSeed seed;
};

inline void generate_wiener_path_into(const TimeGrid& grid, RngSeed seed, WienerPath& out) {
    if (!(grid.dt > 0.0) || !std::isfinite(grid.dt))
        throw config_error("generate_wiener_path: invalid grid (dt <= 0)");
    out.grid = grid;
    out.seed = seed;
    out.increments.resize(grid.n_steps);
    out.cumulative.resize(grid.n_steps + 1);
    RandomStream rng(seed);
    const double root_dt = std::sqrt(grid.dt);
    double w = 0.0;
    out.cumulative[0] = 0.0;
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        const double dw = root_dt * rng.next_normal();
        out.increments[i] = dw;
        w += dw;
        out.cumulative[i + 1] = w;
    }
}

inline WienerPath generate_wiener_path(const TimeGrid& grid, RngSeed seed) {
    WienerPath path;
    generate_wiener_path_into(grid, seed, path);
    return path;
}

/// W~_t = 2 sqrt(gamma) W_t, the rescaled process every solver consumes.
inline double wiener_tilde(const WienerPath& path, double gamma, std::size_t i) {
    return 2.0 * std::sqrt(gamma) * path.cumulative[i];
}

/// tanh(W~_{t_i}); saturates to +-1 without overflow for large |W~|.
inline double tanh_tilde(const WienerPath& path, double gamma, std::size_t i) {
    return std::tanh(wiener_tilde(path, gamma, i));
}

/// Pathwise increment of tanh(W~), the non-Markovian drive. Kept as a plain
/// difference so the sum over steps telescopes exactly.
inline double tanh_increment(const WienerPath& path, double gamma, std::size_t i) {
    return tanh_tilde(path, gamma, i + 1) - tanh_tilde(path, gamma, i);
}

/// Sign-flipped copy: the statistical-symmetry partner of a path.
inline WienerPath negated(const WienerPath& path) {
    WienerPath out = path;
    for (auto& dw : out.increments) dw = -dw;
    for (auto& w : out.cumulative) w = -w;
    return out;
}

/// Pairwise-summed increments on a grid with doubled dt; used by the
/// dt-convergence check so both resolutions share one Brownian motion.
inline WienerPath coarsened(const WienerPath& path) {
    if (path.grid.n_steps % 2 != 0)
        throw config_error("coarsened: n_steps must be even");
    WienerPath out;
    out.grid = TimeGrid(2.0 * path.grid.dt, path.grid.n_steps / 2);
    out.seed = path.seed;
    out.increments.resize(out.grid.n_steps);
    out.cumulative.resize(out.grid.n_steps + 1);
    out.cumulative[0] = 0.0;
    for (std::size_t i = 0; i < out.grid.n_steps; ++i) {
        out.increments[i] = path.increments[2 * i] + path.increments[2 * i + 1];
        out.cumulative[i + 1] = out.cumulative[i] + out.increments[i];
    }
    return out;
}

}  // namespace ssb
