#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/math.hpp"
#include "ssb/params.hpp"
#include "ssb/wiener.hpp"

namespace ssb {

/// Peak coordinates: wave-packet position s in magnetization space and the
/// phase slope p at the peak (the classical momentum, unbounded).
struct PhasePoint {
    double s = 0.0;
    double p = 0.0;
};

/// Reflecting clamp distance from the |s| = 1/2 boundary. The momentum drift
/// carries a (1/4 - s^2)^(-1/2) factor, so integrators must never land on
/// the singularity itself.
inline constexpr double sbar_clamp = 1e-9;

inline double clamp_sbar(double s) {
    const double lim = 0.5 - sbar_clamp;
    return s > lim ? lim : (s < -lim ? -lim : s);
}

/// f~(s) = 2h sqrt(1/4 - s^2), the transverse-field coupling profile.
inline double ftilde(double h, double s) {
    if (!(std::abs(s) < 0.5)) throw std::domain_error("ftilde: |s| < 1/2 required");
    return 2.0 * h * std::sqrt(0.25 - s * s);
}

struct FtildeTaylor {
    double f0;  // f~(s)
    double f1;  // f~'(s)
    double f2;  // f~''(s)
};

inline FtildeTaylor ftilde_taylor(double h, double s) {
    if (!(std::abs(s) < 0.5)) throw std::domain_error("ftilde_taylor: |s| < 1/2 required");
    const double q = 0.25 - s * s;
    const double rq = std::sqrt(q);
    return {2.0 * h * rq, -2.0 * h * s / rq, -0.5 * h / (q * rq)};
}

/// Curvatures of the log wave function evaluated on the h = 0 solution:
///   g2 = 2 cosh^2(W~), g3 = 8 tanh(W~) cosh^4(W~), theta2 = 8 J t, theta3 = 0
/// with W~ = 2 sqrt(gamma) W_t. This closure is what makes the peak equations
/// integrable; g2, g3 grow without bound as the packet narrows (|W~| large).
struct TaylorCoefficients {
    double g2;
    double g3;
    double theta2;
    double theta3;
};

inline TaylorCoefficients taylor_coefficients_h0(double gamma, double J, double t, double w_t) {
    const double wt = 2.0 * std::sqrt(gamma) * w_t;
    const double th = std::tanh(wt);
    const double ch2 = square(std::cosh(wt));  // overflows to inf only for |W~| > ~355
    return {2.0 * ch2, 8.0 * th * ch2 * ch2, 8.0 * J * t, 0.0};
}

/// One Euler-Maruyama update of the coupled peak equations, driven by the
/// pathwise increment d_tanh = tanh(W~_{t+dt}) - tanh(W~_t):
///   ds = d_tanh / 2 - 2h sqrt(1/4 - s^2) sin(p) dt
///   dp = 2h s (1/4 - s^2)^(-1/2) cos(p) dt + 4 J t d_tanh + 8 J s dt
/// Coefficients are evaluated at the step start (Ito convention); the result
/// is clamped to |s| <= 1/2 - sbar_clamp.
inline PhasePoint sde_step(PhasePoint pt, const ModelParams& m, double t, double d_tanh,
                           double dt) {
    PhasePoint out;
    if (m.h != 0.0) {
        const double q = 0.25 - pt.s * pt.s;  // > 0 by the clamp invariant
        const double rq = std::sqrt(q);
        out.s = pt.s + 0.5 * d_tanh - 2.0 * m.h * rq * std::sin(pt.p) * dt;
        out.p = pt.p + (2.0 * m.h * pt.s / rq * std::cos(pt.p) + 8.0 * m.J * pt.s) * dt +
                4.0 * m.J * t * d_tanh;
    } else {
        // h = 0 keeps the s-update a pure telescoping sum.
        out.s = pt.s + 0.5 * d_tanh;
        out.p = pt.p + 8.0 * m.J * pt.s * dt + 4.0 * m.J * t * d_tanh;
    }
    out.s = clamp_sbar(out.s);
    return out;
}

namespace detail {

/// Sorted (grid index, output slot) pairs for a record-time list.
inline std::vector<std::pair<std::size_t, std::size_t>> record_schedule(
    const TimeGrid& grid, std::span<const double> record_times) {
    std::vector<std::pair<std::size_t, std::size_t>> sched(record_times.size());
    for (std::size_t k = 0; k < record_times.size(); ++k)
        sched[k] = {grid.index_of(record_times[k]), k};
    std::sort(sched.begin(), sched.end());
    return sched;
}

}  // namespace detail

/// Integrates the peak equations along one Brownian path, recording at the
/// given grid times. Initial condition (0, 0): the symmetric initial state
/// has its peak at the origin and a real wave function.
inline void integrate_sde_into(const ModelParams& m, const WienerPath& path,
                               std::span<const double> record_times,
                               std::span<PhasePoint> out) {
    const auto sched = detail::record_schedule(path.grid, record_times);
    const double two_root_gamma = 2.0 * std::sqrt(m.gamma);
    PhasePoint pt{};
    std::size_t k = 0;
    while (k < sched.size() && sched[k].first == 0) out[sched[k++].second] = pt;
    double tanh_prev = std::tanh(two_root_gamma * path.cumulative[0]);
    for (std::size_t i = 0; i < path.grid.n_steps && k < sched.size(); ++i) {
        const double tanh_next = std::tanh(two_root_gamma * path.cumulative[i + 1]);
        pt = sde_step(pt, m, path.grid.time(i), tanh_next - tanh_prev, path.grid.dt);
        tanh_prev = tanh_next;
        while (k < sched.size() && sched[k].first == i + 1) out[sched[k++].second] = pt;
    }
}

inline std::vector<std::pair<double, PhasePoint>> integrate_sde(
    const ModelParams& m, const WienerPath& path, std::span<const double> record_times) {
    std::vector<PhasePoint> pts(record_times.size());
    integrate_sde_into(m, path, record_times, pts);
    std::vector<std::pair<double, PhasePoint>> out(record_times.size());
    for (std::size_t k = 0; k < record_times.size(); ++k) out[k] = {record_times[k], pts[k]};
    return out;
}

/// First-order expansion around the noise-only solution. The raw value is
/// reported along with the unphysical flag (|s| exceeded 1/2, expected for
/// gamma t >> 1); flagged values are clamped so downstream statistics stay
/// on the physical domain.
struct PerturbativePoint {
    PhasePoint point;
    bool unphysical = false;
};

/// Evaluates
///   s(t) = tanh(W~_t)/2 - h  Int_0^t sech(W~_u) sin(4 J u tanh(W~_u)) du
///   p(t) = 4 J t tanh(W~_t) + 2h Int_0^t sinh(W~_u) cos(4 J u tanh(W~_u)) du
/// with trapezoid integrals on the path grid. sech/sinh forms avoid the
/// cancellation in sqrt(1 - tanh^2) once the path saturates.
inline void integrate_perturbative_into(const ModelParams& m, const WienerPath& path,
                                        std::span<const double> record_times,
                                        std::span<PerturbativePoint> out) {
    const auto sched = detail::record_schedule(path.grid, record_times);
    const double two_root_gamma = 2.0 * std::sqrt(m.gamma);
    const double dt = path.grid.dt;
    double int_s = 0.0;  // sin integral accumulator
    double int_p = 0.0;  // cos integral accumulator
    auto emit = [&](std::size_t slot, std::size_t i, double th) {
        const double t = path.grid.time(i);
        PerturbativePoint r;
        r.point.s = 0.5 * th - m.h * int_s;
        r.point.p = 4.0 * m.J * t * th + 2.0 * m.h * int_p;
        r.unphysical = std::abs(r.point.s) > 0.5;
        if (r.unphysical) r.point.s = clamp_sbar(r.point.s);
        out[slot] = r;
    };
    double wt = two_root_gamma * path.cumulative[0];
    double th = std::tanh(wt);
    double a_prev = sech(wt) * std::sin(4.0 * m.J * path.grid.time(0) * th);
    double b_prev = std::sinh(wt) * std::cos(4.0 * m.J * path.grid.time(0) * th);
    std::size_t k = 0;
    while (k < sched.size() && sched[k].first == 0) emit(sched[k++].second, 0, th);
    for (std::size_t i = 1; i <= path.grid.n_steps && k < sched.size(); ++i) {
        wt = two_root_gamma * path.cumulative[i];
        th = std::tanh(wt);
        const double phase = 4.0 * m.J * path.grid.time(i) * th;
        const double a = sech(wt) * std::sin(phase);
        const double b = std::sinh(wt) * std::cos(phase);
        int_s += 0.5 * dt * (a_prev + a);
        int_p += 0.5 * dt * (b_prev + b);
        a_prev = a;
        b_prev = b;
        while (k < sched.size() && sched[k].first == i) emit(sched[k++].second, i, th);
    }
}

inline PerturbativePoint perturbative_path(const ModelParams& m, const WienerPath& path,
                                           double t) {
    const double times[1] = {t};
    PerturbativePoint pt[1];
    integrate_perturbative_into(m, path, times, pt);
    return pt[0];
}

}  // namespace ssb
