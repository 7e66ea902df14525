#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ssb/errors.hpp"
#include "ssb/params.hpp"
#include "ssb/semiclassical.hpp"
#include "ssb/wiener.hpp"

namespace ssb {

/// State on the maximal-spin (symmetric Dicke) sector: amplitudes[n] is the
/// component on the state with n up spins, magnetization s_n = (2n - N)/(2N).
/// Growth from the non-unitary noise factor is folded into norm_log each step
/// so the stored amplitudes stay O(1); the raw prenormalized amplitude is
/// exp(norm_log) * amplitudes[n].
struct DickeWaveFunction {
    int N = 0;
    std::vector<std::complex<double>> amplitudes;  // size N + 1
    double norm_log = 0.0;

    double magnetization(int n) const {
        return (2.0 * n - N) / (2.0 * N);
    }
};

/// Matrix elements of the collective operators restricted to the sector:
/// sigma_z |n> = (2n - N) |n>, <n+1| sigma_x |n> = sqrt((n+1)(N-n)).
struct CollectiveOperators {
    int N = 0;
    std::vector<double> sz_diag;     // size N + 1
    std::vector<double> sx_coupling; // size N, element k couples k <-> k+1

    static CollectiveOperators build(int N) {
        CollectiveOperators ops;
        ops.N = N;
        ops.sz_diag.resize(N + 1);
        ops.sx_coupling.resize(N);
        for (int n = 0; n <= N; ++n) ops.sz_diag[n] = 2.0 * n - N;
        for (int n = 0; n < N; ++n)
            ops.sx_coupling[n] = std::sqrt(static_cast<double>(n + 1) * (N - n));
        return ops;
    }
};

inline constexpr int dicke_max_spins = 1'000'000;

/// All-spins-along-+x state: amplitudes sqrt(C(N,n) / 2^N), real, peaked at
/// s = 0 and exactly symmetric under n <-> N - n.
inline DickeWaveFunction init_plus_x(int N) {
    if (N < 1) throw config_error("init_plus_x: N must be >= 1");
    if (N > dicke_max_spins)
        throw capacity_error("init_plus_x: N exceeds the dense-storage capacity of 10^6");
    DickeWaveFunction wf;
    wf.N = N;
    wf.amplitudes.resize(N + 1);
    const double lg_total = std::lgamma(N + 1.0);
    const double ln2 = std::numbers::ln2;
    // Fill the lower half and mirror so the symmetry is exact in floating point.
    for (int n = 0; n <= N / 2; ++n) {
        const double ln_c = lg_total - std::lgamma(n + 1.0) - std::lgamma(N - n + 1.0);
        const double amp = std::exp(0.5 * (ln_c - N * ln2));
        wf.amplitudes[n] = amp;
        wf.amplitudes[N - n] = amp;
    }
    // Remove lgamma rounding from the normalization.
    double norm2 = 0.0;
    for (const auto& a : wf.amplitudes) norm2 += std::norm(a);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : wf.amplitudes) a *= inv;
    return wf;
}

inline void normalize(DickeWaveFunction& wf) {
    double norm2 = 0.0;
    for (const auto& a : wf.amplitudes) norm2 += std::norm(a);
    if (!(norm2 > 0.0) || !std::isfinite(norm2))
        throw numeric_error("normalize: state has zero or non-finite norm");
    wf.norm_log += 0.5 * std::log(norm2);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : wf.amplitudes) a *= inv;
}

namespace detail {

/// Per-thread scratch for the tridiagonal exponential.
struct DickeScratch {
    std::vector<std::complex<double>> term, accum;
};

inline DickeScratch& dicke_scratch() {
    thread_local DickeScratch scratch;
    return scratch;
}

/// y = sigma_x * x on the sector (real symmetric tridiagonal, zero diagonal).
inline void apply_sigma_x(const CollectiveOperators& ops,
                          std::span<const std::complex<double>> x,
                          std::span<std::complex<double>> y) {
    const int N = ops.N;
    if (N == 0) {
        y[0] = 0.0;
        return;
    }
    y[0] = ops.sx_coupling[0] * x[1];
    for (int n = 1; n < N; ++n)
        y[n] = ops.sx_coupling[n - 1] * x[n - 1] + ops.sx_coupling[n] * x[n + 1];
    y[N] = ops.sx_coupling[N - 1] * x[N - 1];
}

/// In-place psi <- exp(-i angle sigma_x) psi via a scaled Taylor expansion.
/// ||sigma_x|| <= N, so the angle is halved until N*|angle| <= 1/2 and the
/// series then converges to 1e-14 relative within ~12 terms.
inline void apply_sigma_x_exponential(DickeWaveFunction& wf, const CollectiveOperators& ops,
                                      double angle) {
    if (angle == 0.0) return;
    const int N = wf.N;
    int halvings = 0;
    double scaled = std::abs(angle) * N;
    while (scaled > 0.5 && halvings < 40) {
        scaled *= 0.5;
        ++halvings;
    }
    const std::complex<double> factor(0.0, -angle / static_cast<double>(1ull << halvings));
    auto& scratch = dicke_scratch();
    scratch.term.resize(N + 1);
    scratch.accum.resize(N + 1);
    for (long long rep = 0; rep < (1ll << halvings); ++rep) {
        std::copy(wf.amplitudes.begin(), wf.amplitudes.end(), scratch.accum.begin());
        std::copy(wf.amplitudes.begin(), wf.amplitudes.end(), scratch.term.begin());
        double ref = 0.0;
        for (const auto& a : wf.amplitudes) ref = std::max(ref, std::norm(a));
        ref = std::sqrt(ref);
        for (int k = 1; k <= 64; ++k) {
            apply_sigma_x(ops, scratch.term, wf.amplitudes);  // amplitudes as temp
            const std::complex<double> coeff = factor / static_cast<double>(k);
            double term_max = 0.0;
            for (int n = 0; n <= N; ++n) {
                scratch.term[n] = coeff * wf.amplitudes[n];
                scratch.accum[n] += scratch.term[n];
                term_max = std::max(term_max, std::abs(scratch.term[n]));
            }
            if (term_max <= 1e-14 * ref) break;
        }
        std::copy(scratch.accum.begin(), scratch.accum.end(), wf.amplitudes.begin());
    }
}

/// Fold the largest amplitude magnitude into norm_log.
inline void rescale_to_unit_max(DickeWaveFunction& wf) {
    double max2 = 0.0;
    for (const auto& a : wf.amplitudes) max2 = std::max(max2, std::norm(a));
    if (!(max2 > 0.0) || !std::isfinite(max2))
        throw numeric_error("dicke step: amplitudes became zero or non-finite");
    const double mx = std::sqrt(max2);
    const double inv = 1.0 / mx;
    for (auto& a : wf.amplitudes) a *= inv;
    wf.norm_log += std::log(mx);
}

/// Half step of the diagonal factor exp(sqrt(gamma) sigma_z dW + i (J/N) sigma_z^2 dt).
inline void apply_diagonal_half(DickeWaveFunction& wf, const CollectiveOperators& ops,
                                const ModelParams& m, double dW, double dt) {
    const double root_gamma = std::sqrt(m.gamma);
    const double j_over_n = m.J / wf.N;
    for (int n = 0; n <= wf.N; ++n) {
        const double z = ops.sz_diag[n];
        const double growth = std::exp(0.5 * root_gamma * z * dW);
        const double phase = 0.5 * dt * j_over_n * z * z;
        wf.amplitudes[n] *= std::complex<double>(growth * std::cos(phase), growth * std::sin(phase));
    }
}

}  // namespace detail

/// One step of the prenormalized (linear, non-unitary) evolution, Strang
/// split as half-diagonal / sigma_x rotation / half-diagonal:
///   exp(D/2) exp(-i h dt sigma_x) exp(D/2),
///   D = sqrt(gamma) sigma_z dW + i (J/N) sigma_z^2 dt.
/// exp(D) is the exact propagator of the noise + coupling part; its expansion
/// carries the Ito V^2 dt / 2 term automatically. The amplitude maximum is
/// folded into norm_log afterwards to prevent overflow.
inline void step_prenormalized(DickeWaveFunction& wf, const CollectiveOperators& ops,
                               const ModelParams& m, double dW, double dt) {
    detail::apply_diagonal_half(wf, ops, m, dW, dt);
    detail::apply_sigma_x_exponential(wf, ops, m.h * dt);
    detail::apply_diagonal_half(wf, ops, m, dW, dt);
    detail::rescale_to_unit_max(wf);
}

/// One explicit Euler-Maruyama step of the normalized nonlinear equation
///   d psi = -i H0 dt psi + dW (V - <V>) psi
///           + dt { (V - <V>)^2 / 2 - (<V^2> - <V>^2) } psi,
/// V = sqrt(gamma) sigma_z; the state is re-normalized afterwards.
inline void normalized_step(DickeWaveFunction& wf, const CollectiveOperators& ops,
                            const ModelParams& m, double dW, double dt) {
    const int N = wf.N;
    const double root_gamma = std::sqrt(m.gamma);
    double ev = 0.0, ev2 = 0.0, norm2 = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double w = std::norm(wf.amplitudes[n]);
        const double v = root_gamma * ops.sz_diag[n];
        norm2 += w;
        ev += w * v;
        ev2 += w * v * v;
    }
    ev /= norm2;
    ev2 /= norm2;
    const double var_v = ev2 - ev * ev;

    auto& scratch = detail::dicke_scratch();
    scratch.term.resize(N + 1);
    detail::apply_sigma_x(ops, wf.amplitudes, scratch.term);  // sigma_x psi
    const double j_over_n = m.J / N;
    for (int n = 0; n <= N; ++n) {
        const double z = ops.sz_diag[n];
        const std::complex<double> h0_psi =
            -j_over_n * z * z * wf.amplitudes[n] + m.h * scratch.term[n];
        const double dv = root_gamma * z - ev;
        wf.amplitudes[n] += std::complex<double>(0.0, -dt) * h0_psi +
                            (dW * dv + dt * (0.5 * dv * dv - var_v)) * wf.amplitudes[n];
    }
    double new_norm2 = 0.0;
    for (const auto& a : wf.amplitudes) new_norm2 += std::norm(a);
    if (!(new_norm2 > 0.0) || !std::isfinite(new_norm2))
        throw numeric_error("normalized_step: state norm became zero or non-finite");
    const double inv = 1.0 / std::sqrt(new_norm2);
    for (auto& a : wf.amplitudes) a *= inv;
}

/// Peak position: argmax |psi_n| refined by a quadratic fit of ln|psi| at the
/// argmax and its neighbours; boundary argmax (n = 0 or N) is returned as-is.
inline double peak_location(const DickeWaveFunction& wf) {
    const int N = wf.N;
    int best = -1;
    double best2 = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double a2 = std::norm(wf.amplitudes[n]);
        if (a2 > best2) {
            best2 = a2;
            best = n;
        }
    }
    if (best < 0) throw invalid_state_error("peak_location: all amplitudes are zero");
    if (best == 0 || best == N) return wf.magnetization(best);
    const double y0 = 0.5 * std::log(best2);
    const double m2 = std::norm(wf.amplitudes[best - 1]);
    const double p2 = std::norm(wf.amplitudes[best + 1]);
    double delta = 0.0;
    if (m2 > 0.0 && p2 > 0.0) {
        const double ym = 0.5 * std::log(m2);
        const double yp = 0.5 * std::log(p2);
        const double denom = (ym + yp) - 2.0 * y0;  // symmetric form, mirror-exact
        if (denom < 0.0) delta = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
    }
    const double n_ref = best + delta;
    return (2.0 * n_ref - N) / (2.0 * N);
}

namespace detail {

inline double wrap_angle(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x, two_pi);
    if (x > std::numbers::pi) x -= two_pi;
    if (x <= -std::numbers::pi) x += two_pi;
    return x;
}

}  // namespace detail

/// Phase slope at the peak: the wave-function estimate of the classical
/// momentum, from wrapped phase differences of the neighbouring amplitudes.
inline double peak_momentum(const DickeWaveFunction& wf) {
    const int N = wf.N;
    int best = 0;
    double best2 = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double a2 = std::norm(wf.amplitudes[n]);
        if (a2 > best2) {
            best2 = a2;
            best = n;
        }
    }
    auto dphi = [&](int a, int b) {
        return detail::wrap_angle(std::arg(wf.amplitudes[b]) - std::arg(wf.amplitudes[a]));
    };
    if (best == 0) return dphi(0, 1);
    if (best == N) return dphi(N - 1, N);
    return 0.5 * (dphi(best - 1, best) + dphi(best, best + 1));
}

/// Log decomposition g = -(1/N) ln|psi| (shifted so min g = 0) and
/// theta = phase / N, unwrapped outward from the peak. The window is the
/// largest contiguous run of nonzero amplitudes containing the peak.
struct LogDecomposition {
    int first_n = 0;
    std::vector<double> g;
    std::vector<double> theta;
};

inline LogDecomposition log_decompose(const DickeWaveFunction& wf) {
    const int N = wf.N;
    int best = -1;
    double best2 = 0.0;
    for (int n = 0; n <= N; ++n) {
        const double a2 = std::norm(wf.amplitudes[n]);
        if (a2 > best2) {
            best2 = a2;
            best = n;
        }
    }
    if (best < 0) throw invalid_state_error("log_decompose: all amplitudes are zero");
    int lo = best, hi = best;
    while (lo > 0 && std::norm(wf.amplitudes[lo - 1]) > 0.0) --lo;
    while (hi < N && std::norm(wf.amplitudes[hi + 1]) > 0.0) ++hi;

    LogDecomposition dec;
    dec.first_n = lo;
    dec.g.resize(hi - lo + 1);
    dec.theta.resize(hi - lo + 1);
    double g_min = std::numeric_limits<double>::infinity();
    for (int n = lo; n <= hi; ++n) {
        const double g = -(0.5 / N) * std::log(std::norm(wf.amplitudes[n]));
        dec.g[n - lo] = g;
        g_min = std::min(g_min, g);
    }
    for (auto& g : dec.g) g -= g_min;

    // Unwrap phases outward from the peak, then scale by 1/N.
    std::vector<double> phi(hi - lo + 1);
    phi[best - lo] = std::arg(wf.amplitudes[best]);
    for (int n = best + 1; n <= hi; ++n)
        phi[n - lo] = phi[n - 1 - lo] +
                      detail::wrap_angle(std::arg(wf.amplitudes[n]) - std::arg(wf.amplitudes[n - 1]));
    for (int n = best - 1; n >= lo; --n)
        phi[n - lo] = phi[n + 1 - lo] -
                      detail::wrap_angle(std::arg(wf.amplitudes[n + 1]) - std::arg(wf.amplitudes[n]));
    for (int n = lo; n <= hi; ++n) dec.theta[n - lo] = phi[n - lo] / N;
    return dec;
}

/// One recorded point of a wave-function trajectory.
struct TrajectoryPoint {
    double t = 0.0;
    double s_bar = 0.0;
    std::optional<DickeWaveFunction> snapshot;
};

/// Drives the prenormalized evolution along one Brownian path, recording the
/// peak trajectory (and optional state snapshots) at the given grid times.
inline std::vector<TrajectoryPoint> evolve_path(const DickeWaveFunction& wf0,
                                                const ModelParams& m, const WienerPath& path,
                                                std::span<const double> record_times,
                                                bool with_snapshots = false) {
    const auto sched = detail::record_schedule(path.grid, record_times);
    std::vector<TrajectoryPoint> out(record_times.size());
    const CollectiveOperators ops = CollectiveOperators::build(wf0.N);
    DickeWaveFunction wf = wf0;
    auto emit = [&](std::size_t slot, std::size_t i) {
        out[slot].t = path.grid.time(i);
        out[slot].s_bar = peak_location(wf);
        if (with_snapshots) out[slot].snapshot = wf;
    };
    std::size_t k = 0;
    while (k < sched.size() && sched[k].first == 0) {
        emit(sched[k].second, 0);
        ++k;
    }
    for (std::size_t i = 0; i < path.grid.n_steps && k < sched.size(); ++i) {
        step_prenormalized(wf, ops, m, path.increments[i], path.grid.dt);
        while (k < sched.size() && sched[k].first == i + 1) {
            emit(sched[k].second, i + 1);
            ++k;
        }
    }
    return out;
}

}  // namespace ssb
