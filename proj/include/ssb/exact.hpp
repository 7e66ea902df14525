#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ssb/math.hpp"

namespace ssb {

// Closed-form solution of the noise-only model (no Hermitian part): the wave
// packet peaks at s = tanh(2 sqrt(gamma) W_t) / 2 and the rescaled
// magnetization m = ln((1+2s)/(1-2s)) is Gaussian with variance 16 gamma t.

/// Peak position for a given Wiener value: tanh(2 sqrt(gamma) W_t) / 2.
inline double peak_exact(double gamma, double w_t) {
    return 0.5 * std::tanh(2.0 * std::sqrt(gamma) * w_t);
}

/// m = ln((1+2s)/(1-2s)): strictly increasing bijection (-1/2,1/2) -> R.
inline double rescaled_magnetization(double sbar) {
    if (!(std::abs(sbar) < 0.5))
        throw std::domain_error("rescaled_magnetization: |s| must be < 1/2");
    return std::log1p(2.0 * sbar) - std::log1p(-2.0 * sbar);
}

/// Inverse of rescaled_magnetization.
inline double peak_from_magnetization(double mbar) {
    return 0.5 * std::tanh(0.5 * mbar);
}

/// Variance of the rescaled magnetization at time t.
inline double variance_mbar(double gamma, double t) { return 16.0 * gamma * t; }

/// Density of the peak location at t > 0:
/// P(s) = 1/(1-4s^2) * 1/sqrt(2 pi gamma t) * exp(-m(s)^2 / (32 gamma t)).
/// t = 0 is a point mass at s = 0 and is not representable as a density.
inline double pdf_sbar(double gamma, double t, double sbar) {
    if (!(t > 0.0)) throw std::domain_error("pdf_sbar: t must be > 0");
    if (!(gamma > 0.0)) throw std::domain_error("pdf_sbar: gamma must be > 0");
    if (!(std::abs(sbar) < 0.5)) return 0.0;
    const double m = rescaled_magnetization(sbar);
    return std::exp(-m * m / (32.0 * gamma * t)) /
           ((1.0 - 4.0 * sbar * sbar) * std::sqrt(2.0 * std::numbers::pi * gamma * t));
}

/// CDF of the peak location: F(s) = Phi(m(s) / sqrt(16 gamma t)).
inline double cdf_sbar(double gamma, double t, double sbar) {
    if (!(t > 0.0)) throw std::domain_error("cdf_sbar: t must be > 0");
    if (!(gamma > 0.0)) throw std::domain_error("cdf_sbar: gamma must be > 0");
    if (sbar <= -0.5) return 0.0;
    if (sbar >= 0.5) return 1.0;
    return normal_cdf(rescaled_magnetization(sbar) / std::sqrt(16.0 * gamma * t));
}

struct LogWavefunctionValue {
    double g;      // real part: -(1/N) ln |psi| in the large-N (Stirling) form
    double theta;  // imaginary part: phase per spin
};

/// Large-N log wave function of the h = 0 model:
///   g(t,s) = [(1/2+s) ln(1/2+s) + (1/2-s) ln(1/2-s)]/2 - 2 sqrt(gamma) s W_t
///   theta(t,s) = 4 J t s^2
/// g is strictly convex in s and attains its minimum at peak_exact(gamma, W_t).
inline LogWavefunctionValue log_wavefunction_exact(double gamma, double J, double t,
                                                   double w_t, double s) {
    if (!(std::abs(s) < 0.5))
        throw std::domain_error("log_wavefunction_exact: |s| < 1/2 required");
    const double a = 0.5 + s;
    const double b = 0.5 - s;
    const double g0 = 0.5 * (a * std::log(a) + b * std::log(b));
    return {g0 - 2.0 * std::sqrt(gamma) * s * w_t, 4.0 * J * t * s * s};
}

/// Finite-time residue density of the solvable model: 1/sqrt(2 pi gamma t).
/// The reference convention sets gamma = 1 (the unit of energy); other gamma
/// enter through the rescaling t -> gamma t.
inline double residue_density_exact(double gamma, double t) {
    if (!(t > 0.0)) throw std::domain_error("residue_density_exact: t must be > 0");
    if (!(gamma > 0.0)) throw std::domain_error("residue_density_exact: gamma must be > 0");
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * gamma * t);
}

}  // namespace ssb
