#pragma once

#include <cmath>
#include <numbers>

namespace ssb {

/// Standard normal CDF.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// sech(x) without overflow: 2 e^{-|x|} / (1 + e^{-2|x|}).
inline double sech(double x) {
    const double e = std::exp(-std::abs(x));
    return 2.0 * e / (1.0 + e * e);
}

inline double square(double x) { return x * x; }

}  // namespace ssb
