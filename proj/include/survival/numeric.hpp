#pragma once

#include <algorithm>
#include <cmath>
#include <string>

namespace survival {

/// Values within this relative distance are treated as tied in argmax
/// decisions (q-values, expected rewards, survival probabilities).
inline constexpr double kTieTolerance = 1e-12;

inline bool tied(double a, double b) {
    return std::abs(a - b) <= kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

/// a >= b up to the tie tolerance.
inline bool at_least(double a, double b) { return a >= b || tied(a, b); }

/// Fixed 12-significant-digit rendering used by every CSV and report.
std::string format_real(double x);

}  // namespace survival
