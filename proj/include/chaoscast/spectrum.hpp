#pragma once

#include <vector>

#include "chaoscast/common.hpp"

namespace chaoscast::lyapunov {

struct LyapunovSpectrum {
    Vec exponents;  // sorted descending, 1/time units
    bool converged = false;
    std::vector<Vec> history;  // spectrum estimate at each convergence check
    double ky_dimension = 0.0;
    bool ky_saturated = false;
};

/// Kaplan-Yorke dimension of a descending spectrum: j + sum_{i<=j} L_i / |L_{j+1}|
/// with j the largest index whose partial sum is >= 0. Returns 0 if L_1 < 0 and
/// the exponent count (saturated=true) if every partial sum is nonnegative.
double kaplan_yorke(const Vec& descending_exponents, bool* saturated = nullptr);

}  // namespace chaoscast::lyapunov
