#pragma once

#include <vector>

#include "bhtlab/errors.hpp"

namespace bht {

/// Least-squares line in (log eps, log value).
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool degenerate = false; ///< too few usable points (values at the zero floor)
    int points_used = 0;
};

/// Values at or below this floor are treated as converged-to-zero and
/// excluded from rate fits; below quadrature noise, slopes are meaningless.
inline constexpr double kRateFloor = 1e-15;

/// Fit |values| ~ C * eps^slope over a decreasing positive ladder.
/// Requires ladder length >= 4. Absolute values are taken here.
RateFit fit_rate(const std::vector<double>& eps_ladder,
                 const std::vector<double>& values);

struct Extrapolation {
    double limit = 0.0;   ///< a0
    double misfit = 0.0;  ///< max |residual| of the fit
    bool reliable = true; ///< false when misfit > 10x median |value step|
    double a1 = 0.0;
    double a2 = 0.0;
};

/// Weighted least-squares fit of value(eps) = a0 + a1 eps + a2 eps^2 over a
/// decreasing ladder (>= 5 points); the limit is a0. Weights 1/eps^3
/// concentrate the fit where the model error is smallest.
Extrapolation extrapolate(const std::vector<double>& eps_ladder,
                          const std::vector<double>& values);

/// Default epsilon ladder 0.1 * 2^-k, k = 0..count-1.
std::vector<double> default_eps_ladder(int count = 10);

} // namespace bht
