#pragma once

#include <functional>
#include <vector>

#include "bhtlab/errors.hpp"

namespace bht {

using RealFn = std::function<double(double)>;

/// Tolerances and budget for the adaptive engine.
struct QuadConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    double tail_radius = 0.0; ///< 0 means "choose via tail_radius() at the call site"

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw ParamError("QuadConfig: tolerances must be positive");
        if (max_subdivisions < 1)
            throw ParamError("QuadConfig: max_subdivisions must be >= 1");
        if (tail_radius != 0.0 && !(tail_radius > 1.0))
            throw ParamError("QuadConfig: tail_radius must be > 1");
    }
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    long evaluations = 0;
};

/// Adaptive Gauss-Kronrod (G7/K15) integration of h over [a, b].
/// Throws AccuracyError (carrying the best estimate) if the subdivision
/// budget is exhausted before the tolerance is met.
QuadResult integrate_adaptive(const RealFn& h, double a, double b,
                              const QuadConfig& cfg = {});

/// Same engine, but the initial panels are the intervals between the given
/// breakpoints (strictly increasing, >= 2 entries). Used to seed graded
/// subdivisions toward singular points or boundary layers.
QuadResult integrate_segments(const RealFn& h, const std::vector<double>& breakpoints,
                              const QuadConfig& cfg = {});

/// Principal-value integral of h(t)/t over eps <= |t| <= R, computed through
/// the odd-part reduction  integral_eps^R (h(t) - h(-t))/t dt.  The reduction
/// integrates a bounded difference quotient, so there is no cancellation at
/// the cutoff.
QuadResult pv_symmetric(const RealFn& h, double eps, double R,
                        const QuadConfig& cfg = {});

/// Declared decay class of an integrand tail.
enum class DecayClass { Gaussian, Rational, Compact };

struct Decay {
    DecayClass kind;
    double param; ///< gaussian: width; rational: power; compact: support radius
};

/// Radius R beyond which the analytic tail bound of the decay class is < tol.
/// Compact support returns support + 1.  Rational decay with power <= 1
/// throws TailError (the caller must use the conditional symmetric convention).
double tail_radius(const Decay& decay, double tol);

/// Geometric breakpoints from `first` to `last`, doubling each step
/// (first, 2*first, 4*first, ..., last). Requires 0 < first < last.
std::vector<double> geometric_breakpoints(double first, double last);

} // namespace bht
