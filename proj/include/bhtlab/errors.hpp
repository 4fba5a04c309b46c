#pragma once

#include <stdexcept>
#include <string>

namespace bht {

/// Bad configuration (function spec parameters, run config files).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid operation parameters (exponent regimes, eps >= R, alpha near {0,-1}).
class ParamError : public std::invalid_argument {
public:
    explicit ParamError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Evaluation outside a function's domain (off-grid queries; no extrapolation).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Quadrature did not converge within the subdivision budget.
/// Carries the best available estimate and its error bound.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), err_est(err) {}
    double best_estimate;
    double err_est;
};

/// Tail of the declared decay class is not integrable (power <= 1),
/// or a kernel majorant fails to decay.
class TailError : public std::runtime_error {
public:
    explicit TailError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace bht
