#pragma once

#include <vector>

#include "bhtlab/catalog.hpp"
#include "bhtlab/kernels.hpp"
#include "bhtlab/quadrature.hpp"
#include "bhtlab/rates.hpp"

namespace bht {

struct ComplexValue {
    double re = 0.0;
    double im = 0.0;
};

/// Operator configuration: transform parameter alpha, regularization eps,
/// truncation radius, quadrature tolerances.
struct BhtParams {
    double alpha = 2.0;
    double eps = 1e-3;
    double radius = 8.0;
    QuadConfig quad{};

    void validate() const;
};

/// alpha must stay away from the excluded values 0 and -1.
void validate_alpha(double alpha);

struct EvalResult {
    double value = 0.0;
    double err_est = 0.0;
};

struct ComplexResult {
    ComplexValue value{};
    double re_err = 0.0;
    double im_err = 0.0;
};

/// eps-sweep of operator values with the extrapolated limit and rate.
struct ConvergenceReport {
    std::vector<double> eps_ladder;
    std::vector<ComplexValue> values;
    ComplexValue extrapolated{};
    double fitted_rate = 0.0;
    std::vector<double> residuals; ///< per-step model misfit (complex magnitude)
    bool extrapolation_ok = false;
    std::string flag; ///< empty when the fit converged
};

/// Truncated transform: integral over eps <= |t| <= R of
/// f(x-t) g(x+alpha t) / t dt, via the symmetric odd-part reduction.
EvalResult bht_truncated(const RealFn& f, const RealFn& g, double x, const BhtParams& p);

/// Regularized transform with kernel 1/(t+i eps) = t/(t^2+eps^2) - i eps/(t^2+eps^2).
/// The real part is truncated at p.radius (odd-part reduction, graded panels
/// in the eps boundary layer). The imaginary part is the full symmetric-limit
/// Poisson integral, computed exactly through the substitution t = eps tan(u);
/// this is what makes the constants case equal (0, -pi) to quadrature tolerance.
ComplexResult bht_regularized(const RealFn& f, const RealFn& g, double x, const BhtParams& p);

/// Poisson remainder  integral of [f(x-t)g(x+alpha t) - f(x)g(x)] eps/(t^2+eps^2) dt.
/// Tends to 0 as eps -> 0 at points where the product has the Lebesgue-point
/// property; stays bounded away from 0 at jump points.
EvalResult poisson_residual(const RealFn& f, const RealFn& g, double x, double alpha,
                            double eps, const QuadConfig& quad = {});

/// Difference between the regularized real part and the truncated transform
/// at the same eps and R, evaluated through its own single-integral route:
/// the pairing of h with the scaled pv_gap kernel on |t| <= R.
EvalResult regularization_gap(const RealFn& f, const RealFn& g, double x, double alpha,
                              double eps, double radius, const QuadConfig& quad = {});

/// Pairing  integral of f(x-t) g(x+alpha t) phi_eps(t) dt  with
/// phi_eps(t) = (1/eps) phi(t/eps).
EvalResult mollifier_pair(const RealFn& f, const RealFn& g, double x, double alpha,
                          const Kernel& k, double eps, const QuadConfig& quad = {});

/// eps-sweep of the truncated transform with extrapolation to eps -> 0.
ConvergenceReport bht_pv(const RealFn& f, const RealFn& g, double x, double alpha,
                         const std::vector<double>& eps_ladder, double radius,
                         const QuadConfig& quad = {});

struct InversionResult {
    double recovered = 0.0;     ///< extrapolated real output
    double imag_residue = 0.0;  ///< extrapolated imaginary part (should vanish)
    ConvergenceReport report;
    bool inversion_ok = false;
};

/// Product recovery  (i/pi) (H_regularized - H_truncated)  along the ladder,
/// truncated and regularized pieces sharing the same eps and radius per step.
InversionResult invert_product(const RealFn& f, const RealFn& g, double x, double alpha,
                               const std::vector<double>& eps_ladder, double radius,
                               const QuadConfig& quad = {}, double imag_tol = 1e-6);

/// Truncation radius for a catalog pair: smallest radius at which at least one
/// factor's declared decay makes the kernel-weighted tail < tol, with a floor
/// covering the evaluation window. Falls back to 64 when nothing decays
/// (constants; the symmetric-limit convention covers those).
double default_truncation_radius(const FunctionSpec& f, const FunctionSpec& g,
                                 double alpha, double x, double tol = 1e-12);

// Spec-level conveniences: look up known bad points and pick the radius.
ConvergenceReport bht_pv(const FunctionSpec& f, const FunctionSpec& g, double x,
                         double alpha, const std::vector<double>& eps_ladder,
                         const QuadConfig& quad = {});
InversionResult invert_product(const FunctionSpec& f, const FunctionSpec& g, double x,
                               double alpha, const std::vector<double>& eps_ladder,
                               const QuadConfig& quad = {}, double imag_tol = 1e-6);

} // namespace bht
