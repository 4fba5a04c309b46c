#pragma once

#include "bhtlab/catalog.hpp"
#include "bhtlab/quadrature.hpp"

namespace bht {

enum class KernelKind { PvGap, Poisson, CustomTable };
enum class Parity { Odd, Even, None };

/// A mollifier phi with its radial decreasing majorant psi and stored
/// total integral a = integral of phi. The scaled family is
/// phi_eps(t) = (1/eps) phi(t/eps).
struct Kernel {
    KernelKind kind = KernelKind::Poisson;
    double integral = 1.0; ///< a
    Parity parity = Parity::None;
    RealFn phi;
    RealFn psi;              ///< radial majorant, evaluated at |x|
    double psi_tail_power = 0.0; ///< psi(x) <= psi_tail_coeff / |x|^power for large |x|
    double psi_tail_coeff = 0.0;
};

/// The kernel equal to the difference between the smoothed odd kernel
/// t/(t^2+1) and the truncated principal-value kernel 1/t:
///   phi(t) = t/(t^2+1) - 1/t   for |t| >= 1
///   phi(t) = t/(t^2+1)         for |t| <  1
/// Odd, integral 0. phi(0) = 0 by continuity.
double pv_gap_phi(double t);

Kernel pv_gap_kernel();

/// Normalized Poisson kernel phi(t) = (1/pi)/(1+t^2); integral 1.
Kernel poisson_kernel();

/// Kernel from a sampled table (compactly supported). The majorant is
/// computed numerically; the integral is computed by quadrature.
Kernel custom_table_kernel(const GridSignal& table, Parity parity);

/// psi(x) = sup over |t| >= |x| of |phi(t)|. Closed form for the built-in
/// kernels; numeric sup over a refining log-spaced grid otherwise.
double majorant_psi(const Kernel& k, double x);

/// Numeric integral of psi over R (finite iff psi is integrable).
double majorant_integral(const Kernel& k, double tol = 1e-12);

/// Checks the stored integral, parity tagging, and psi dominance
/// (psi(x) >= |phi(t)| for |t| >= |x|) on a validation grid.
/// Throws TailError / ConfigError on failure.
void validate_kernel(const Kernel& k);

} // namespace bht
