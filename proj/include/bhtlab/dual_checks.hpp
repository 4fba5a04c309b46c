#pragma once

#include "bhtlab/bht_ops.hpp"
#include "bhtlab/catalog.hpp"

namespace bht {

/// Smooth compactly supported test function for dual pairings.
struct TestPairing {
    FunctionSpec psi;
    double support_radius = 1.0;
    QuadConfig pairing_quad{};

    /// psi must vanish outside the stated support (checked at 16 boundary points).
    void validate() const;
};

TestPairing smooth_bump_pairing(double support);

struct LeibnizResult {
    double residual = 0.0;       ///< |FD derivative - binomial sum| (complex magnitude)
    double fd_noise_floor = 0.0; ///< rounding estimate for the FD stencil
    bool inconclusive = false;   ///< residual dominated by rounding
    ComplexValue lhs{};
    ComplexValue rhs{};
};

/// Product-rule identity for x-derivatives of the regularized transform:
/// the m-th central finite difference of x -> H_reg(f,g)(x) against
/// sum over k of C(m,k) H_reg(f^(k), g^(m-k))(x). The FD step is eps/10 to
/// stay below the boundary-layer scale. m in {1, 2}; the catalog must
/// provide closed-form derivatives of both inputs.
LeibnizResult leibniz_residual(const FunctionSpec& f, const FunctionSpec& g, double x,
                               double alpha, double eps, int m,
                               const QuadConfig& quad = {});

struct WeakLimitResult {
    ComplexValue value{};
    double err_est = 0.0;
};

/// Pairing of the pointwise inversion bracket with psi:
///   integral over supp psi of
///     [H_reg(f,g)(x) - H_trunc(f,g)(x) + i pi f(x) g(x)] psi(x) dx.
/// The bracket tends to 0 pointwise, so the pairing tends to 0 as eps -> 0.
WeakLimitResult weak_limit_residual(const FunctionSpec& f, const FunctionSpec& g,
                                    const TestPairing& pairing, double alpha, double eps);

struct NormProbeResult {
    double ratio = 0.0;       ///< ||H(f,g)||_p / (||f||_p1 ||g||_p2), finest grid
    double transform_norm = 0.0;
    double f_norm = 0.0;
    double g_norm = 0.0;
    std::vector<double> grid_ratios; ///< per refinement level
    double grid_rel_change = 0.0;    ///< |last - previous| / |last|
};

/// Empirical norm-ratio probe (report only, no constant asserted):
/// ||H(f,g)||_p over an x-window capturing the mass, against the input norms,
/// with 1/p = 1/p1 + 1/p2 and p > 2/3. Inputs must decay.
NormProbeResult norm_probe(const FunctionSpec& f, const FunctionSpec& g, double alpha,
                           double p1, double p2, int refinement_levels = 3);

} // namespace bht
