#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bhtlab/errors.hpp"
#include "bhtlab/quadrature.hpp"

namespace bht {

/// Uniformly sampled signal with local polynomial interpolation.
struct GridSignal {
    std::vector<double> samples;
    double x0 = 0.0;
    double dx = 1.0;
    int interpolation_order = 3;

    double x_last() const { return x0 + dx * static_cast<double>(samples.size() - 1); }
    void validate() const;
};

/// Local cubic interpolation, exact at the nodes. Queries outside
/// [x0, x0 + (n-1)dx] are a DomainError: no extrapolation.
double eval_offgrid(const GridSignal& s, double x);

/// Load a two-column (x,value) CSV. Spacing must be uniform to a relative
/// deviation of 1e-9, otherwise the load fails.
GridSignal load_grid_csv(const std::string& path);

enum class FnKind {
    Constant,
    Gaussian,
    Lorentzian,
    SmoothBump,
    Oscillatory,
    SignJump,
    PowerCusp,
    Polynomial,
    Sampled
};

enum class Smoothness { Analytic, Lipschitz, Holder, Discontinuous };

/// Claimed L^p membership; p = infinity is encoded as INFINITY.
struct MembershipClaim {
    double p;
    bool in_lp;
};

/// Catalog entry describing an analytic test function or a sampled signal.
///
/// Parameter use by kind:
///   constant:    value
///   gaussian:    center, width             exp(-((x-c)/w)^2)
///   lorentzian:  center, width             1/(1+((x-c)/w)^2)
///   smooth_bump: width (support radius)    exp(1 - 1/(1-(x/w)^2)) on |x|<w, else 0
///   oscillatory: center, width, frequency  cos(2*pi*freq*(x-c)) * exp(-((x-c)/w)^2)
///   sign_jump:   center                    -1 below, +1 at and above (right-continuous)
///   power_cusp:  center, exponent          |x-c|^beta, beta in (0,1]
///   polynomial:  coeffs                    c0 + c1 x + c2 x^2 + ...
///   sampled:     grid                      zero-extended outside the grid window
struct FunctionSpec {
    FnKind kind = FnKind::Constant;
    double center = 0.0;
    double width = 1.0;
    double exponent = 0.5;
    double frequency = 1.0;
    double value = 1.0;
    std::vector<double> coeffs;
    GridSignal grid;

    Smoothness smoothness = Smoothness::Analytic;
    double holder_beta = 1.0;
    double lipschitz_constant = 0.0; ///< 0 when unknown/not applicable
    std::vector<MembershipClaim> membership;
    std::vector<double> known_bad_points;

    void validate() const;
    bool is_bad_point(double x) const;
};

/// Evaluable total function on R. Deterministic; throws ConfigError for
/// invalid parameters.
RealFn make_function(const FunctionSpec& spec);

/// Closed-form derivative of the given order (0, 1 or 2). Throws ParamError
/// for kinds without stored closed forms (sign_jump, power_cusp, sampled).
RealFn derivative_function(const FunctionSpec& spec, int order);

/// Decay envelope of |f| for tail-truncation choices; nullopt when the
/// function does not decay (constants, polynomials, jumps, cusps).
std::optional<Decay> decay_class(const FunctionSpec& spec);

/// Display/parse label, e.g. "gaussian(center=0,width=1)".
std::string spec_label(const FunctionSpec& spec);

/// Parse a label produced by spec_label (also accepts bare "constant(1)"
/// style positional values for constant). Used by run-config files.
FunctionSpec parse_spec(const std::string& text);

// Preset builders with membership/smoothness metadata filled in.
FunctionSpec constant_spec(double value);
FunctionSpec gaussian_spec(double center, double width);
FunctionSpec lorentzian_spec(double center, double width);
FunctionSpec smooth_bump_spec(double support);
FunctionSpec oscillatory_spec(double center, double width, double cycles);
FunctionSpec sign_jump_spec(double center);
FunctionSpec power_cusp_spec(double center, double beta);
FunctionSpec polynomial_spec(std::vector<double> coeffs);
FunctionSpec sampled_spec(GridSignal grid);

} // namespace bht
