#pragma once

#include <cstdint>
#include <vector>

#include "bhtlab/catalog.hpp"
#include "bhtlab/quadrature.hpp"

namespace bht {

enum class LebesgueClass { LebesguePoint, NotLebesgue, Inconclusive };

/// Classification thresholds (desk-scale separability of the catalog's
/// known cases).
struct LebesgueThresholds {
    double point_theta_max = 1e-3; ///< final theta below this for lebesgue_point
    double point_slope_min = 0.2;
    double flat_slope_max = 0.05; ///< |slope| below this counts as flat
    double not_theta_min = 1e-2;  ///< flat and above this -> not_lebesgue
};

/// theta values over a radius ladder with fitted decay slope.
struct ThetaProfile {
    double p = 1.0;
    double x = 0.0;
    std::vector<double> radii;
    std::vector<double> theta;
    double fitted_slope = 0.0;
    double r_squared = 0.0;
    LebesgueClass classification = LebesgueClass::Inconclusive;
};

/// Local p-mean oscillation  (1/r) integral over |t| < r of |f(x-t) - f(x)|^p dt.
double theta(const RealFn& f, double x, double r, double p, const QuadConfig& quad = {});

/// theta ladder with log-log slope and classification. Radii must be
/// strictly decreasing with at least 6 entries.
ThetaProfile lebesgue_profile(const RealFn& f, double x, double p,
                              const std::vector<double>& radii,
                              const LebesgueThresholds& thresholds = {},
                              const QuadConfig& quad = {});

/// Exponent-nesting margin  2^(1-p2/p1) theta_p1^(p2/p1) - theta_p2  for
/// 1 <= p2 <= p1; the Hoelder step guarantees margin >= 0 up to quadrature
/// error. The explicit constant comes from (integral of dt over |t|<r)^(1/q) = (2r)^(1/q).
double check_nesting(const RealFn& f, double x, double r, double p1, double p2,
                     const QuadConfig& quad = {});

enum class ProductRegime { Conjugate, Split };

/// Bound-vs-actual margins for the product oscillation estimate.
///
/// Conjugate regime (1/p1 + 1/p2 = 1, p3 = 1):
///   theta_1(fg) <= I + J,
///   I = (1/r) integral |f(x-t)-f(x)| |g(x-t)| dt
///     <= theta_p1(f)^(1/p1) [theta_p2(g)^(1/p2) + |g(x)| 2^(1/p2)]
///   J = |f(x)| theta_1(g) <= |f(x)| 2^(1-1/p2) theta_p2(g)^(1/p2)
///
/// Split regime (1/p1 + 1/p2 = 1/p3 < 1): the top-level split carries the
/// convexity factor 2^(p3-1) (required for p3 > 1):
///   theta_p3(fg) <= 2^(p3-1) (I + J),
///   I = (1/r) integral |g(x-t)-g(x)|^p3 |f(x-t)|^p3 dt
///     <= [theta_p1(f)^(p3/p1) + 2^(p3/p1) |f(x)|^p3] theta_p2(g)^(p3/p2)
///   J = |g(x)|^p3 theta_p3(f) <= |g(x)|^p3 2^(1-p3/p1) theta_p1(f)^(p3/p1)
struct ProductMargins {
    ProductRegime regime = ProductRegime::Conjugate;
    double p3 = 1.0;
    double theta_product = 0.0; ///< theta_p3 of fg, computed directly
    double i_actual = 0.0;
    double j_actual = 0.0;
    double i_bound = 0.0;
    double j_bound = 0.0;
    double split_margin = 0.0; ///< (2^(p3-1))(I+J) - theta_product
    double i_margin = 0.0;     ///< i_bound - i_actual
    double j_margin = 0.0;     ///< j_bound - j_actual
    double min_margin() const;
};

ProductMargins check_product(const RealFn& f, const RealFn& g, double x, double r,
                             double p1, double p2, const QuadConfig& quad = {});

/// Exact rational exponent used by the multi-product bookkeeping.
struct Rational {
    long long num = 0;
    long long den = 1;
    Rational() = default;
    Rational(long long n, long long d);
    Rational plus(const Rational& other) const;
    Rational reciprocal() const;
    bool operator==(const Rational& other) const {
        return num == other.num && den == other.den;
    }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Iterated pairwise product reduction: combines f1 f2, then multiplies in
/// f3, ..., tracking the intermediate exponents 1/q_k = 1/q_(k-1) + 1/p_(k+1)
/// in exact rational arithmetic. Requires sum of 1/p_i <= 1 and n >= 2.
struct MultiProductReport {
    std::vector<Rational> exponent_chain; ///< q_1 ... q_(n-1)
    Rational final_exponent;              ///< q_(n-1) = 1 / sum(1/p_i)
    double theta_final = 0.0;             ///< theta_(q_(n-1)) of the full product
    std::vector<ProductMargins> steps;
};

MultiProductReport check_multi_product(const std::vector<RealFn>& fs,
                                       const std::vector<long long>& ps, double x,
                                       double r, const QuadConfig& quad = {});

/// Surrogate for the sup-norm Lebesgue condition: the p = 8 profile must
/// classify as lebesgue_point and the max local oscillation over the sample
/// grid must tend to 0 along the radius ladder.
struct SupOscillationSurrogate {
    ThetaProfile p8;
    std::vector<double> oscillation; ///< max |f(x-t)-f(x)| per radius
    bool satisfied = false;
};

SupOscillationSurrogate sup_oscillation_surrogate(const RealFn& f, double x,
                                                  const std::vector<double>& radii,
                                                  const LebesgueThresholds& thresholds = {},
                                                  const QuadConfig& quad = {});

} // namespace bht
