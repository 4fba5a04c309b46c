#include "bhtlab/lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bhtlab/rates.hpp"

namespace bht {

double theta(const RealFn& f, double x, double r, double p, const QuadConfig& quad) {
    if (!(r > 0.0))
        throw ParamError("theta: r must be positive");
    if (!(p >= 1.0))
        throw ParamError("theta: p must be >= 1");
    const double fx = f(x);
    auto integrand = [&f, x, fx, p](double t) {
        return std::pow(std::fabs(f(x - t) - fx), p);
    };
    // Split at t = 0: the shifted value hits f(x) there, and jump-type
    // integrands switch branch.
    const QuadResult q = integrate_segments(integrand, {-r, 0.0, r}, quad);
    return q.value / r;
}

ThetaProfile lebesgue_profile(const RealFn& f, double x, double p,
                              const std::vector<double>& radii,
                              const LebesgueThresholds& thresholds,
                              const QuadConfig& quad) {
    if (radii.size() < 6)
        throw ParamError("lebesgue_profile: need at least 6 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] < radii[i - 1]))
            throw ParamError("lebesgue_profile: radii must be strictly decreasing");

    ThetaProfile profile;
    profile.p = p;
    profile.x = x;
    profile.radii = radii;
    profile.theta.reserve(radii.size());
    bool quad_failed = false;
    for (double r : radii) {
        try {
            profile.theta.push_back(theta(f, x, r, p, quad));
        } catch (const AccuracyError& e) {
            profile.theta.push_back(e.best_estimate);
            quad_failed = true;
        }
    }

    const RateFit fit = fit_rate(radii, profile.theta);
    profile.fitted_slope = fit.degenerate ? 0.0 : fit.slope;
    profile.r_squared = fit.degenerate ? 0.0 : fit.r_squared;

    if (quad_failed) {
        profile.classification = LebesgueClass::Inconclusive;
        return profile;
    }

    const std::size_t n = profile.theta.size();
    bool tail_decreasing = true;
    for (std::size_t i = n - 3; i < n; ++i)
        if (!(profile.theta[i] < profile.theta[i - 1] + kRateFloor))
            tail_decreasing = false;

    const double final_theta = profile.theta.back();
    const bool all_converged =
        std::all_of(profile.theta.begin(), profile.theta.end(),
                    [](double v) { return v <= kRateFloor; });

    if (all_converged ||
        (tail_decreasing && final_theta < thresholds.point_theta_max &&
         (fit.degenerate || profile.fitted_slope > thresholds.point_slope_min)))
        profile.classification = LebesgueClass::LebesguePoint;
    else if (!fit.degenerate && std::fabs(profile.fitted_slope) < thresholds.flat_slope_max &&
             final_theta > thresholds.not_theta_min)
        profile.classification = LebesgueClass::NotLebesgue;
    else
        profile.classification = LebesgueClass::Inconclusive;
    return profile;
}

double check_nesting(const RealFn& f, double x, double r, double p1, double p2,
                     const QuadConfig& quad) {
    if (!(p2 >= 1.0) || !(p2 <= p1))
        throw ParamError("check_nesting: require 1 <= p2 <= p1");
    const double t1 = theta(f, x, r, p1, quad);
    const double t2 = theta(f, x, r, p2, quad);
    const double ratio = p2 / p1;
    return std::pow(2.0, 1.0 - ratio) * std::pow(t1, ratio) - t2;
}

double ProductMargins::min_margin() const {
    return std::min({split_margin, i_margin, j_margin});
}

ProductMargins check_product(const RealFn& f, const RealFn& g, double x, double r,
                             double p1, double p2, const QuadConfig& quad) {
    if (!(p1 >= 1.0) || !(p2 >= 1.0))
        throw ParamError("check_product: exponents must be >= 1");
    const double inv_sum = 1.0 / p1 + 1.0 / p2;
    if (inv_sum > 1.0 + 1e-12)
        throw ParamError("check_product: 1/p1 + 1/p2 must be <= 1");
    const bool conjugate = std::fabs(inv_sum - 1.0) <= 1e-12;

    const double fx = f(x), gx = g(x);
    auto product = [&f, &g](double u) { return f(u) * g(u); };

    ProductMargins m;
    if (conjugate) {
        m.regime = ProductRegime::Conjugate;
        m.p3 = 1.0;
        m.theta_product = theta(product, x, r, 1.0, quad);

        auto i_fn = [&f, &g, x, fx](double t) {
            return std::fabs(f(x - t) - fx) * std::fabs(g(x - t));
        };
        m.i_actual = integrate_segments(i_fn, {-r, 0.0, r}, quad).value / r;
        m.j_actual = std::fabs(fx) * theta(g, x, r, 1.0, quad);

        const double tf = theta(f, x, r, p1, quad);
        const double tg = theta(g, x, r, p2, quad);
        m.i_bound = std::pow(tf, 1.0 / p1) *
                    (std::pow(tg, 1.0 / p2) + std::fabs(gx) * std::pow(2.0, 1.0 / p2));
        m.j_bound = std::fabs(fx) * std::pow(2.0, 1.0 - 1.0 / p2) * std::pow(tg, 1.0 / p2);
        m.split_margin = (m.i_actual + m.j_actual) - m.theta_product;
    } else {
        m.regime = ProductRegime::Split;
        const double p3 = 1.0 / inv_sum;
        m.p3 = p3;
        m.theta_product = theta(product, x, r, p3, quad);

        auto i_fn = [&f, &g, x, gx, p3](double t) {
            return std::pow(std::fabs(g(x - t) - gx), p3) *
                   std::pow(std::fabs(f(x - t)), p3);
        };
        m.i_actual = integrate_segments(i_fn, {-r, 0.0, r}, quad).value / r;
        m.j_actual = std::pow(std::fabs(gx), p3) * theta(f, x, r, p3, quad);

        const double tf = theta(f, x, r, p1, quad);
        const double tg = theta(g, x, r, p2, quad);
        m.i_bound = (std::pow(tf, p3 / p1) +
                     std::pow(2.0, p3 / p1) * std::pow(std::fabs(fx), p3)) *
                    std::pow(tg, p3 / p2);
        m.j_bound = std::pow(std::fabs(gx), p3) * std::pow(2.0, 1.0 - p3 / p1) *
                    std::pow(tf, p3 / p1);
        m.split_margin =
            std::pow(2.0, p3 - 1.0) * (m.i_actual + m.j_actual) - m.theta_product;
    }
    m.i_margin = m.i_bound - m.i_actual;
    m.j_margin = m.j_bound - m.j_actual;
    return m;
}

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0)
        throw ParamError("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::plus(const Rational& other) const {
    return Rational(num * other.den + other.num * den, den * other.den);
}

Rational Rational::reciprocal() const {
    if (num == 0)
        throw ParamError("Rational: reciprocal of zero");
    return Rational(den, num);
}

MultiProductReport check_multi_product(const std::vector<RealFn>& fs,
                                       const std::vector<long long>& ps, double x,
                                       double r, const QuadConfig& quad) {
    if (fs.size() < 2 || fs.size() != ps.size())
        throw ParamError("check_multi_product: need n >= 2 functions with exponents");
    Rational inv_sum(0, 1);
    for (long long p : ps) {
        if (p < 1)
            throw ParamError("check_multi_product: exponents must be >= 1");
        inv_sum = inv_sum.plus(Rational(1, p));
    }
    if (inv_sum.to_double() > 1.0)
        throw ParamError("check_multi_product: sum of 1/p_i must be <= 1");

    MultiProductReport rep;
    RealFn acc = fs[0];
    Rational inv_q(1, ps[0]);
    for (std::size_t i = 1; i < fs.size(); ++i) {
        inv_q = inv_q.plus(Rational(1, ps[i]));
        const Rational q = inv_q.reciprocal();
        rep.exponent_chain.push_back(q);
        rep.steps.push_back(check_product(acc, fs[i], x, r,
                                          i == 1 ? double(ps[0])
                                                 : rep.exponent_chain[i - 2].to_double(),
                                          double(ps[i]), quad));
        const RealFn prev = acc;
        const RealFn next = fs[i];
        acc = [prev, next](double u) { return prev(u) * next(u); };
    }
    rep.final_exponent = rep.exponent_chain.back();
    rep.theta_final = theta(acc, x, r, rep.final_exponent.to_double(), quad);
    return rep;
}

SupOscillationSurrogate sup_oscillation_surrogate(const RealFn& f, double x,
                                                  const std::vector<double>& radii,
                                                  const LebesgueThresholds& thresholds,
                                                  const QuadConfig& quad) {
    SupOscillationSurrogate s;
    s.p8 = lebesgue_profile(f, x, 8.0, radii, thresholds, quad);
    const double fx = f(x);
    s.oscillation.reserve(radii.size());
    for (double r : radii) {
        double osc = 0.0;
        for (int i = -64; i <= 64; ++i) {
            const double t = r * static_cast<double>(i) / 64.0;
            osc = std::max(osc, std::fabs(f(x - t) - fx));
        }
        s.oscillation.push_back(osc);
    }
    s.satisfied = s.p8.classification == LebesgueClass::LebesguePoint &&
                  s.oscillation.back() < thresholds.point_theta_max;
    return s;
}

} // namespace bht
