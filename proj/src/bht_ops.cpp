#include "bhtlab/bht_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bht {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlphaMargin = 1e-9;

RealFn pair_integrand(const RealFn& f, const RealFn& g, double x, double alpha) {
    return [f, g, x, alpha](double t) { return f(x - t) * g(x + alpha * t); };
}

// Breakpoints in u for integrals of h(eps tan u) over [0, pi/2]: the graded
// tail resolves the drop-off of decaying h, which sits at pi/2 - O(eps/R_h).
std::vector<double> tangent_breakpoints() {
    std::vector<double> pts{0.0, 0.25 * kPi};
    for (double d = 1e-2; d >= 1e-14; d *= 1e-2)
        pts.push_back(0.5 * kPi * (1.0 - d));
    pts.push_back(0.5 * kPi);
    return pts;
}

// Full symmetric-limit Poisson integral of h at height eps:
//   integral over R of h(t) eps/(t^2+eps^2) dt
// evaluated through t = eps tan(u) and the even-part reduction, with an
// optional constant subtracted from the even part (for residual forms).
QuadResult poisson_full(const RealFn& h, double eps, double subtract,
                        const QuadConfig& cfg) {
    auto even_part = [&h, eps, subtract](double u) {
        const double t = eps * std::tan(u);
        return h(t) + h(-t) - 2.0 * subtract;
    };
    return integrate_segments(even_part, tangent_breakpoints(), cfg);
}

} // namespace

void validate_alpha(double alpha) {
    if (!std::isfinite(alpha) || std::fabs(alpha) <= kAlphaMargin ||
        std::fabs(alpha + 1.0) <= kAlphaMargin)
        throw ParamError("alpha must stay away from 0 and -1");
}

void BhtParams::validate() const {
    validate_alpha(alpha);
    if (!(eps > 0.0) || !(eps < radius))
        throw ParamError("BhtParams: require 0 < eps < radius");
    quad.validate();
}

EvalResult bht_truncated(const RealFn& f, const RealFn& g, double x, const BhtParams& p) {
    p.validate();
    const QuadResult r = pv_symmetric(pair_integrand(f, g, x, p.alpha), p.eps, p.radius, p.quad);
    return {r.value, r.err_est};
}

ComplexResult bht_regularized(const RealFn& f, const RealFn& g, double x, const BhtParams& p) {
    p.validate();
    const RealFn h = pair_integrand(f, g, x, p.alpha);
    const double eps = p.eps;

    auto odd_smoothed = [&h, eps](double t) {
        return (h(t) - h(-t)) * t / (t * t + eps * eps);
    };
    std::vector<double> pts = geometric_breakpoints(eps, p.radius);
    pts.insert(pts.begin(), 0.0);
    const QuadResult re = integrate_segments(odd_smoothed, pts, p.quad);

    const QuadResult im = poisson_full(h, eps, 0.0, p.quad);

    ComplexResult out;
    out.value = {re.value, -im.value};
    out.re_err = re.err_est;
    out.im_err = im.err_est;
    return out;
}

EvalResult poisson_residual(const RealFn& f, const RealFn& g, double x, double alpha,
                            double eps, const QuadConfig& quad) {
    validate_alpha(alpha);
    if (!(eps > 0.0))
        throw ParamError("poisson_residual: eps must be positive");
    const double target = f(x) * g(x);
    const QuadResult r = poisson_full(pair_integrand(f, g, x, alpha), eps, target, quad);
    return {r.value, r.err_est};
}

EvalResult regularization_gap(const RealFn& f, const RealFn& g, double x, double alpha,
                              double eps, double radius, const QuadConfig& quad) {
    validate_alpha(alpha);
    if (!(eps > 0.0) || !(eps < radius))
        throw ParamError("regularization_gap: require 0 < eps < radius");
    const RealFn h = pair_integrand(f, g, x, alpha);
    // Substituting t = eps*s turns the gap into the pairing with the unscaled
    // pv_gap kernel on |s| <= radius/eps, matching the truncation of both
    // pieces exactly.
    auto integrand = [&h, eps](double s) {
        return (h(eps * s) - h(-eps * s)) * pv_gap_phi(s);
    };
    const double S = radius / eps; // > 1 since eps < radius
    std::vector<double> pts = geometric_breakpoints(1.0, S);
    pts.insert(pts.begin(), 0.0);
    const QuadResult r = integrate_segments(integrand, pts, quad);
    return {r.value, r.err_est};
}

EvalResult mollifier_pair(const RealFn& f, const RealFn& g, double x, double alpha,
                          const Kernel& k, double eps, const QuadConfig& quad) {
    validate_alpha(alpha);
    if (!(eps > 0.0))
        throw ParamError("mollifier_pair: eps must be positive");
    if (!k.phi)
        throw ConfigError("mollifier_pair: kernel has no phi");
    const RealFn h = pair_integrand(f, g, x, alpha);

    if (k.kind == KernelKind::Poisson) {
        const QuadResult r = poisson_full(h, eps, 0.0, quad);
        return {r.value / kPi, r.err_est / kPi};
    }

    // Unscaled variable s = t/eps:  integral of h(eps s) phi(s) ds.
    const RealFn phi = k.phi;

    if (k.kind == KernelKind::CustomTable) {
        const double S = k.psi_tail_coeff; // support radius
        auto integrand = [&h, &phi, eps](double s) { return h(eps * s) * phi(s); };
        const QuadResult r = integrate_segments(
            integrand, {-S, -0.5 * S, 0.0, 0.5 * S, S}, quad);
        return {r.value, r.err_est};
    }

    // pv_gap (odd): reduce to the half line; truncate where the majorant
    // tail falls below tolerance, charging the bound to err_est.
    double h_bound = 1.0;
    for (double probe : {0.0, eps, -eps, 1.0, -1.0, 5.0, -5.0, 25.0, -25.0})
        h_bound = std::max(h_bound, std::fabs(h(probe)));
    const double tail_tol = std::max(quad.abs_tol, 1e-14);
    const double S = std::sqrt(h_bound / tail_tol);
    auto integrand = [&h, &phi, eps](double s) { return (h(eps * s) - h(-eps * s)) * phi(s); };
    std::vector<double> pts = geometric_breakpoints(1.0, S);
    pts.insert(pts.begin(), 0.0);
    QuadResult r = integrate_segments(integrand, pts, quad);
    r.err_est += h_bound / (S * S);
    return {r.value, r.err_est};
}

namespace {

ConvergenceReport assemble_report(const std::vector<double>& ladder,
                                  std::vector<ComplexValue> values) {
    ConvergenceReport rep;
    rep.eps_ladder = ladder;
    rep.values = std::move(values);

    std::vector<double> res(rep.values.size()), ims(rep.values.size());
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
        res[i] = rep.values[i].re;
        ims[i] = rep.values[i].im;
    }
    const Extrapolation ex_re = extrapolate(ladder, res);
    const Extrapolation ex_im = extrapolate(ladder, ims);
    rep.extrapolated = {ex_re.limit, ex_im.limit};
    rep.extrapolation_ok = ex_re.reliable && ex_im.reliable;
    if (!rep.extrapolation_ok)
        rep.flag = "unreliable-extrapolation";

    rep.residuals.resize(ladder.size());
    std::vector<double> dist(ladder.size());
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double e = ladder[i];
        const double mr = ex_re.limit + ex_re.a1 * e + ex_re.a2 * e * e - res[i];
        const double mi = ex_im.limit + ex_im.a1 * e + ex_im.a2 * e * e - ims[i];
        rep.residuals[i] = std::hypot(mr, mi);
        dist[i] = std::hypot(res[i] - ex_re.limit, ims[i] - ex_im.limit);
    }
    const RateFit rate = fit_rate(ladder, dist);
    rep.fitted_rate = rate.degenerate ? 0.0 : rate.slope;
    return rep;
}

} // namespace

ConvergenceReport bht_pv(const RealFn& f, const RealFn& g, double x, double alpha,
                         const std::vector<double>& eps_ladder, double radius,
                         const QuadConfig& quad) {
    std::vector<ComplexValue> values;
    values.reserve(eps_ladder.size());
    for (double eps : eps_ladder) {
        BhtParams p{alpha, eps, radius, quad};
        values.push_back({bht_truncated(f, g, x, p).value, 0.0});
    }
    return assemble_report(eps_ladder, std::move(values));
}

InversionResult invert_product(const RealFn& f, const RealFn& g, double x, double alpha,
                               const std::vector<double>& eps_ladder, double radius,
                               const QuadConfig& quad, double imag_tol) {
    std::vector<ComplexValue> values;
    values.reserve(eps_ladder.size());
    for (double eps : eps_ladder) {
        BhtParams p{alpha, eps, radius, quad};
        const ComplexResult reg = bht_regularized(f, g, x, p);
        const EvalResult tr = bht_truncated(f, g, x, p);
        // (i/pi) * ((reg.re - tr) + i reg.im)
        values.push_back({-reg.value.im / kPi, (reg.value.re - tr.value) / kPi});
    }
    InversionResult out;
    out.report = assemble_report(eps_ladder, std::move(values));
    out.recovered = out.report.extrapolated.re;
    out.imag_residue = out.report.extrapolated.im;
    out.inversion_ok =
        out.report.extrapolation_ok && std::fabs(out.imag_residue) <= imag_tol;
    if (!out.inversion_ok && out.report.flag.empty())
        out.report.flag = "imaginary-residue-above-tolerance";
    return out;
}

double default_truncation_radius(const FunctionSpec& f, const FunctionSpec& g,
                                 double alpha, double x, double tol) {
    validate_alpha(alpha);
    if (!(tol > 0.0))
        throw ParamError("default_truncation_radius: tol must be positive");

    auto candidate = [tol](const FunctionSpec& s, double offset, double scale)
        -> std::optional<double> {
        const auto decay = decay_class(s);
        if (!decay)
            return std::nullopt;
        double radius;
        switch (decay->kind) {
        case DecayClass::Gaussian:
            radius = tail_radius(*decay, tol);
            break;
        case DecayClass::Rational:
            // fold the 1/t kernel into the tail: envelope ~ (w/t)^q / t
            radius = std::pow(std::pow(s.width, decay->param) / (decay->param * tol),
                              1.0 / decay->param);
            break;
        case DecayClass::Compact:
            radius = decay->param + 1.0;
            break;
        default:
            return std::nullopt;
        }
        return (offset + radius) / scale;
    };

    const auto cf = candidate(f, std::fabs(x - f.center), 1.0);
    const auto cg = candidate(g, std::fabs(x - g.center), std::fabs(alpha));
    double r;
    if (cf && cg)
        r = std::min(*cf, *cg);
    else if (cf)
        r = *cf;
    else if (cg)
        r = *cg;
    else
        r = 64.0; // nothing decays; symmetric-limit convention covers these
    return std::max({r, 8.0, 2.0 * std::fabs(x) + 4.0});
}

namespace {

void check_bad_points(const FunctionSpec& f, const FunctionSpec& g, double x) {
    if (f.is_bad_point(x) || g.is_bad_point(x))
        throw ParamError("x is a known bad point of an input function");
}

} // namespace

ConvergenceReport bht_pv(const FunctionSpec& f, const FunctionSpec& g, double x,
                         double alpha, const std::vector<double>& eps_ladder,
                         const QuadConfig& quad) {
    check_bad_points(f, g, x);
    const double radius = quad.tail_radius > 0.0 ? quad.tail_radius
                                                 : default_truncation_radius(f, g, alpha, x);
    return bht_pv(make_function(f), make_function(g), x, alpha, eps_ladder, radius, quad);
}

InversionResult invert_product(const FunctionSpec& f, const FunctionSpec& g, double x,
                               double alpha, const std::vector<double>& eps_ladder,
                               const QuadConfig& quad, double imag_tol) {
    check_bad_points(f, g, x);
    const double radius = quad.tail_radius > 0.0 ? quad.tail_radius
                                                 : default_truncation_radius(f, g, alpha, x);
    return invert_product(make_function(f), make_function(g), x, alpha, eps_ladder,
                          radius, quad, imag_tol);
}

} // namespace bht
