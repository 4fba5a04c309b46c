#include "bhtlab/dual_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bht {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

void TestPairing::validate() const {
    psi.validate();
    if (!(support_radius > 0.0))
        throw ConfigError("TestPairing: support radius must be positive");
    const RealFn fn = make_function(psi);
    for (int i = 0; i < 16; ++i) {
        const double x = support_radius * (1.0 + static_cast<double>(i) / 8.0);
        if (fn(x) != 0.0 || fn(-x) != 0.0)
            throw ConfigError("TestPairing: psi does not vanish outside its support");
    }
}

TestPairing smooth_bump_pairing(double support) {
    TestPairing p;
    p.psi = smooth_bump_spec(support);
    p.support_radius = support;
    p.pairing_quad.rel_tol = 1e-8;
    p.pairing_quad.abs_tol = 1e-10;
    p.validate();
    return p;
}

LeibnizResult leibniz_residual(const FunctionSpec& f, const FunctionSpec& g, double x,
                               double alpha, double eps, int m, const QuadConfig& quad) {
    if (m != 1 && m != 2)
        throw ParamError("leibniz_residual: m must be 1 or 2");
    validate_alpha(alpha);
    if (!(eps > 0.0))
        throw ParamError("leibniz_residual: eps must be positive");

    const double radius = default_truncation_radius(f, g, alpha, x);
    auto reg_at = [&](const RealFn& ff, const RealFn& gg, double xx) {
        BhtParams p{alpha, eps, radius, quad};
        return bht_regularized(ff, gg, xx, p);
    };

    const RealFn f0 = make_function(f);
    const RealFn g0 = make_function(g);
    const double h = eps / 10.0;

    ComplexValue lhs;
    double stencil_mag = 0.0;
    if (m == 1) {
        const ComplexResult a = reg_at(f0, g0, x + h);
        const ComplexResult b = reg_at(f0, g0, x - h);
        lhs = {(a.value.re - b.value.re) / (2.0 * h),
               (a.value.im - b.value.im) / (2.0 * h)};
        stencil_mag = std::hypot(a.value.re, a.value.im) + std::hypot(b.value.re, b.value.im);
        stencil_mag /= 2.0 * h;
    } else {
        const ComplexResult a = reg_at(f0, g0, x + h);
        const ComplexResult c = reg_at(f0, g0, x);
        const ComplexResult b = reg_at(f0, g0, x - h);
        lhs = {(a.value.re - 2.0 * c.value.re + b.value.re) / (h * h),
               (a.value.im - 2.0 * c.value.im + b.value.im) / (h * h)};
        stencil_mag = (std::hypot(a.value.re, a.value.im) +
                       2.0 * std::hypot(c.value.re, c.value.im) +
                       std::hypot(b.value.re, b.value.im)) /
                      (h * h);
    }

    ComplexValue rhs{0.0, 0.0};
    for (int k = 0; k <= m; ++k) {
        const double binom = (m == 1) ? 1.0 : (k == 1 ? 2.0 : 1.0);
        const ComplexResult term =
            reg_at(derivative_function(f, k), derivative_function(g, m - k), x);
        rhs.re += binom * term.value.re;
        rhs.im += binom * term.value.im;
    }

    LeibnizResult out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.residual = std::hypot(lhs.re - rhs.re, lhs.im - rhs.im);
    out.fd_noise_floor = 16.0 * std::numeric_limits<double>::epsilon() * stencil_mag;
    out.inconclusive = out.residual <= out.fd_noise_floor;
    return out;
}

WeakLimitResult weak_limit_residual(const FunctionSpec& f, const FunctionSpec& g,
                                    const TestPairing& pairing, double alpha, double eps) {
    pairing.validate();
    validate_alpha(alpha);
    if (!(eps > 0.0))
        throw ParamError("weak_limit_residual: eps must be positive");

    const RealFn f0 = make_function(f);
    const RealFn g0 = make_function(g);
    const RealFn psi = make_function(pairing.psi);
    const double s = pairing.support_radius;

    // Operator evaluations inside the x-quadrature run at tolerances two
    // decades tighter than the pairing itself.
    QuadConfig inner;
    inner.rel_tol = std::min(1e-9, pairing.pairing_quad.rel_tol * 1e-2);
    inner.abs_tol = std::min(1e-11, pairing.pairing_quad.abs_tol * 1e-2);

    auto bracket = [&](double x) -> ComplexValue {
        const double radius = default_truncation_radius(f, g, alpha, x);
        BhtParams p{alpha, eps, radius, inner};
        const ComplexResult reg = bht_regularized(f0, g0, x, p);
        const EvalResult tr = bht_truncated(f0, g0, x, p);
        return {reg.value.re - tr.value, reg.value.im + kPi * f0(x) * g0(x)};
    };

    auto re_fn = [&](double x) { return bracket(x).re * psi(x); };
    auto im_fn = [&](double x) { return bracket(x).im * psi(x); };
    const std::vector<double> pts{-s, -0.5 * s, 0.0, 0.5 * s, s};
    const QuadResult re = integrate_segments(re_fn, pts, pairing.pairing_quad);
    const QuadResult im = integrate_segments(im_fn, pts, pairing.pairing_quad);

    WeakLimitResult out;
    out.value = {re.value, im.value};
    out.err_est = re.err_est + im.err_est;
    return out;
}

namespace {

// ||fn||_p over [-w, w] via adaptive quadrature of |fn|^p.
double window_norm(const RealFn& fn, double w, double p, const QuadConfig& quad) {
    auto integrand = [&fn, p](double x) { return std::pow(std::fabs(fn(x)), p); };
    const QuadResult r =
        integrate_segments(integrand, {-w, -0.5 * w, 0.0, 0.5 * w, w}, quad);
    return std::pow(r.value, 1.0 / p);
}

} // namespace

NormProbeResult norm_probe(const FunctionSpec& f, const FunctionSpec& g, double alpha,
                           double p1, double p2, int refinement_levels) {
    validate_alpha(alpha);
    if (!(p1 >= 1.0) || !(p2 >= 1.0))
        throw ParamError("norm_probe: exponents must be >= 1");
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    if (!(p > 2.0 / 3.0))
        throw ParamError("norm_probe: require p > 2/3");
    if (refinement_levels < 1)
        throw ParamError("norm_probe: need at least one level");

    const auto is_zero = [](const FunctionSpec& s) {
        return s.kind == FnKind::Constant && s.value == 0.0;
    };
    if (is_zero(f) || is_zero(g)) {
        NormProbeResult out;
        out.grid_ratios.assign(refinement_levels, 0.0);
        return out;
    }
    if (!decay_class(f) || !decay_class(g))
        throw ParamError("norm_probe: inputs must decay");

    const double rf = tail_radius(*decay_class(f), 1e-8);
    const double rg = tail_radius(*decay_class(g), 1e-8);
    const double window =
        (std::max(std::fabs(f.center) + rf, std::fabs(g.center) + rg)) * (1.0 + std::fabs(alpha));

    QuadConfig quad;
    quad.rel_tol = 1e-8;
    quad.abs_tol = 1e-10;
    const RealFn f0 = make_function(f);
    const RealFn g0 = make_function(g);
    const double f_norm = window_norm(f0, std::fabs(f.center) + rf, p1, quad);
    const double g_norm = window_norm(g0, std::fabs(g.center) + rg, p2, quad);

    NormProbeResult out;
    out.f_norm = f_norm;
    out.g_norm = g_norm;
    if (f_norm == 0.0 || g_norm == 0.0) {
        out.ratio = 0.0;
        out.grid_ratios.assign(refinement_levels, 0.0);
        return out;
    }

    // H evaluated pointwise at a fixed small eps; composite Simpson in x on
    // refining grids gives the grid-convergence report.
    const double eps = 1e-5;
    auto transform_at = [&](double x) {
        const double radius =
            std::max(default_truncation_radius(f, g, alpha, x), 2.0 * eps);
        BhtParams prm{alpha, eps, radius, quad};
        return bht_truncated(f0, g0, x, prm).value;
    };

    int n = 64;
    for (int level = 0; level < refinement_levels; ++level, n *= 2) {
        const double dx = 2.0 * window / n;
        double sum = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = -window + dx * i;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            sum += w * std::pow(std::fabs(transform_at(x)), p);
        }
        const double norm = std::pow(sum * dx / 3.0, 1.0 / p);
        out.grid_ratios.push_back(norm / (f_norm * g_norm));
    }
    out.ratio = out.grid_ratios.back();
    out.transform_norm = out.ratio * f_norm * g_norm;
    if (out.grid_ratios.size() >= 2) {
        const double last = out.grid_ratios.back();
        const double prev = out.grid_ratios[out.grid_ratios.size() - 2];
        out.grid_rel_change = std::fabs(last - prev) / std::max(std::fabs(last), 1e-300);
    }
    return out;
}

} // namespace bht
