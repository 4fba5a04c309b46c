#include "bhtlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace bht {

namespace {

// 15-point Kronrod nodes on [-1,1] with the embedded 7-point Gauss rule.
// Values from the QUADPACK QK15 tables.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double err;
    bool at_floor; // too narrow to subdivide further in double precision
};

struct PanelOrder {
    bool operator()(const Panel& lhs, const Panel& rhs) const {
        if (lhs.at_floor != rhs.at_floor) return lhs.at_floor; // floored panels sink
        if (lhs.err != rhs.err) return lhs.err < rhs.err;
        return lhs.a > rhs.a; // deterministic tie-break
    }
};

Panel gk15(const RealFn& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double halfw = 0.5 * (b - a);

    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    double resabs = std::fabs(fc) * kWgk[7];

    double fv[15];
    fv[7] = fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = halfw * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        result_kronrod += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) // odd-index Kronrod points are the Gauss points
            result_gauss += kWg[j / 2] * (f1 + f2);
    }

    const double mean = result_kronrod * 0.5;
    double resasc = kWgk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));

    const double value = result_kronrod * halfw;
    resabs *= std::fabs(halfw);
    resasc *= std::fabs(halfw);

    double err = std::fabs((result_kronrod - result_gauss) * halfw);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50)
        err = std::max(err, eps50 * resabs);

    const double width_floor =
        64.0 * std::numeric_limits<double>::epsilon() *
        std::max({std::fabs(a), std::fabs(b), 1.0});
    return Panel{a, b, value, err, (b - a) <= width_floor};
}

double kahan_sum_of_values(std::vector<Panel>& panels) {
    std::sort(panels.begin(), panels.end(),
              [](const Panel& l, const Panel& r) { return l.a < r.a; });
    double sum = 0.0, comp = 0.0;
    for (const Panel& p : panels) {
        const double y = p.value - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace

QuadResult integrate_segments(const RealFn& h, const std::vector<double>& breakpoints,
                              const QuadConfig& cfg) {
    cfg.validate();
    if (breakpoints.size() < 2)
        throw ParamError("integrate_segments: need at least two breakpoints");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw ParamError("integrate_segments: breakpoints must be strictly increasing");

    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> heap;
    long evals = 0;
    double total_val = 0.0, total_err = 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        Panel p = gk15(h, breakpoints[i - 1], breakpoints[i]);
        evals += 15;
        total_val += p.value;
        total_err += p.err;
        heap.push(p);
    }

    int splits = 0;
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total_val))) {
        const Panel worst = heap.top();
        if (worst.at_floor)
            break; // every remaining panel is at the rounding floor
        if (splits >= cfg.max_subdivisions) {
            std::vector<Panel> all;
            all.reserve(heap.size());
            while (!heap.empty()) { all.push_back(heap.top()); heap.pop(); }
            const double best = kahan_sum_of_values(all);
            throw AccuracyError("integrate_segments: subdivision budget exhausted",
                                best, total_err);
        }
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(h, worst.a, mid);
        Panel right = gk15(h, mid, worst.b);
        evals += 30;
        ++splits;
        total_val += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }

    std::vector<Panel> all;
    all.reserve(heap.size());
    while (!heap.empty()) { all.push_back(heap.top()); heap.pop(); }
    double final_err = 0.0;
    for (const Panel& p : all) final_err += p.err;
    return QuadResult{kahan_sum_of_values(all), final_err, evals};
}

QuadResult integrate_adaptive(const RealFn& h, double a, double b, const QuadConfig& cfg) {
    if (!(a < b))
        throw ParamError("integrate_adaptive: require a < b");
    if (!std::isfinite(a) || !std::isfinite(b))
        throw ParamError("integrate_adaptive: endpoints must be finite");
    return integrate_segments(h, {a, b}, cfg);
}

QuadResult pv_symmetric(const RealFn& h, double eps, double R, const QuadConfig& cfg) {
    if (!(eps > 0.0) || !(eps < R))
        throw ParamError("pv_symmetric: require 0 < eps < R");
    auto odd_part = [&h](double t) { return (h(t) - h(-t)) / t; };
    return integrate_segments(odd_part, geometric_breakpoints(eps, R), cfg);
}

double tail_radius(const Decay& decay, double tol) {
    if (!(tol > 0.0))
        throw ParamError("tail_radius: tol must be positive");
    switch (decay.kind) {
    case DecayClass::Gaussian: {
        const double w = decay.param;
        if (!(w > 0.0))
            throw ParamError("tail_radius: gaussian width must be positive");
        // exp(-(R/w)^2) <= tol at u = sqrt(ln 1/tol); +1 width absorbs
        // polynomial prefactors of the actual tail integrals.
        const double u = std::sqrt(std::log(1.0 / tol));
        return w * (u + 1.0);
    }
    case DecayClass::Rational: {
        const double q = decay.param;
        if (q <= 1.0)
            throw TailError("tail_radius: rational decay with power <= 1 has no "
                            "integrable tail; use the symmetric-limit convention");
        // integral_R^inf t^-q dt = R^(1-q)/(q-1) <= tol
        return std::pow(1.0 / ((q - 1.0) * tol), 1.0 / (q - 1.0));
    }
    case DecayClass::Compact:
        if (!(decay.param >= 0.0))
            throw ParamError("tail_radius: compact support must be >= 0");
        return decay.param + 1.0;
    }
    throw ParamError("tail_radius: unknown decay class");
}

std::vector<double> geometric_breakpoints(double first, double last) {
    if (!(first > 0.0) || !(first < last))
        throw ParamError("geometric_breakpoints: require 0 < first < last");
    std::vector<double> pts;
    pts.push_back(first);
    double p = first;
    while (p * 2.0 < last && pts.size() < 200) {
        p *= 2.0;
        pts.push_back(p);
    }
    pts.push_back(last);
    return pts;
}

} // namespace bht
