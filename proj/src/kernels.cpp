#include "bhtlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bht {

double pv_gap_phi(double t) {
    if (t == 0.0)
        return 0.0;
    const double smooth = t / (t * t + 1.0);
    if (std::fabs(t) >= 1.0)
        return smooth - 1.0 / t;
    return smooth;
}

namespace {

double pv_gap_psi(double x) {
    const double ax = std::fabs(x);
    // |phi| = 1/(|t|(t^2+1)) on the outer branch, peaking at 1/2 at |t|=1;
    // the inner branch also peaks at 1/2 there.
    if (ax <= 1.0)
        return 0.5;
    return 1.0 / (ax * (ax * ax + 1.0));
}

double numeric_majorant(const RealFn& phi, double x) {
    // sup of |phi| over |t| >= |x|, log-spaced scan with two refinements.
    const double lo = std::max(std::fabs(x), 1e-12);
    double hi = std::max(lo * 2.0, 64.0);
    // extend until |phi| looks decayed
    while (std::fabs(phi(hi)) + std::fabs(phi(-hi)) > 1e-14 && hi < 1e9)
        hi *= 4.0;
    if (hi >= 1e9)
        throw TailError("majorant_psi: phi does not decay; majorant not integrable");

    double best = std::max(std::fabs(phi(lo)), std::fabs(phi(-lo)));
    double best_t = lo;
    const int n = 512;
    const double ratio = std::pow(hi / lo, 1.0 / n);
    double t = lo;
    for (int i = 0; i <= n; ++i) {
        const double v = std::max(std::fabs(phi(t)), std::fabs(phi(-t)));
        if (v > best) {
            best = v;
            best_t = t;
        }
        t *= ratio;
    }
    // local refinement around the best sample
    double a = best_t / ratio, b = best_t * ratio;
    for (int pass = 0; pass < 2; ++pass) {
        const double step = (b - a) / 64.0;
        for (double u = a; u <= b; u += step) {
            const double v = std::max(std::fabs(phi(u)), std::fabs(phi(-u)));
            if (v > best) {
                best = v;
                best_t = u;
            }
        }
        a = std::max(lo, best_t - step);
        b = best_t + step;
    }
    return best;
}

} // namespace

Kernel pv_gap_kernel() {
    Kernel k;
    k.kind = KernelKind::PvGap;
    k.integral = 0.0;
    k.parity = Parity::Odd;
    k.phi = [](double t) { return pv_gap_phi(t); };
    k.psi = [](double x) { return pv_gap_psi(x); };
    k.psi_tail_power = 3.0;
    k.psi_tail_coeff = 1.0;
    return k;
}

Kernel poisson_kernel() {
    Kernel k;
    k.kind = KernelKind::Poisson;
    k.integral = 1.0;
    k.parity = Parity::Even;
    k.phi = [](double t) { return 1.0 / (std::numbers::pi * (1.0 + t * t)); };
    k.psi = [](double x) { return 1.0 / (std::numbers::pi * (1.0 + x * x)); };
    k.psi_tail_power = 2.0;
    k.psi_tail_coeff = 1.0 / std::numbers::pi;
    return k;
}

Kernel custom_table_kernel(const GridSignal& table, Parity parity) {
    table.validate();
    Kernel k;
    k.kind = KernelKind::CustomTable;
    k.parity = parity;
    const FunctionSpec spec = sampled_spec(table);
    k.phi = make_function(spec);
    const RealFn phi = k.phi;
    k.psi = [phi](double x) { return numeric_majorant(phi, x); };
    const double support = std::max(std::fabs(table.x0), std::fabs(table.x_last()));
    k.psi_tail_power = 0.0; // compact: psi vanishes beyond the support
    k.psi_tail_coeff = support;
    QuadConfig cfg;
    k.integral = integrate_adaptive(k.phi, table.x0, table.x_last(), cfg).value;
    return k;
}

double majorant_psi(const Kernel& k, double x) {
    if (!k.psi)
        throw ConfigError("majorant_psi: kernel has no majorant");
    return k.psi(x);
}

double majorant_integral(const Kernel& k, double tol) {
    double hi;
    double tail;
    if (k.kind == KernelKind::CustomTable) {
        hi = k.psi_tail_coeff + 1.0;
        tail = 0.0;
    } else {
        if (k.psi_tail_power <= 1.0)
            throw TailError("majorant_integral: psi tail not integrable");
        // integral_S^inf c/t^p dt = c S^(1-p)/(p-1) <= tol/2 per side
        const double p = k.psi_tail_power;
        hi = std::pow(2.0 * k.psi_tail_coeff / ((p - 1.0) * tol),
                      1.0 / (p - 1.0));
        hi = std::max(hi, 4.0);
        tail = 2.0 * k.psi_tail_coeff * std::pow(hi, 1.0 - p) / (p - 1.0);
    }
    QuadConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = std::min(tol / 4.0, 1e-13);
    cfg.max_subdivisions = 4000;
    auto psi_abs = [&k](double t) { return k.psi(t); };
    const QuadResult r =
        integrate_segments(psi_abs, geometric_breakpoints(std::min(1.0, hi / 2.0), hi), cfg);
    QuadResult head = integrate_adaptive(psi_abs, 0.0, std::min(1.0, hi / 2.0), cfg);
    return 2.0 * (head.value + r.value) + tail;
}

void validate_kernel(const Kernel& k) {
    if (!k.phi || !k.psi)
        throw ConfigError("validate_kernel: kernel must carry phi and psi");

    // stored integral
    if (k.kind == KernelKind::PvGap && k.integral != 0.0)
        throw ConfigError("validate_kernel: pv_gap kernel must store integral 0");
    if (k.kind == KernelKind::Poisson && k.integral != 1.0)
        throw ConfigError("validate_kernel: poisson kernel must store integral 1");

    // parity on a sample grid
    for (int i = 1; i <= 16; ++i) {
        const double t = 0.37 * i;
        const double a = k.phi(t), b = k.phi(-t);
        if (k.parity == Parity::Odd && std::fabs(a + b) > 1e-12 * (1.0 + std::fabs(a)))
            throw ConfigError("validate_kernel: phi is not odd");
        if (k.parity == Parity::Even && std::fabs(a - b) > 1e-12 * (1.0 + std::fabs(a)))
            throw ConfigError("validate_kernel: phi is not even");
    }

    // psi even, non-increasing in |x|, and dominating |phi(t)| for |t| >= |x|
    double prev = majorant_psi(k, 0.0);
    for (int i = 1; i <= 64; ++i) {
        const double x = 0.125 * i;
        const double cur = majorant_psi(k, x);
        if (std::fabs(cur - majorant_psi(k, -x)) > 1e-12 * (1.0 + cur))
            throw ConfigError("validate_kernel: psi is not even");
        if (cur > prev + 1e-12)
            throw ConfigError("validate_kernel: psi is not non-increasing");
        for (int j = 0; j <= 8; ++j) {
            const double t = x * (1.0 + 0.5 * j);
            if (std::fabs(k.phi(t)) > cur + 1e-10 ||
                std::fabs(k.phi(-t)) > cur + 1e-10)
                throw ConfigError("validate_kernel: psi does not dominate phi");
        }
        prev = cur;
    }
}

} // namespace bht
