#include "bhtlab/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace bht {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}
} // namespace

// ---------------------------------------------------------------------------
// GridSignal
// ---------------------------------------------------------------------------

void GridSignal::validate() const {
    if (samples.size() < 4)
        throw ConfigError("GridSignal: need at least 4 samples");
    if (!(dx > 0.0))
        throw ConfigError("GridSignal: dx must be positive");
    if (interpolation_order != 3)
        throw ConfigError("GridSignal: only cubic interpolation is supported");
}

double eval_offgrid(const GridSignal& s, double x) {
    s.validate();
    const auto n = static_cast<long>(s.samples.size());
    const double pos = (x - s.x0) / s.dx;
    if (pos < -1e-12 || pos > static_cast<double>(n - 1) + 1e-12)
        throw DomainError("eval_offgrid: x outside the grid (no extrapolation)");

    // Node hits are returned exactly.
    const double nearest = std::round(pos);
    if (std::fabs(pos - nearest) < 1e-12 && nearest >= 0 && nearest <= double(n - 1))
        return s.samples[static_cast<std::size_t>(nearest)];

    // 4-point Lagrange window centered on the containing interval.
    long i = static_cast<long>(std::floor(pos));
    i = std::clamp(i - 1, 0L, n - 4);
    const double u = pos - static_cast<double>(i); // in [0,3] relative to window start
    const double c0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double c1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double c2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double c3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return c0 * s.samples[i] + c1 * s.samples[i + 1] + c2 * s.samples[i + 2] +
           c3 * s.samples[i + 3];
}

GridSignal load_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("load_grid_csv: cannot open " + path);
    std::vector<double> xs, vs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, v;
        if (!(ls >> x >> v)) {
            if (lineno == 1) continue; // header row
            throw ConfigError("load_grid_csv: bad row at line " + std::to_string(lineno));
        }
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 4)
        throw ConfigError("load_grid_csv: need at least 4 rows");
    const double dx = xs[1] - xs[0];
    if (!(dx > 0.0))
        throw ConfigError("load_grid_csv: x must be strictly increasing");
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double step = xs[i] - xs[i - 1];
        if (std::fabs(step - dx) > 1e-9 * std::max(std::fabs(dx), 1e-300))
            throw ConfigError("load_grid_csv: non-uniform spacing at line " +
                              std::to_string(i + 1));
    }
    GridSignal s;
    s.samples = std::move(vs);
    s.x0 = xs[0];
    s.dx = dx;
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// FunctionSpec
// ---------------------------------------------------------------------------

void FunctionSpec::validate() const {
    switch (kind) {
    case FnKind::Constant:
        break;
    case FnKind::Gaussian:
    case FnKind::Lorentzian:
        if (!(width > 0.0))
            throw ConfigError("spec: width must be positive");
        break;
    case FnKind::SmoothBump:
        if (!(width > 0.0))
            throw ConfigError("spec: bump support must be positive");
        break;
    case FnKind::Oscillatory:
        if (!(width > 0.0))
            throw ConfigError("spec: width must be positive");
        if (!(frequency > 0.0) || frequency > 16.0)
            throw ConfigError("spec: oscillatory frequency must be in (0, 16] cycles/unit");
        break;
    case FnKind::SignJump:
        break;
    case FnKind::PowerCusp:
        if (!(exponent > 0.0) || exponent > 1.0)
            throw ConfigError("spec: cusp exponent must be in (0, 1]");
        break;
    case FnKind::Polynomial:
        if (coeffs.empty())
            throw ConfigError("spec: polynomial needs coefficients");
        break;
    case FnKind::Sampled:
        grid.validate();
        break;
    }
}

bool FunctionSpec::is_bad_point(double x) const {
    for (double b : known_bad_points)
        if (std::fabs(x - b) < 1e-12)
            return true;
    return false;
}

RealFn make_function(const FunctionSpec& spec) {
    spec.validate();
    switch (spec.kind) {
    case FnKind::Constant: {
        const double v = spec.value;
        return [v](double) { return v; };
    }
    case FnKind::Gaussian: {
        const double c = spec.center, w = spec.width;
        return [c, w](double x) {
            const double u = (x - c) / w;
            return std::exp(-u * u);
        };
    }
    case FnKind::Lorentzian: {
        const double c = spec.center, w = spec.width;
        return [c, w](double x) {
            const double u = (x - c) / w;
            return 1.0 / (1.0 + u * u);
        };
    }
    case FnKind::SmoothBump: {
        const double s = spec.width;
        return [s](double x) {
            const double u = x / s;
            const double v = 1.0 - u * u;
            if (v <= 0.0)
                return 0.0;
            return std::exp(1.0 - 1.0 / v);
        };
    }
    case FnKind::Oscillatory: {
        const double c = spec.center, w = spec.width;
        const double omega = 2.0 * std::numbers::pi * spec.frequency;
        return [c, w, omega](double x) {
            const double s = x - c;
            const double u = s / w;
            return std::cos(omega * s) * std::exp(-u * u);
        };
    }
    case FnKind::SignJump: {
        const double c = spec.center;
        return [c](double x) { return x < c ? -1.0 : 1.0; };
    }
    case FnKind::PowerCusp: {
        const double c = spec.center, beta = spec.exponent;
        return [c, beta](double x) { return std::pow(std::fabs(x - c), beta); };
    }
    case FnKind::Polynomial: {
        const std::vector<double> cs = spec.coeffs;
        return [cs](double x) {
            double r = 0.0;
            for (std::size_t i = cs.size(); i-- > 0;)
                r = r * x + cs[i];
            return r;
        };
    }
    case FnKind::Sampled: {
        // Zero-extended outside the window so the function is total on R.
        const GridSignal g = spec.grid;
        const double lo = g.x0, hi = g.x_last();
        return [g, lo, hi](double x) {
            if (x < lo || x > hi)
                return 0.0;
            return eval_offgrid(g, x);
        };
    }
    }
    throw ConfigError("make_function: unknown kind");
}

RealFn derivative_function(const FunctionSpec& spec, int order) {
    spec.validate();
    if (order < 0 || order > 2)
        throw ParamError("derivative_function: order must be 0, 1 or 2");
    if (order == 0)
        return make_function(spec);

    switch (spec.kind) {
    case FnKind::Constant:
        return [](double) { return 0.0; };
    case FnKind::Gaussian: {
        const double c = spec.center, w = spec.width;
        if (order == 1)
            return [c, w](double x) {
                const double u = (x - c) / w;
                return -2.0 * u / w * std::exp(-u * u);
            };
        return [c, w](double x) {
            const double u = (x - c) / w;
            return (4.0 * u * u - 2.0) / (w * w) * std::exp(-u * u);
        };
    }
    case FnKind::Lorentzian: {
        const double c = spec.center, w = spec.width;
        if (order == 1)
            return [c, w](double x) {
                const double u = (x - c) / w;
                const double d = 1.0 + u * u;
                return -2.0 * u / (w * d * d);
            };
        return [c, w](double x) {
            const double u = (x - c) / w;
            const double d = 1.0 + u * u;
            return (6.0 * u * u - 2.0) / (w * w * d * d * d);
        };
    }
    case FnKind::SmoothBump: {
        const double s = spec.width;
        if (order == 1)
            return [s](double x) {
                const double u = x / s;
                const double v = 1.0 - u * u;
                if (v <= 0.0)
                    return 0.0;
                const double b = std::exp(1.0 - 1.0 / v);
                return b * (-2.0 * u / s) / (v * v);
            };
        return [s](double x) {
            const double u = x / s;
            const double v = 1.0 - u * u;
            if (v <= 0.0)
                return 0.0;
            const double b = std::exp(1.0 - 1.0 / v);
            const double s2 = s * s;
            return b * (4.0 * u * u / (s2 * v * v * v * v) - 2.0 / (s2 * v * v) -
                        8.0 * u * u / (s2 * v * v * v));
        };
    }
    case FnKind::Oscillatory: {
        const double c = spec.center, w = spec.width;
        const double omega = 2.0 * std::numbers::pi * spec.frequency;
        if (order == 1)
            return [c, w, omega](double x) {
                const double t = x - c;
                const double u = t / w;
                const double env = std::exp(-u * u);
                return (-omega * std::sin(omega * t) -
                        2.0 * u / w * std::cos(omega * t)) * env;
            };
        return [c, w, omega](double x) {
            const double t = x - c;
            const double u = t / w;
            const double env = std::exp(-u * u);
            const double A = std::cos(omega * t);
            const double Ap = -omega * std::sin(omega * t);
            const double App = -omega * omega * A;
            const double Bp = -2.0 * u / w;                       // env'/env
            const double Bpp = (4.0 * u * u - 2.0) / (w * w);     // env''/env
            return (App + 2.0 * Ap * Bp + A * Bpp) * env;
        };
    }
    case FnKind::Polynomial: {
        std::vector<double> cs = spec.coeffs;
        for (int k = 0; k < order; ++k) {
            for (std::size_t i = 1; i < cs.size(); ++i)
                cs[i - 1] = cs[i] * static_cast<double>(i);
            if (!cs.empty())
                cs.pop_back();
        }
        if (cs.empty())
            cs.push_back(0.0);
        return [cs](double x) {
            double r = 0.0;
            for (std::size_t i = cs.size(); i-- > 0;)
                r = r * x + cs[i];
            return r;
        };
    }
    case FnKind::SignJump:
    case FnKind::PowerCusp:
    case FnKind::Sampled:
        throw ParamError("derivative_function: no closed-form derivative for this kind");
    }
    throw ParamError("derivative_function: unknown kind");
}

std::optional<Decay> decay_class(const FunctionSpec& spec) {
    switch (spec.kind) {
    case FnKind::Gaussian:
    case FnKind::Oscillatory:
        return Decay{DecayClass::Gaussian, spec.width};
    case FnKind::Lorentzian:
        return Decay{DecayClass::Rational, 2.0};
    case FnKind::SmoothBump:
        return Decay{DecayClass::Compact, spec.width};
    case FnKind::Sampled:
        return Decay{DecayClass::Compact,
                     std::max(std::fabs(spec.grid.x0), std::fabs(spec.grid.x_last()))};
    default:
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Labels and parsing
// ---------------------------------------------------------------------------

std::string spec_label(const FunctionSpec& spec) {
    switch (spec.kind) {
    case FnKind::Constant:
        return "constant(value=" + fmt(spec.value) + ")";
    case FnKind::Gaussian:
        return "gaussian(center=" + fmt(spec.center) + ",width=" + fmt(spec.width) + ")";
    case FnKind::Lorentzian:
        return "lorentzian(center=" + fmt(spec.center) + ",width=" + fmt(spec.width) + ")";
    case FnKind::SmoothBump:
        return "smooth_bump(support=" + fmt(spec.width) + ")";
    case FnKind::Oscillatory:
        return "oscillatory(center=" + fmt(spec.center) + ",width=" + fmt(spec.width) +
               ",frequency=" + fmt(spec.frequency) + ")";
    case FnKind::SignJump:
        return "sign_jump(center=" + fmt(spec.center) + ")";
    case FnKind::PowerCusp:
        return "power_cusp(center=" + fmt(spec.center) + ",beta=" + fmt(spec.exponent) + ")";
    case FnKind::Polynomial: {
        std::string s = "polynomial(coeffs=";
        for (std::size_t i = 0; i < spec.coeffs.size(); ++i) {
            if (i) s += ';';
            s += fmt(spec.coeffs[i]);
        }
        return s + ")";
    }
    case FnKind::Sampled:
        return "sampled(n=" + std::to_string(spec.grid.samples.size()) + ")";
    }
    return "?";
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_num(const std::string& s, const std::string& ctx) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("parse_spec: bad number '" + s + "' in " + ctx);
    }
}

} // namespace

FunctionSpec parse_spec(const std::string& text) {
    const std::string t = trimmed(text);
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
        throw ConfigError("parse_spec: expected kind(args): '" + text + "'");
    const std::string kind = trimmed(t.substr(0, open));
    const std::string args = t.substr(open + 1, t.size() - open - 2);

    // key=value pairs separated by commas; polynomial coeffs use ';'.
    std::vector<std::pair<std::string, std::string>> kv;
    std::string cur;
    std::istringstream as(args);
    while (std::getline(as, cur, ',')) {
        cur = trimmed(cur);
        if (cur.empty())
            continue;
        const auto eq = cur.find('=');
        if (eq == std::string::npos)
            kv.emplace_back("", cur);
        else
            kv.emplace_back(trimmed(cur.substr(0, eq)), trimmed(cur.substr(eq + 1)));
    }
    auto get = [&](const std::string& key, double dflt) {
        for (auto& [k, v] : kv)
            if (k == key)
                return parse_num(v, text);
        return dflt;
    };
    auto positional = [&]() -> std::optional<double> {
        if (kv.size() == 1 && kv[0].first.empty())
            return parse_num(kv[0].second, text);
        return std::nullopt;
    };

    if (kind == "constant") {
        if (auto p = positional())
            return constant_spec(*p);
        return constant_spec(get("value", 1.0));
    }
    if (kind == "gaussian")
        return gaussian_spec(get("center", 0.0), get("width", 1.0));
    if (kind == "lorentzian")
        return lorentzian_spec(get("center", 0.0), get("width", 1.0));
    if (kind == "smooth_bump") {
        if (auto p = positional())
            return smooth_bump_spec(*p);
        return smooth_bump_spec(get("support", 1.0));
    }
    if (kind == "oscillatory")
        return oscillatory_spec(get("center", 0.0), get("width", 1.0), get("frequency", 1.0));
    if (kind == "sign_jump") {
        if (auto p = positional())
            return sign_jump_spec(*p);
        return sign_jump_spec(get("center", 0.0));
    }
    if (kind == "power_cusp")
        return power_cusp_spec(get("center", 0.0), get("beta", 0.5));
    if (kind == "polynomial") {
        for (auto& [k, v] : kv) {
            if (k == "coeffs") {
                std::vector<double> cs;
                std::istringstream cs_in(v);
                std::string item;
                while (std::getline(cs_in, item, ';'))
                    cs.push_back(parse_num(trimmed(item), text));
                return polynomial_spec(std::move(cs));
            }
        }
        throw ConfigError("parse_spec: polynomial needs coeffs=c0;c1;...");
    }
    if (kind == "sampled") {
        for (auto& [k, v] : kv)
            if (k == "csv")
                return sampled_spec(load_grid_csv(v));
        throw ConfigError("parse_spec: sampled needs csv=<path>");
    }
    throw ConfigError("parse_spec: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

FunctionSpec constant_spec(double value) {
    FunctionSpec s;
    s.kind = FnKind::Constant;
    s.value = value;
    s.smoothness = Smoothness::Analytic;
    // Not in L^p for finite p (unless zero), but in L^inf. Admitted as a
    // desk-scale test under the symmetric-truncation convention.
    s.membership = {{1.0, value == 0.0}, {2.0, value == 0.0}, {kInf, true}};
    return s;
}

FunctionSpec gaussian_spec(double center, double width) {
    FunctionSpec s;
    s.kind = FnKind::Gaussian;
    s.center = center;
    s.width = width;
    s.smoothness = Smoothness::Analytic;
    s.lipschitz_constant = std::sqrt(2.0 / std::exp(1.0)) / width;
    s.membership = {{1.0, true}, {2.0, true}, {kInf, true}};
    s.validate();
    return s;
}

FunctionSpec lorentzian_spec(double center, double width) {
    FunctionSpec s;
    s.kind = FnKind::Lorentzian;
    s.center = center;
    s.width = width;
    s.smoothness = Smoothness::Analytic;
    s.lipschitz_constant = 3.0 * std::sqrt(3.0) / (8.0 * width);
    s.membership = {{1.0, true}, {2.0, true}, {kInf, true}};
    s.validate();
    return s;
}

FunctionSpec smooth_bump_spec(double support) {
    FunctionSpec s;
    s.kind = FnKind::SmoothBump;
    s.width = support;
    s.smoothness = Smoothness::Analytic;
    s.membership = {{1.0, true}, {2.0, true}, {kInf, true}};
    s.validate();
    return s;
}

FunctionSpec oscillatory_spec(double center, double width, double cycles) {
    FunctionSpec s;
    s.kind = FnKind::Oscillatory;
    s.center = center;
    s.width = width;
    s.frequency = cycles;
    s.smoothness = Smoothness::Analytic;
    s.membership = {{1.0, true}, {2.0, true}, {kInf, true}};
    s.validate();
    return s;
}

FunctionSpec sign_jump_spec(double center) {
    FunctionSpec s;
    s.kind = FnKind::SignJump;
    s.center = center;
    s.smoothness = Smoothness::Discontinuous;
    s.membership = {{1.0, false}, {2.0, false}, {kInf, true}};
    s.known_bad_points = {center};
    return s;
}

FunctionSpec power_cusp_spec(double center, double beta) {
    FunctionSpec s;
    s.kind = FnKind::PowerCusp;
    s.center = center;
    s.exponent = beta;
    s.smoothness = beta == 1.0 ? Smoothness::Lipschitz : Smoothness::Holder;
    s.holder_beta = beta;
    if (beta == 1.0)
        s.lipschitz_constant = 1.0;
    s.membership = {{1.0, false}, {2.0, false}, {kInf, false}};
    s.validate();
    return s;
}

FunctionSpec polynomial_spec(std::vector<double> coeffs) {
    FunctionSpec s;
    s.kind = FnKind::Polynomial;
    s.coeffs = std::move(coeffs);
    s.smoothness = Smoothness::Analytic;
    const bool constantlike = s.coeffs.size() <= 1;
    s.membership = {{1.0, false}, {2.0, false}, {kInf, constantlike}};
    s.validate();
    return s;
}

FunctionSpec sampled_spec(GridSignal grid) {
    FunctionSpec s;
    s.kind = FnKind::Sampled;
    s.grid = std::move(grid);
    s.smoothness = Smoothness::Lipschitz;
    s.membership = {{1.0, true}, {2.0, true}, {kInf, true}};
    s.validate();
    return s;
}

} // namespace bht
