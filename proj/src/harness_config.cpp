#include "bhtlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bhtlab/rates.hpp"

namespace bht::harness {

std::string experiment_name(Experiment e) {
    switch (e) {
    case Experiment::Eval: return "eval";
    case Experiment::Invert: return "invert";
    case Experiment::SweepGap: return "sweep_gap";
    case Experiment::SweepPoisson: return "sweep_poisson";
    case Experiment::Mollifier: return "mollifier";
    case Experiment::Lebesgue: return "lebesgue";
    case Experiment::ProductLemmas: return "product_lemmas";
    case Experiment::Dual: return "dual";
    case Experiment::NormProbe: return "norm_probe";
    }
    return "?";
}

Experiment experiment_from_name(const std::string& name) {
    for (Experiment e : {Experiment::Eval, Experiment::Invert, Experiment::SweepGap,
                         Experiment::SweepPoisson, Experiment::Mollifier,
                         Experiment::Lebesgue, Experiment::ProductLemmas,
                         Experiment::Dual, Experiment::NormProbe})
        if (experiment_name(e) == name)
            return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

void RunConfig::apply_defaults() {
    if (alpha_list.empty())
        alpha_list = {2.0};
    if (x_grid.empty())
        x_grid = {0.5};
    if (eps_ladder.empty())
        eps_ladder = default_eps_ladder();
    if (radius_ladder.empty()) {
        radius_ladder.resize(10);
        double r = 0.2;
        for (auto& v : radius_ladder) {
            v = r;
            r *= 0.5;
        }
    }
    if (p_list.empty())
        p_list = {2.0};
    if (weak_ladder.empty()) {
        weak_ladder.resize(7);
        double e = 0.1;
        for (auto& v : weak_ladder) {
            v = e;
            e *= 0.5;
        }
    }
}

void RunConfig::validate() const {
    quad.validate();
    auto check_ladder = [](const std::vector<double>& l, const char* name) {
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (!(l[i] > 0.0))
                throw ConfigError(std::string(name) + " entries must be positive");
            if (i > 0 && !(l[i] < l[i - 1]))
                throw ConfigError(std::string(name) + " must be strictly decreasing");
        }
    };
    check_ladder(eps_ladder, "eps_ladder");
    check_ladder(radius_ladder, "radius_ladder");
    check_ladder(weak_ladder, "weak_ladder");
    for (double a : alpha_list)
        validate_alpha(a);
    for (const auto& [f, g] : pairs) {
        f.validate();
        g.validate();
    }
    for (const auto& f : functions)
        f.validate();
    if (!(dual_eps > 0.0))
        throw ConfigError("dual_eps must be positive");
    if (!(psi_support > 0.0))
        throw ConfigError("psi_support must be positive");

    const bool needs_pairs =
        experiment == Experiment::Eval || experiment == Experiment::Invert ||
        experiment == Experiment::SweepGap || experiment == Experiment::SweepPoisson ||
        experiment == Experiment::Mollifier || experiment == Experiment::Dual ||
        experiment == Experiment::NormProbe;
    if (needs_pairs && pairs.empty())
        throw ConfigError("experiment '" + experiment_name(experiment) +
                          "' needs at least one 'pair' entry");
    if (experiment == Experiment::Lebesgue && functions.empty())
        throw ConfigError("lebesgue experiment needs 'function' entries");
    if (experiment == Experiment::ProductLemmas && functions.empty())
        throw ConfigError("product_lemmas experiment needs 'function' entries");
    if (experiment == Experiment::ProductLemmas && !multi_exponents.empty() &&
        multi_exponents.size() != functions.size())
        throw ConfigError("multi_exponents must match the number of functions");
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + v + "' at line " + std::to_string(line));
    }
}

// "geometric(first, ratio, count)" or a comma-separated list.
std::vector<double> parse_ladder(const std::string& v, int line) {
    const std::string t = trimmed(v);
    if (t.rfind("geometric(", 0) == 0 && t.back() == ')') {
        std::istringstream in(t.substr(10, t.size() - 11));
        std::string item;
        std::vector<double> args;
        while (std::getline(in, item, ','))
            args.push_back(parse_double(trimmed(item), line));
        if (args.size() != 3)
            throw ConfigError("geometric(first, ratio, count) at line " + std::to_string(line));
        const int count = static_cast<int>(args[2]);
        if (count < 1 || args[1] <= 0.0 || args[1] >= 1.0)
            throw ConfigError("geometric ladder needs 0 < ratio < 1, count >= 1 at line " +
                              std::to_string(line));
        std::vector<double> out(count);
        double e = args[0];
        for (int i = 0; i < count; ++i) {
            out[i] = e;
            e *= args[1];
        }
        return out;
    }
    std::vector<double> out;
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(parse_double(trimmed(item), line));
    return out;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path);

    RunConfig cfg;
    std::string section;
    std::string line;
    int lineno = 0;
    bool experiment_seen = false;

    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos)
            line = line.substr(0, comment);
        line = trimmed(line);
        if (line.empty())
            continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trimmed(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trimmed(line.substr(0, eq));
        const std::string val = trimmed(line.substr(eq + 1));

        if (section == "run") {
            if (key == "experiment") {
                cfg.experiment = experiment_from_name(val);
                experiment_seen = true;
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
            } else if (key == "output") {
                cfg.output_path = val;
            } else {
                throw ConfigError("unknown [run] key '" + key + "' at line " +
                                  std::to_string(lineno));
            }
        } else if (section == "functions") {
            if (key == "pair") {
                const auto bar = val.find('|');
                if (bar == std::string::npos)
                    throw ConfigError("pair needs 'spec | spec' at line " +
                                      std::to_string(lineno));
                cfg.pairs.emplace_back(parse_spec(val.substr(0, bar)),
                                       parse_spec(val.substr(bar + 1)));
            } else if (key == "function") {
                cfg.functions.push_back(parse_spec(val));
            } else if (key == "multi_exponents") {
                std::istringstream ms(val);
                std::string item;
                while (std::getline(ms, item, ','))
                    cfg.multi_exponents.push_back(std::stoll(trimmed(item)));
            } else {
                throw ConfigError("unknown [functions] key '" + key + "' at line " +
                                  std::to_string(lineno));
            }
        } else if (section == "grid") {
            if (key == "alpha")
                cfg.alpha_list = parse_ladder(val, lineno);
            else if (key == "x")
                cfg.x_grid = parse_ladder(val, lineno);
            else if (key == "eps_ladder")
                cfg.eps_ladder = parse_ladder(val, lineno);
            else if (key == "radius_ladder")
                cfg.radius_ladder = parse_ladder(val, lineno);
            else if (key == "p")
                cfg.p_list = parse_ladder(val, lineno);
            else if (key == "weak_ladder")
                cfg.weak_ladder = parse_ladder(val, lineno);
            else if (key == "dual_eps")
                cfg.dual_eps = parse_double(val, lineno);
            else if (key == "psi_support")
                cfg.psi_support = parse_double(val, lineno);
            else if (key == "kernel") {
                if (val == "poisson")
                    cfg.kernel = KernelKind::Poisson;
                else if (val == "pv_gap")
                    cfg.kernel = KernelKind::PvGap;
                else
                    throw ConfigError("kernel must be poisson or pv_gap at line " +
                                      std::to_string(lineno));
            } else {
                throw ConfigError("unknown [grid] key '" + key + "' at line " +
                                  std::to_string(lineno));
            }
        } else if (section == "tolerances") {
            const double d = parse_double(val, lineno);
            if (key == "rel_err") cfg.tol.rel_err = d;
            else if (key == "imag_residue") cfg.tol.imag_residue = d;
            else if (key == "slope_min") cfg.tol.slope_min = d;
            else if (key == "r2_min") cfg.tol.r2_min = d;
            else if (key == "margin_floor") cfg.tol.margin_floor = d;
            else if (key == "theta_final") cfg.tol.theta_final_max = d;
            else if (key == "mollifier_limit") cfg.tol.mollifier_limit_tol = d;
            else if (key == "leibniz_m1") cfg.tol.leibniz_m1 = d;
            else if (key == "leibniz_m2") cfg.tol.leibniz_m2 = d;
            else if (key == "constants_residual") cfg.tol.constants_residual = d;
            else if (key == "bad_point_floor") cfg.tol.bad_point_floor = d;
            else if (key == "consistency") cfg.tol.consistency = d;
            else if (key == "grid_change") cfg.tol.grid_change_max = d;
            else
                throw ConfigError("unknown [tolerances] key '" + key + "' at line " +
                                  std::to_string(lineno));
        } else if (section == "quadrature") {
            const double d = parse_double(val, lineno);
            if (key == "rel_tol") cfg.quad.rel_tol = d;
            else if (key == "abs_tol") cfg.quad.abs_tol = d;
            else if (key == "max_subdivisions") cfg.quad.max_subdivisions = static_cast<int>(d);
            else
                throw ConfigError("unknown [quadrature] key '" + key + "' at line " +
                                  std::to_string(lineno));
        } else {
            throw ConfigError("key outside a known section at line " + std::to_string(lineno));
        }
    }

    if (!experiment_seen)
        throw ConfigError("config must set [run] experiment");
    cfg.apply_defaults();
    cfg.validate();
    return cfg;
}

} // namespace bht::harness
