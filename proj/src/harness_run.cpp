#include "bhtlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <thread>

#include <json.hpp>

#include "bhtlab/dual_checks.hpp"
#include "bhtlab/rates.hpp"

namespace bht::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Row {
    std::string function_f;
    std::string function_g;
    double alpha = 0.0;
    double x = 0.0;
    double eps_or_r = 0.0;
    double value_re = 0.0;
    double value_im = 0.0;
    double err_est = 0.0;
    std::string status = "ok";
};

struct CellOut {
    std::vector<Row> rows;
    ordered_json summary;
    bool pass = true;
    int numeric_failures = 0;
};

using CellFn = std::function<CellOut()>;

// Deterministic worker pool: cells are independent, results land in their
// config-order slot, emission happens after the join.
std::vector<CellOut> run_cells(const std::vector<CellFn>& cells, int jobs) {
    std::vector<CellOut> results(cells.size());
    jobs = std::clamp(jobs, 1, 64);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size())
                break;
            results[i] = cells[i]();
        }
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < jobs; ++t)
        threads.emplace_back(worker);
    worker();
    for (auto& t : threads)
        t.join();
    return results;
}

ordered_json tolerances_json(const Tolerances& t) {
    ordered_json j;
    j["rel_err"] = t.rel_err;
    j["imag_residue"] = t.imag_residue;
    j["slope_min"] = t.slope_min;
    j["r2_min"] = t.r2_min;
    j["margin_floor"] = t.margin_floor;
    j["theta_final"] = t.theta_final_max;
    j["mollifier_limit"] = t.mollifier_limit_tol;
    j["leibniz_m1"] = t.leibniz_m1;
    j["leibniz_m2"] = t.leibniz_m2;
    j["constants_residual"] = t.constants_residual;
    j["bad_point_floor"] = t.bad_point_floor;
    j["consistency"] = t.consistency;
    j["grid_change"] = t.grid_change_max;
    return j;
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["experiment"] = experiment_name(cfg.experiment);
    j["seed"] = cfg.seed;
    ordered_json fns = ordered_json::array();
    for (const auto& [f, g] : cfg.pairs)
        fns.push_back(spec_label(f) + " | " + spec_label(g));
    j["pairs"] = fns;
    ordered_json singles = ordered_json::array();
    for (const auto& f : cfg.functions)
        singles.push_back(spec_label(f));
    j["functions"] = singles;
    j["multi_exponents"] = cfg.multi_exponents;
    j["alpha"] = cfg.alpha_list;
    j["x"] = cfg.x_grid;
    j["eps_ladder"] = cfg.eps_ladder;
    j["radius_ladder"] = cfg.radius_ladder;
    j["p"] = cfg.p_list;
    j["weak_ladder"] = cfg.weak_ladder;
    j["dual_eps"] = cfg.dual_eps;
    j["psi_support"] = cfg.psi_support;
    j["kernel"] = cfg.kernel == KernelKind::Poisson ? "poisson" : "pv_gap";
    ordered_json q;
    q["rel_tol"] = cfg.quad.rel_tol;
    q["abs_tol"] = cfg.quad.abs_tol;
    q["max_subdivisions"] = cfg.quad.max_subdivisions;
    j["quadrature"] = q;
    return j;
}

const char* class_name(LebesgueClass c) {
    switch (c) {
    case LebesgueClass::LebesguePoint: return "lebesgue_point";
    case LebesgueClass::NotLebesgue: return "not_lebesgue";
    case LebesgueClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Experiment cell builders
// ---------------------------------------------------------------------------

struct OperatorCase {
    FunctionSpec f, g;
    double alpha, x;
};

std::vector<OperatorCase> operator_grid(const RunConfig& cfg) {
    std::vector<OperatorCase> cases;
    for (const auto& [f, g] : cfg.pairs)
        for (double a : cfg.alpha_list)
            for (double x : cfg.x_grid)
                cases.push_back({f, g, a, x});
    return cases;
}

CellFn eval_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        const RealFn f = make_function(c.f), g = make_function(c.g);
        const double radius = default_truncation_radius(c.f, c.g, c.alpha, c.x);
        for (double eps : cfg.eps_ladder) {
            Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x, eps};
            try {
                BhtParams p{c.alpha, eps, radius, cfg.quad};
                const ComplexResult r = bht_regularized(f, g, c.x, p);
                row.value_re = r.value.re;
                row.value_im = r.value.im;
                row.err_est = r.re_err + r.im_err;
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }
        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        s["x"] = c.x;
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn invert_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        const RealFn f = make_function(c.f), g = make_function(c.g);
        const double target = f(c.x) * g(c.x);
        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        s["x"] = c.x;
        s["target"] = target;
        try {
            const InversionResult inv =
                invert_product(c.f, c.g, c.x, c.alpha, cfg.eps_ladder, cfg.quad,
                               cfg.tol.imag_residue);
            for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
                Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x, cfg.eps_ladder[i]};
                row.value_re = inv.report.values[i].re;
                row.value_im = inv.report.values[i].im;
                row.err_est = inv.report.residuals[i];
                out.rows.push_back(row);
            }
            const double err = std::fabs(inv.recovered - target);
            const double rel = target != 0.0 ? err / std::fabs(target) : err;
            s["recovered"] = inv.recovered;
            s["rel_err"] = rel;
            s["imag_residue"] = inv.imag_residue;
            s["rate"] = inv.report.fitted_rate;
            out.pass = inv.inversion_ok && rel <= cfg.tol.rel_err;
        } catch (const AccuracyError& e) {
            s["error"] = std::string("accuracy_error: ") + e.what();
            ++out.numeric_failures;
            out.pass = false;
        } catch (const std::exception& e) {
            s["error"] = e.what();
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn sweep_gap_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        const RealFn f = make_function(c.f), g = make_function(c.g);
        const double radius = default_truncation_radius(c.f, c.g, c.alpha, c.x);

        QuadConfig tight = cfg.quad;
        tight.rel_tol = 1e-13;
        tight.abs_tol = 1e-13;
        tight.max_subdivisions = std::max(cfg.quad.max_subdivisions, 8000);

        std::vector<double> gaps;
        double consistency_max = 0.0;
        for (double eps : cfg.eps_ladder) {
            Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x, eps};
            try {
                const EvalResult gap =
                    regularization_gap(f, g, c.x, c.alpha, eps, radius, tight);
                BhtParams p{c.alpha, eps, radius, tight};
                const ComplexResult reg = bht_regularized(f, g, c.x, p);
                const EvalResult tr = bht_truncated(f, g, c.x, p);
                consistency_max = std::max(
                    consistency_max, std::fabs(gap.value - (reg.value.re - tr.value)));
                row.value_re = gap.value;
                row.err_est = gap.err_est;
                gaps.push_back(gap.value);
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }

        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        s["x"] = c.x;
        if (gaps.size() == cfg.eps_ladder.size()) {
            const RateFit fit = fit_rate(cfg.eps_ladder, gaps);
            s["slope"] = fit.slope;
            s["r_squared"] = fit.r_squared;
            s["consistency_max"] = consistency_max;
            out.pass = out.pass && !fit.degenerate && fit.slope >= cfg.tol.slope_min &&
                       fit.r_squared >= cfg.tol.r2_min &&
                       consistency_max <= cfg.tol.consistency;
        } else {
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn sweep_poisson_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        const RealFn f = make_function(c.f), g = make_function(c.g);
        const bool bad_point = c.f.is_bad_point(c.x) || c.g.is_bad_point(c.x);

        std::vector<double> residuals;
        for (double eps : cfg.eps_ladder) {
            Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x, eps};
            try {
                const EvalResult r = poisson_residual(f, g, c.x, c.alpha, eps, cfg.quad);
                row.value_re = r.value;
                row.err_est = r.err_est;
                residuals.push_back(r.value);
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }

        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        s["x"] = c.x;
        s["hypothesis_witness"] = bad_point;
        if (residuals.size() == cfg.eps_ladder.size()) {
            if (bad_point) {
                // Necessity witness: the residual must stay away from zero.
                double floor_min = HUGE_VAL;
                for (std::size_t i = 0; i < residuals.size(); ++i)
                    if (cfg.eps_ladder[i] <= 0.01)
                        floor_min = std::min(floor_min, std::fabs(residuals[i]));
                s["residual_floor"] = floor_min;
                out.pass = out.pass && floor_min > cfg.tol.bad_point_floor;
            } else {
                const RateFit fit = fit_rate(cfg.eps_ladder, residuals);
                s["slope"] = fit.slope;
                s["r_squared"] = fit.r_squared;
                out.pass = out.pass && !fit.degenerate && fit.slope >= cfg.tol.slope_min;
            }
        } else {
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn mollifier_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        const RealFn f = make_function(c.f), g = make_function(c.g);
        const Kernel kernel =
            cfg.kernel == KernelKind::Poisson ? poisson_kernel() : pv_gap_kernel();
        const double target = kernel.integral * f(c.x) * g(c.x);

        std::vector<double> values;
        for (double eps : cfg.eps_ladder) {
            Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x, eps};
            try {
                const EvalResult r = mollifier_pair(f, g, c.x, c.alpha, kernel, eps, cfg.quad);
                row.value_re = r.value;
                row.err_est = r.err_est;
                values.push_back(r.value);
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }

        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        s["x"] = c.x;
        s["target"] = target;
        if (values.size() == cfg.eps_ladder.size()) {
            const Extrapolation ex = extrapolate(cfg.eps_ladder, values);
            s["limit"] = ex.limit;
            s["misfit"] = ex.misfit;
            out.pass = out.pass && ex.reliable &&
                       std::fabs(ex.limit - target) <= cfg.tol.mollifier_limit_tol;
        } else {
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn lebesgue_cell(const RunConfig& cfg, FunctionSpec spec, double x, double p) {
    return [cfg, spec, x, p]() {
        CellOut out;
        const RealFn f = make_function(spec);
        ordered_json s;
        s["function"] = spec_label(spec);
        s["x"] = x;
        s["p"] = p;
        try {
            const ThetaProfile prof = lebesgue_profile(f, x, p, cfg.radius_ladder, {}, cfg.quad);
            for (std::size_t i = 0; i < prof.radii.size(); ++i) {
                Row row{spec_label(spec), "", 0.0, x, prof.radii[i]};
                row.value_re = prof.theta[i];
                out.rows.push_back(row);
            }
            s["slope"] = prof.fitted_slope;
            s["r_squared"] = prof.r_squared;
            s["theta_final"] = prof.theta.back();
            s["class"] = class_name(prof.classification);
            // Known bad points must classify not_lebesgue; everywhere else a
            // flat profile is the failure mode.
            if (spec.is_bad_point(x))
                out.pass = prof.classification == LebesgueClass::NotLebesgue;
            else
                out.pass = prof.classification != LebesgueClass::NotLebesgue;
        } catch (const AccuracyError& e) {
            s["error"] = std::string("accuracy_error: ") + e.what();
            ++out.numeric_failures;
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

struct NestingDraw {
    double x, r, p1, p2;
};

CellFn nesting_cell(const RunConfig& cfg, FunctionSpec spec, std::vector<NestingDraw> draws) {
    return [cfg, spec, draws]() {
        CellOut out;
        const RealFn f = make_function(spec);
        double min_margin = HUGE_VAL;
        for (const NestingDraw& d : draws) {
            Row row{spec_label(spec), "", 0.0, d.x, d.r};
            try {
                const double margin = check_nesting(f, d.x, d.r, d.p1, d.p2, cfg.quad);
                row.value_re = margin;
                row.value_im = d.p1; // exponents recorded alongside the margin
                row.err_est = d.p2;
                min_margin = std::min(min_margin, margin);
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }
        ordered_json s;
        s["function"] = spec_label(spec);
        s["check"] = "nesting";
        s["min_margin"] = min_margin;
        out.pass = out.pass && min_margin >= cfg.tol.margin_floor;
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn product_cell(const RunConfig& cfg, FunctionSpec fs, FunctionSpec gs, double x,
                    double p1, double p2) {
    return [cfg, fs, gs, x, p1, p2]() {
        CellOut out;
        const RealFn f = make_function(fs), g = make_function(gs);
        double min_margin = HUGE_VAL;
        double theta_last = HUGE_VAL;
        for (double r : cfg.radius_ladder) {
            Row row{spec_label(fs), spec_label(gs), 0.0, x, r};
            try {
                const ProductMargins m = check_product(f, g, x, r, p1, p2, cfg.quad);
                row.value_re = m.min_margin();
                row.value_im = m.theta_product;
                min_margin = std::min(min_margin, m.min_margin());
                theta_last = m.theta_product;
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }
        ordered_json s;
        s["function_f"] = spec_label(fs);
        s["function_g"] = spec_label(gs);
        s["check"] = "product";
        s["x"] = x;
        s["p1"] = p1;
        s["p2"] = p2;
        s["min_margin"] = min_margin;
        s["theta_final"] = theta_last;
        out.pass = out.pass && min_margin >= cfg.tol.margin_floor &&
                   theta_last < cfg.tol.theta_final_max;
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn multi_product_cell(const RunConfig& cfg, double x) {
    return [cfg, x]() {
        CellOut out;
        std::vector<RealFn> fns;
        for (const auto& spec : cfg.functions)
            fns.push_back(make_function(spec));

        // Exact exponent bookkeeping: the chain must end at 1 / sum(1/p_i).
        Rational inv_sum(0, 1);
        for (long long p : cfg.multi_exponents)
            inv_sum = inv_sum.plus(Rational(1, p));
        const Rational expected = inv_sum.reciprocal();

        ordered_json s;
        s["check"] = "multi_product";
        s["x"] = x;
        double theta_last = HUGE_VAL;
        bool chain_exact = false;
        for (double r : cfg.radius_ladder) {
            Row row{spec_label(cfg.functions.front()), "", 0.0, x, r};
            try {
                const MultiProductReport rep =
                    check_multi_product(fns, cfg.multi_exponents, x, r, cfg.quad);
                chain_exact = rep.final_exponent == expected;
                row.value_re = rep.theta_final;
                theta_last = rep.theta_final;
            } catch (const AccuracyError& e) {
                row.value_re = e.best_estimate;
                row.status = "accuracy_error";
                ++out.numeric_failures;
                out.pass = false;
            }
            out.rows.push_back(row);
        }
        s["final_exponent"] = fmt(expected.to_double());
        s["chain_exact"] = chain_exact;
        s["theta_final"] = theta_last;
        out.pass = out.pass && chain_exact && theta_last < cfg.tol.theta_final_max;
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn dual_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        s["x"] = c.x;

        const bool constants = c.f.kind == FnKind::Constant && c.g.kind == FnKind::Constant;

        try {
            for (int m : {1, 2}) {
                const LeibnizResult lr =
                    leibniz_residual(c.f, c.g, c.x, c.alpha, cfg.dual_eps, m, cfg.quad);
                Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x,
                        static_cast<double>(m)};
                row.value_re = lr.residual;
                row.err_est = lr.fd_noise_floor;
                row.status = lr.inconclusive ? "inconclusive" : "ok";
                out.rows.push_back(row);
                s[m == 1 ? "leibniz_m1" : "leibniz_m2"] = lr.residual;
                const double tol = m == 1 ? cfg.tol.leibniz_m1 : cfg.tol.leibniz_m2;
                if (!lr.inconclusive && lr.residual > tol)
                    out.pass = false;
            }

            const TestPairing pairing = smooth_bump_pairing(cfg.psi_support);
            std::vector<double> mags;
            for (double eps : cfg.weak_ladder) {
                const WeakLimitResult w =
                    weak_limit_residual(c.f, c.g, pairing, c.alpha, eps);
                Row row{spec_label(c.f), spec_label(c.g), c.alpha, c.x, eps};
                row.value_re = w.value.re;
                row.value_im = w.value.im;
                row.err_est = w.err_est;
                out.rows.push_back(row);
                mags.push_back(std::hypot(w.value.re, w.value.im));
            }
            if (constants) {
                const double worst = *std::max_element(mags.begin(), mags.end());
                s["weak_residual_max"] = worst;
                out.pass = out.pass && worst <= cfg.tol.constants_residual;
            } else {
                const RateFit fit = fit_rate(cfg.weak_ladder, mags);
                s["weak_slope"] = fit.slope;
                s["weak_r_squared"] = fit.r_squared;
                out.pass = out.pass && !fit.degenerate && fit.slope >= cfg.tol.slope_min;
            }
        } catch (const AccuracyError& e) {
            s["error"] = std::string("accuracy_error: ") + e.what();
            ++out.numeric_failures;
            out.pass = false;
        } catch (const std::exception& e) {
            s["error"] = e.what();
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

CellFn norm_probe_cell(const RunConfig& cfg, OperatorCase c) {
    return [cfg, c]() {
        CellOut out;
        ordered_json s;
        s["function_f"] = spec_label(c.f);
        s["function_g"] = spec_label(c.g);
        s["alpha"] = c.alpha;
        const double p1 = cfg.p_list.size() > 0 ? cfg.p_list[0] : 2.0;
        const double p2 = cfg.p_list.size() > 1 ? cfg.p_list[1] : p1;
        s["p1"] = p1;
        s["p2"] = p2;
        try {
            const NormProbeResult r = norm_probe(c.f, c.g, c.alpha, p1, p2);
            for (std::size_t i = 0; i < r.grid_ratios.size(); ++i) {
                Row row{spec_label(c.f), spec_label(c.g), c.alpha, 0.0,
                        static_cast<double>(64 << i)};
                row.value_re = r.grid_ratios[i];
                out.rows.push_back(row);
            }
            s["ratio"] = r.ratio;
            s["grid_rel_change"] = r.grid_rel_change;
            out.pass = r.grid_rel_change <= cfg.tol.grid_change_max;
        } catch (const AccuracyError& e) {
            s["error"] = std::string("accuracy_error: ") + e.what();
            ++out.numeric_failures;
            out.pass = false;
        } catch (const std::exception& e) {
            s["error"] = e.what();
            out.pass = false;
        }
        s["pass"] = out.pass;
        out.summary = s;
        return out;
    };
}

std::vector<CellFn> build_cells(const RunConfig& cfg) {
    std::vector<CellFn> cells;
    switch (cfg.experiment) {
    case Experiment::Eval:
        for (const auto& c : operator_grid(cfg))
            cells.push_back(eval_cell(cfg, c));
        break;
    case Experiment::Invert:
        for (const auto& c : operator_grid(cfg))
            cells.push_back(invert_cell(cfg, c));
        break;
    case Experiment::SweepGap:
        for (const auto& c : operator_grid(cfg))
            cells.push_back(sweep_gap_cell(cfg, c));
        break;
    case Experiment::SweepPoisson:
        for (const auto& c : operator_grid(cfg))
            cells.push_back(sweep_poisson_cell(cfg, c));
        break;
    case Experiment::Mollifier:
        for (const auto& c : operator_grid(cfg))
            cells.push_back(mollifier_cell(cfg, c));
        break;
    case Experiment::Lebesgue:
        for (const auto& spec : cfg.functions)
            for (double x : cfg.x_grid)
                for (double p : cfg.p_list)
                    cells.push_back(lebesgue_cell(cfg, spec, x, p));
        break;
    case Experiment::ProductLemmas: {
        // All random draws happen up front, single-threaded, from the seed;
        // cells then carry their sampled parameters.
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> ux(-1.5, 1.5);
        std::uniform_real_distribution<double> ulogr(std::log(0.01), std::log(0.3));
        std::uniform_real_distribution<double> up(1.0, 8.0);
        for (const auto& spec : cfg.functions) {
            std::vector<NestingDraw> draws;
            for (int i = 0; i < 20; ++i) {
                NestingDraw d;
                d.x = ux(rng);
                if (spec.is_bad_point(d.x))
                    d.x += 0.371; // deterministic shift off the bad point
                d.r = std::exp(ulogr(rng));
                d.p1 = up(rng);
                std::uniform_real_distribution<double> up2(1.0, d.p1);
                d.p2 = up2(rng);
                draws.push_back(d);
            }
            cells.push_back(nesting_cell(cfg, spec, draws));
        }
        for (const auto& [f, g] : cfg.pairs)
            for (double x : cfg.x_grid) {
                cells.push_back(product_cell(cfg, f, g, x, 2.0, 2.0)); // conjugate
                cells.push_back(product_cell(cfg, f, g, x, 4.0, 4.0)); // split, p3 = 2
            }
        if (!cfg.multi_exponents.empty())
            for (double x : cfg.x_grid)
                cells.push_back(multi_product_cell(cfg, x));
        break;
    }
    case Experiment::Dual:
        for (const auto& c : operator_grid(cfg))
            cells.push_back(dual_cell(cfg, c));
        break;
    case Experiment::NormProbe:
        for (const auto& [f, g] : cfg.pairs)
            for (double a : cfg.alpha_list)
                cells.push_back(norm_probe_cell(cfg, {f, g, a, 0.0}));
        break;
    }
    return cells;
}

// Companion table for the lebesgue experiment: one row per (profile, radius)
// with the fitted slope and classification attached.
void write_profile_csv(const std::string& path, const std::vector<CellOut>& results) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path);
    out << "function_id,x,p,r,theta,slope,class\n";
    for (const CellOut& cell : results) {
        const std::string slope = cell.summary.contains("slope")
                                      ? fmt(cell.summary["slope"].get<double>())
                                      : std::string();
        const std::string cls = cell.summary.contains("class")
                                    ? cell.summary["class"].get<std::string>()
                                    : std::string();
        const double p = cell.summary["p"].get<double>();
        for (const Row& r : cell.rows)
            out << r.function_f << ',' << fmt(r.x) << ',' << fmt(p) << ','
                << fmt(r.eps_or_r) << ',' << fmt(r.value_re) << ',' << slope << ','
                << cls << '\n';
    }
}

void write_csv(const std::string& path, const std::string& experiment,
               const std::vector<CellOut>& results) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write " + path);
    out << "experiment,function_f,function_g,alpha,x,eps_or_r,value_re,value_im,"
           "err_est,status\n";
    for (const CellOut& cell : results)
        for (const Row& r : cell.rows)
            out << experiment << ',' << r.function_f << ',' << r.function_g << ','
                << fmt(r.alpha) << ',' << fmt(r.x) << ',' << fmt(r.eps_or_r) << ','
                << fmt(r.value_re) << ',' << fmt(r.value_im) << ','
                << fmt(r.err_est) << ',' << r.status << '\n';
}

} // namespace

RunOutcome run(const RunConfig& cfg, const std::string& out_dir, int jobs, bool verbose) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    const std::vector<CellFn> cells = build_cells(cfg);
    const std::vector<CellOut> results = run_cells(cells, jobs);

    bool pass = true;
    int numeric_failures = 0;
    ordered_json cases = ordered_json::array();
    ordered_json limits = ordered_json::array();
    ordered_json slopes = ordered_json::array();
    ordered_json r_squared = ordered_json::array();
    for (const CellOut& c : results) {
        pass = pass && c.pass;
        numeric_failures += c.numeric_failures;
        cases.push_back(c.summary);
        for (const char* key : {"recovered", "limit", "ratio", "theta_final", "min_margin"})
            if (c.summary.contains(key)) {
                limits.push_back(c.summary[key]);
                break;
            }
        for (const char* key : {"slope", "weak_slope", "rate"})
            if (c.summary.contains(key)) {
                slopes.push_back(c.summary[key]);
                break;
            }
        for (const char* key : {"r_squared", "weak_r_squared"})
            if (c.summary.contains(key)) {
                r_squared.push_back(c.summary[key]);
                break;
            }
    }

    const std::string name = experiment_name(cfg.experiment);
    RunOutcome outcome;
    outcome.csv_path = out_dir + "/" + name + ".csv";
    outcome.json_path = out_dir + "/" + name + "_summary.json";
    write_csv(outcome.csv_path, name, results);
    if (cfg.experiment == Experiment::Lebesgue)
        write_profile_csv(out_dir + "/lebesgue_profiles.csv", results);

    ordered_json summary;
    summary["experiment"] = name;
    summary["config"] = config_json(cfg);
    summary["tolerances"] = tolerances_json(cfg.tol);
    summary["limits"] = limits;
    summary["slopes"] = slopes;
    summary["r_squared"] = r_squared;
    summary["cases"] = cases;
    summary["numeric_failures"] = numeric_failures;
    summary["pass"] = pass;
    {
        std::ofstream js(outcome.json_path, std::ios::binary);
        if (!js)
            throw ConfigError("cannot write " + outcome.json_path);
        js << summary.dump(2) << '\n';
    }

    if (verbose)
        std::fprintf(stderr, "%s: %zu cells, pass=%s\n", name.c_str(), cells.size(),
                     pass ? "true" : "false");

    outcome.pass = pass;
    outcome.exit_code = pass ? 0 : (numeric_failures > 0 ? 3 : 1);
    return outcome;
}

} // namespace bht::harness
