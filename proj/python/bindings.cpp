// Python bindings for the main operations: catalog functions, the truncated,
// regularized and principal-value transforms, inversion, mollifier pairings,
// Lebesgue-point diagnostics, rate fitting, and the batch runner.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>

#include "bhtlab/bht_ops.hpp"
#include "bhtlab/dual_checks.hpp"
#include "bhtlab/harness.hpp"
#include "bhtlab/kernels.hpp"
#include "bhtlab/lebesgue.hpp"
#include "bhtlab/rates.hpp"

namespace py = pybind11;
using namespace bht;

namespace {

Kernel kernel_by_name(const std::string& name) {
    if (name == "poisson")
        return poisson_kernel();
    if (name == "pv_gap")
        return pv_gap_kernel();
    throw ParamError("kernel must be 'poisson' or 'pv_gap'");
}

QuadConfig quad_config(double rel_tol, double abs_tol, int max_subdivisions) {
    QuadConfig q;
    q.rel_tol = rel_tol;
    q.abs_tol = abs_tol;
    q.max_subdivisions = max_subdivisions;
    return q;
}

std::vector<double> ladder_or_default(const std::vector<double>& ladder) {
    return ladder.empty() ? default_eps_ladder() : ladder;
}

double pick_radius(const FunctionSpec& f, const FunctionSpec& g, double alpha, double x,
                   double radius) {
    return radius > 0.0 ? radius : default_truncation_radius(f, g, alpha, x);
}

py::dict report_dict(const ConvergenceReport& rep) {
    py::dict d;
    d["eps_ladder"] = rep.eps_ladder;
    std::vector<std::complex<double>> values;
    for (const auto& v : rep.values)
        values.emplace_back(v.re, v.im);
    d["values"] = values;
    d["extrapolated"] = std::complex<double>(rep.extrapolated.re, rep.extrapolated.im);
    d["fitted_rate"] = rep.fitted_rate;
    d["residuals"] = rep.residuals;
    d["ok"] = rep.extrapolation_ok;
    d["flag"] = rep.flag;
    return d;
}

const char* class_name(LebesgueClass c) {
    switch (c) {
    case LebesgueClass::LebesguePoint: return "lebesgue_point";
    case LebesgueClass::NotLebesgue: return "not_lebesgue";
    case LebesgueClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "bilinear Hilbert transform lab: operators, inversion, and "
              "Lebesgue-point diagnostics";

    py::class_<FunctionSpec>(m, "FunctionSpec")
        .def("__repr__", [](const FunctionSpec& s) { return spec_label(s); })
        .def("__call__",
             [](const FunctionSpec& s, double x) { return make_function(s)(x); })
        .def_property_readonly("label", [](const FunctionSpec& s) { return spec_label(s); })
        .def_property_readonly("known_bad_points",
                               [](const FunctionSpec& s) { return s.known_bad_points; });

    m.def("function", &parse_spec, py::arg("label"),
          "parse a catalog label like 'gaussian(center=0,width=1)'");
    m.def("constant", &constant_spec, py::arg("value") = 1.0);
    m.def("gaussian", &gaussian_spec, py::arg("center") = 0.0, py::arg("width") = 1.0);
    m.def("lorentzian", &lorentzian_spec, py::arg("center") = 0.0, py::arg("width") = 1.0);
    m.def("smooth_bump", &smooth_bump_spec, py::arg("support") = 1.0);
    m.def("oscillatory", &oscillatory_spec, py::arg("center") = 0.0, py::arg("width") = 1.0,
          py::arg("frequency") = 1.0);
    m.def("sign_jump", &sign_jump_spec, py::arg("center") = 0.0);
    m.def("power_cusp", &power_cusp_spec, py::arg("center") = 0.0, py::arg("beta") = 0.5);
    m.def("polynomial", &polynomial_spec, py::arg("coeffs"));
    m.def("sampled_from_csv",
          [](const std::string& path) { return sampled_spec(load_grid_csv(path)); },
          py::arg("path"));
    m.def("derivative",
          [](const FunctionSpec& s, int order, double x) {
              return derivative_function(s, order)(x);
          },
          py::arg("spec"), py::arg("order"), py::arg("x"));

    m.def("default_eps_ladder", &default_eps_ladder, py::arg("count") = 10);

    m.def(
        "bht_truncated",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha, double eps,
           double radius, double rel_tol, double abs_tol, int max_subdivisions) {
            BhtParams p{alpha, eps, pick_radius(f, g, alpha, x, radius),
                        quad_config(rel_tol, abs_tol, max_subdivisions)};
            const EvalResult r = bht_truncated(make_function(f), make_function(g), x, p);
            return py::make_tuple(r.value, r.err_est);
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"), py::arg("eps"),
        py::arg("radius") = 0.0, py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12,
        py::arg("max_subdivisions") = 2000,
        "truncated transform over eps <= |t| <= radius; returns (value, err_est)");

    m.def(
        "bht_regularized",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha, double eps,
           double radius, double rel_tol, double abs_tol, int max_subdivisions) {
            BhtParams p{alpha, eps, pick_radius(f, g, alpha, x, radius),
                        quad_config(rel_tol, abs_tol, max_subdivisions)};
            const ComplexResult r = bht_regularized(make_function(f), make_function(g), x, p);
            return std::complex<double>(r.value.re, r.value.im);
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"), py::arg("eps"),
        py::arg("radius") = 0.0, py::arg("rel_tol") = 1e-9, py::arg("abs_tol") = 1e-12,
        py::arg("max_subdivisions") = 2000,
        "regularized transform with kernel 1/(t + i eps)");

    m.def(
        "bht_pv",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha,
           const std::vector<double>& eps_ladder) {
            return report_dict(bht_pv(f, g, x, alpha, ladder_or_default(eps_ladder)));
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"),
        py::arg("eps_ladder") = std::vector<double>{},
        "eps-sweep of the truncated transform with extrapolation to eps -> 0");

    m.def(
        "invert_product",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha,
           const std::vector<double>& eps_ladder, double imag_tol) {
            const InversionResult inv = invert_product(
                f, g, x, alpha, ladder_or_default(eps_ladder), QuadConfig{}, imag_tol);
            py::dict d;
            d["recovered"] = inv.recovered;
            d["imag_residue"] = inv.imag_residue;
            d["ok"] = inv.inversion_ok;
            d["report"] = report_dict(inv.report);
            return d;
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"),
        py::arg("eps_ladder") = std::vector<double>{}, py::arg("imag_tol") = 1e-6,
        "recover f(x) g(x) from the regularized/truncated difference");

    m.def(
        "poisson_residual",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha, double eps) {
            return poisson_residual(make_function(f), make_function(g), x, alpha, eps).value;
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"), py::arg("eps"));

    m.def(
        "regularization_gap",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha, double eps,
           double radius) {
            return regularization_gap(make_function(f), make_function(g), x, alpha, eps,
                                      pick_radius(f, g, alpha, x, radius))
                .value;
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"), py::arg("eps"),
        py::arg("radius") = 0.0);

    m.def(
        "mollifier_pair",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha,
           const std::string& kernel, double eps) {
            return mollifier_pair(make_function(f), make_function(g), x, alpha,
                                  kernel_by_name(kernel), eps)
                .value;
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"), py::arg("kernel"),
        py::arg("eps"));

    m.def("pv_gap_phi", &pv_gap_phi, py::arg("t"));
    m.def(
        "majorant_psi",
        [](const std::string& kernel, double x) { return majorant_psi(kernel_by_name(kernel), x); },
        py::arg("kernel"), py::arg("x"));
    m.def(
        "majorant_integral",
        [](const std::string& kernel, double tol) {
            return majorant_integral(kernel_by_name(kernel), tol);
        },
        py::arg("kernel"), py::arg("tol") = 1e-12);

    m.def(
        "theta",
        [](const FunctionSpec& f, double x, double r, double p) {
            return theta(make_function(f), x, r, p);
        },
        py::arg("f"), py::arg("x"), py::arg("r"), py::arg("p"),
        "local p-mean oscillation (1/r) integral over |t|<r of |f(x-t)-f(x)|^p");

    m.def(
        "lebesgue_profile",
        [](const FunctionSpec& f, double x, double p, const std::vector<double>& radii) {
            std::vector<double> rr = radii;
            if (rr.empty()) {
                double r = 0.2;
                for (int i = 0; i < 10; ++i) {
                    rr.push_back(r);
                    r *= 0.5;
                }
            }
            const ThetaProfile prof = lebesgue_profile(make_function(f), x, p, rr);
            py::dict d;
            d["radii"] = prof.radii;
            d["theta"] = prof.theta;
            d["slope"] = prof.fitted_slope;
            d["r_squared"] = prof.r_squared;
            d["classification"] = class_name(prof.classification);
            return d;
        },
        py::arg("f"), py::arg("x"), py::arg("p"),
        py::arg("radii") = std::vector<double>{});

    m.def(
        "check_nesting",
        [](const FunctionSpec& f, double x, double r, double p1, double p2) {
            return check_nesting(make_function(f), x, r, p1, p2);
        },
        py::arg("f"), py::arg("x"), py::arg("r"), py::arg("p1"), py::arg("p2"));

    m.def(
        "check_product",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double r, double p1,
           double p2) {
            const ProductMargins mm =
                check_product(make_function(f), make_function(g), x, r, p1, p2);
            py::dict d;
            d["regime"] = mm.regime == ProductRegime::Conjugate ? "conjugate" : "split";
            d["p3"] = mm.p3;
            d["theta_product"] = mm.theta_product;
            d["split_margin"] = mm.split_margin;
            d["i_margin"] = mm.i_margin;
            d["j_margin"] = mm.j_margin;
            d["min_margin"] = mm.min_margin();
            return d;
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("r"), py::arg("p1"), py::arg("p2"));

    m.def(
        "check_multi_product",
        [](const std::vector<FunctionSpec>& fs, const std::vector<long long>& ps, double x,
           double r) {
            std::vector<RealFn> fns;
            for (const auto& s : fs)
                fns.push_back(make_function(s));
            const MultiProductReport rep = check_multi_product(fns, ps, x, r);
            py::dict d;
            d["final_exponent"] = rep.final_exponent.to_double();
            d["theta_final"] = rep.theta_final;
            std::vector<double> chain;
            for (const auto& q : rep.exponent_chain)
                chain.push_back(q.to_double());
            d["exponent_chain"] = chain;
            return d;
        },
        py::arg("functions"), py::arg("exponents"), py::arg("x"), py::arg("r"));

    m.def(
        "leibniz_residual",
        [](const FunctionSpec& f, const FunctionSpec& g, double x, double alpha, double eps,
           int m_order) {
            const LeibnizResult r = leibniz_residual(f, g, x, alpha, eps, m_order);
            py::dict d;
            d["residual"] = r.residual;
            d["inconclusive"] = r.inconclusive;
            return d;
        },
        py::arg("f"), py::arg("g"), py::arg("x"), py::arg("alpha"), py::arg("eps"),
        py::arg("m"));

    m.def(
        "norm_probe",
        [](const FunctionSpec& f, const FunctionSpec& g, double alpha, double p1, double p2) {
            const NormProbeResult r = norm_probe(f, g, alpha, p1, p2);
            py::dict d;
            d["ratio"] = r.ratio;
            d["grid_ratios"] = r.grid_ratios;
            d["grid_rel_change"] = r.grid_rel_change;
            return d;
        },
        py::arg("f"), py::arg("g"), py::arg("alpha"), py::arg("p1"), py::arg("p2"));

    m.def(
        "fit_rate",
        [](const std::vector<double>& ladder, const std::vector<double>& values) {
            const RateFit f = fit_rate(ladder, values);
            py::dict d;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["r_squared"] = f.r_squared;
            d["degenerate"] = f.degenerate;
            return d;
        },
        py::arg("eps_ladder"), py::arg("values"));

    m.def(
        "extrapolate",
        [](const std::vector<double>& ladder, const std::vector<double>& values) {
            const Extrapolation e = extrapolate(ladder, values);
            py::dict d;
            d["limit"] = e.limit;
            d["misfit"] = e.misfit;
            d["reliable"] = e.reliable;
            return d;
        },
        py::arg("eps_ladder"), py::arg("values"));

    m.def(
        "run",
        [](const std::string& config_path, const std::string& out_dir, int jobs) {
            const harness::RunConfig cfg = harness::load_run_config(config_path);
            const harness::RunOutcome outcome = harness::run(cfg, out_dir, jobs);
            py::dict d;
            d["pass"] = outcome.pass;
            d["exit_code"] = outcome.exit_code;
            d["csv_path"] = outcome.csv_path;
            d["json_path"] = outcome.json_path;
            return d;
        },
        py::arg("config_path"), py::arg("out_dir") = "out", py::arg("jobs") = 1,
        "execute a configured experiment and write CSV + JSON reports");
}
