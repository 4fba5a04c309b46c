#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bhtlab/bht_ops.hpp"
#include "bhtlab/catalog.hpp"
#include "bhtlab/kernels.hpp"
#include "bhtlab/lebesgue.hpp"
#include "bhtlab/quadrature.hpp"

namespace bht::harness {

enum class Experiment {
    Eval,
    Invert,
    SweepGap,
    SweepPoisson,
    Mollifier,
    Lebesgue,
    ProductLemmas,
    Dual,
    NormProbe
};

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

/// Pass/fail thresholds; every default is also echoed into the JSON summary
/// so reports carry no hidden defaults.
struct Tolerances {
    double rel_err = 1e-5;
    double imag_residue = 1e-6;
    double slope_min = 0.9;
    double r2_min = 0.98;
    double margin_floor = -1e-9;
    double theta_final_max = 1e-3;
    double mollifier_limit_tol = 1e-5;
    double leibniz_m1 = 1e-4;
    double leibniz_m2 = 1e-3;
    double constants_residual = 1e-9;
    double bad_point_floor = 0.1;
    double consistency = 1e-12;
    double grid_change_max = 0.01;
};

struct RunConfig {
    Experiment experiment = Experiment::Invert;
    std::vector<std::pair<FunctionSpec, FunctionSpec>> pairs;
    std::vector<FunctionSpec> functions;
    std::vector<long long> multi_exponents;

    std::vector<double> alpha_list;
    std::vector<double> x_grid;
    std::vector<double> eps_ladder;
    std::vector<double> radius_ladder;
    std::vector<double> p_list;
    std::vector<double> weak_ladder;
    double dual_eps = 0.02;
    double psi_support = 2.0;
    KernelKind kernel = KernelKind::Poisson;

    Tolerances tol;
    QuadConfig quad;
    std::uint64_t seed = 0;
    std::string output_path = "out";

    void apply_defaults();
    void validate() const;
};

/// Parse the plain-text key/value section format used by the experiment
/// directories. Throws ConfigError with a line reference on bad input.
RunConfig load_run_config(const std::string& path);

struct RunOutcome {
    bool pass = false;
    int exit_code = 1; ///< 0 pass, 1 assertion failure, 2 config error, 3 numerical failure
    std::string csv_path;
    std::string json_path;
};

/// Execute the configured experiment over its grid, write <experiment>.csv
/// (one row per evaluation) and <experiment>_summary.json under out_dir.
/// Identical config + seed produce byte-identical files; the jobs count
/// changes scheduling only, never emitted values.
RunOutcome run(const RunConfig& cfg, const std::string& out_dir, int jobs = 1,
               bool verbose = false);

// Rate/extrapolation helpers live in rates.hpp; re-exported here for callers
// that think of them as harness operations.

} // namespace bht::harness
