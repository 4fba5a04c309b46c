// Batch driver for the bilinear Hilbert transform lab: runs configured
// experiments (inversion sweeps, gap/residual sweeps, mollifier pairings,
// Lebesgue-point profiles, product inequalities, dual pairings, norm probes)
// and emits CSV rows plus a JSON summary per run.
//
// Exit codes: 0 all checks pass, 1 assertion failure, 2 configuration error,
// 3 numerical (quadrature) failure.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "bhtlab/harness.hpp"

namespace {

struct SubArgs {
    std::string config;
    std::string out; // empty: fall back to the config's output path
    int jobs = 1;
    bool verbose = false;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("--config", args.config, "run config file")->required();
    sub->add_option("--out", args.out, "output directory (default: config output)");
    sub->add_option("--jobs", args.jobs, "worker pool size");
    sub->add_flag("--verbose", args.verbose, "progress to stderr");
}

bool experiment_allowed(const std::string& subcommand, bht::harness::Experiment e) {
    using E = bht::harness::Experiment;
    if (subcommand == "eval") return e == E::Eval;
    if (subcommand == "invert") return e == E::Invert;
    if (subcommand == "sweep")
        return e == E::SweepGap || e == E::SweepPoisson || e == E::Mollifier;
    if (subcommand == "lebesgue") return e == E::Lebesgue;
    if (subcommand == "lemmas") return e == E::ProductLemmas;
    if (subcommand == "dual") return e == E::Dual;
    if (subcommand == "probe") return e == E::NormProbe;
    return false;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bilinear Hilbert transform lab"};
    app.require_subcommand(1);

    const std::pair<const char*, const char*> subs[] = {
        {"eval", "evaluate the regularized transform over a grid"},
        {"invert", "product recovery via the inversion identity"},
        {"sweep", "eps-sweeps: gap, Poisson residual, or mollifier pairing"},
        {"lebesgue", "theta profiles and Lebesgue-point classification"},
        {"lemmas", "nesting and product oscillation inequalities"},
        {"dual", "derivative identity and weak-limit pairings"},
        {"probe", "empirical norm-ratio probe"},
    };

    SubArgs args;
    std::string chosen;
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        add_common(sub, args);
        sub->callback([&chosen, name = std::string(name)]() { chosen = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const bht::harness::RunConfig cfg = bht::harness::load_run_config(args.config);
        if (!experiment_allowed(chosen, cfg.experiment)) {
            std::fprintf(stderr, "error: config experiment '%s' does not belong to '%s'\n",
                         bht::harness::experiment_name(cfg.experiment).c_str(),
                         chosen.c_str());
            return 2;
        }
        const std::string out_dir = args.out.empty() ? cfg.output_path : args.out;
        const bht::harness::RunOutcome outcome =
            bht::harness::run(cfg, out_dir, args.jobs, args.verbose);
        std::printf("%s: %s\n  csv:  %s\n  json: %s\n",
                    bht::harness::experiment_name(cfg.experiment).c_str(),
                    outcome.pass ? "PASS" : "FAIL", outcome.csv_path.c_str(),
                    outcome.json_path.c_str());
        return outcome.exit_code;
    } catch (const bht::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const bht::AccuracyError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
