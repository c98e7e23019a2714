#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "clm/experiment.hpp"

namespace {

int report_and_count(const clm::RunReport& rep) {
    int failures = 0;
    std::printf("experiment %-26s outcome=%s  wall=%.2fs\n",
                clm::to_string(rep.config.experiment).c_str(), rep.outcome.c_str(),
                rep.wall_time_seconds);
    for (const auto& [key, val] : rep.rates) std::printf("  %-28s %.6g\n", key.c_str(), val);
    for (const auto& [name, pass] : rep.checks) {
        std::printf("  [%s] %s\n", pass ? "ok" : "FAIL", name.c_str());
        if (!pass) ++failures;
    }
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral solver and linearized-operator workbench for the "
                 "De Gregorio / Constantin-Lax-Majda family on the circle"};
    app.require_subcommand(1);

    // run: load a config file, optionally override pieces of it
    std::string config_path;
    std::string opt_model, opt_experiment, opt_gauge, opt_init, opt_out;
    int opt_N = -1, opt_sample = -1;
    double opt_dt = -1, opt_T = -1, opt_eps = -1;
    long long opt_seed = -1;
    CLI::App* cmd_run = app.add_subcommand("run", "run one experiment from a config file");
    cmd_run->add_option("config", config_path, "key = value config file")->required();
    cmd_run->add_option("--model", opt_model, "degregorio | clm");
    cmd_run->add_option("--experiment", opt_experiment, "experiment kind");
    cmd_run->add_option("--N", opt_N, "spectral truncation order");
    cmd_run->add_option("--dt", opt_dt, "time step");
    cmd_run->add_option("--T", opt_T, "final time");
    cmd_run->add_option("--gauge", opt_gauge, "mean_zero | vanish_at_zero");
    cmd_run->add_option("--init", opt_init, "initial data descriptor, e.g. bump(a=2)");
    cmd_run->add_option("--eps", opt_eps, "perturbation size override");
    cmd_run->add_option("--seed", opt_seed, "random seed override");
    cmd_run->add_option("--sample-every", opt_sample, "steps between samples");
    cmd_run->add_option("--out", opt_out, "output directory");

    std::string suite_out = "out";
    CLI::App* cmd_suite = app.add_subcommand("suite", "run the pinned experiment suite");
    cmd_suite->add_option("--out", suite_out, "output directory");

    int oracle_K = 40;
    CLI::App* cmd_oracle =
        app.add_subcommand("oracle", "finite-difference check of the linearized operators");
    cmd_oracle->add_option("--K", oracle_K, "number of probed modes");
    cmd_oracle->add_option("--out", suite_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            clm::ExperimentConfig cfg = clm::parse_config_file(config_path);
            if (!opt_model.empty()) cfg.model = clm::model_from_string(opt_model);
            if (!opt_experiment.empty()) cfg.experiment = clm::experiment_from_string(opt_experiment);
            if (opt_N > 0) cfg.N = opt_N;
            if (opt_dt > 0) cfg.dt = opt_dt;
            if (opt_T >= 0) cfg.T = opt_T;
            if (!opt_gauge.empty()) cfg.gauge = clm::gauge_from_string(opt_gauge);
            if (!opt_init.empty()) cfg.init = clm::parse_init(opt_init);
            if (opt_eps >= 0) cfg.init.eps = opt_eps;
            if (opt_seed >= 0) cfg.init.seed = static_cast<unsigned long>(opt_seed);
            if (opt_sample > 0) cfg.sample_every = opt_sample;
            if (!opt_out.empty()) cfg.output_dir = opt_out;
            return report_and_count(clm::run(cfg)) == 0 ? 0 : 1;
        }
        if (cmd_suite->parsed()) {
            int failures = 0;
            for (clm::ExperimentKind k :
                 {clm::ExperimentKind::Conservation, clm::ExperimentKind::GroundStability,
                  clm::ExperimentKind::ShiftedGroundStability, clm::ExperimentKind::ExcitedLinear,
                  clm::ExperimentKind::LinearDecay, clm::ExperimentKind::OracleCheck,
                  clm::ExperimentKind::SqrtScheme}) {
                clm::ExperimentConfig cfg = clm::suite_config(k);
                cfg.output_dir = suite_out;
                failures += report_and_count(clm::run(cfg));
            }
            std::printf("suite: %d failing check(s)\n", failures);
            return failures == 0 ? 0 : 1;
        }
        // oracle
        clm::ExperimentConfig cfg = clm::suite_config(clm::ExperimentKind::OracleCheck);
        cfg.N = oracle_K;
        cfg.output_dir = suite_out;
        return report_and_count(clm::run(cfg)) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
