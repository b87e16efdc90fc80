#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faassim/experiment.hpp"
#include "faassim/plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeAbort = 2;

void print_oracle(const faassim::OracleOutcome& o) {
    std::printf("%-32s measured %.5f  expected %.5f  (tol %.0f%%)  %s\n", o.name.c_str(),
                o.measured, o.expected, o.tolerance * 100.0, o.pass ? "PASS" : "FAIL");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"faassim: serverless function scheduling simulator"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_out;
    std::vector<std::uint64_t> run_seeds;
    int parallelism = 1;
    auto* run_cmd = app.add_subcommand("run", "run a policy x load x seed sweep");
    run_cmd->add_option("config", run_config, "experiment config (JSON)")->required();
    run_cmd->add_option("--out", run_out, "output directory (overrides config)");
    run_cmd->add_option("--seeds", run_seeds, "override config seeds");
    run_cmd->add_option("--parallelism", parallelism, "engines to run concurrently")
        ->check(CLI::PositiveNumber);

    // plot
    std::string plot_summary_path, plot_out = "plot.svg", plot_metric = "p99_slowdown", plot_title;
    bool plot_logy = false;
    auto* plot_cmd = app.add_subcommand("plot", "render a metric-vs-load chart from a summary CSV");
    plot_cmd->add_option("summary", plot_summary_path, "summary.csv from a run")->required();
    plot_cmd->add_option("--metric", plot_metric, "summary column to plot");
    plot_cmd->add_option("--out", plot_out, "output SVG path");
    plot_cmd->add_option("--title", plot_title, "chart title");
    plot_cmd->add_flag("--log-y", plot_logy, "logarithmic y axis");

    // validate
    std::string validate_config;
    auto* validate_cmd = app.add_subcommand("validate", "check a config file and exit");
    validate_cmd->add_option("config", validate_config, "experiment config (JSON)")->required();

    // oracle
    std::string oracle_which = "all";
    std::uint64_t oracle_completions = 1'000'000;
    auto* oracle_cmd = app.add_subcommand("oracle", "run the analytic queueing self-checks");
    oracle_cmd->add_option("which", oracle_which, "mm1 | mmc | all");
    oracle_cmd->add_option("--completions", oracle_completions, "completions per check");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            faassim::ExperimentConfig config;
            try {
                config = faassim::ExperimentConfig::from_json_file(run_config);
                if (!run_out.empty()) config.output_dir = run_out;
                if (!run_seeds.empty()) config.seeds = run_seeds;
                config.validate();
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return kExitConfigError;
            }
            const auto result = faassim::run_experiment(config, parallelism);
            std::cout << "wrote " << result.summary_csv_path << " (" << result.points
                      << " points) and " << result.manifest_path << '\n';
            return kExitOk;
        }
        if (*plot_cmd) {
            faassim::PlotOptions options;
            options.metric = plot_metric;
            options.log_y = plot_logy;
            options.title = plot_title;
            try {
                faassim::plot_summary(plot_summary_path, options, plot_out);
            } catch (const std::invalid_argument& e) {
                std::cerr << "plot error: " << e.what() << '\n';
                return kExitConfigError;
            }
            std::cout << "wrote " << plot_out << '\n';
            return kExitOk;
        }
        if (*validate_cmd) {
            try {
                (void)faassim::ExperimentConfig::from_json_file(validate_config);
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error: " << e.what() << '\n';
                return kExitConfigError;
            }
            std::cout << validate_config << ": ok\n";
            return kExitOk;
        }
        if (*oracle_cmd) {
            bool all_pass = true;
            if (oracle_which == "mm1" || oracle_which == "all") {
                auto a = faassim::oracle_mm1_fcfs(oracle_completions);
                auto b = faassim::oracle_mm1_ps(oracle_completions);
                print_oracle(a);
                print_oracle(b);
                all_pass = all_pass && a.pass && b.pass;
            }
            if (oracle_which == "mmc" || oracle_which == "all") {
                auto c = faassim::oracle_mmc_late(oracle_completions);
                print_oracle(c);
                all_pass = all_pass && c.pass;
            }
            if (oracle_which != "mm1" && oracle_which != "mmc" && oracle_which != "all") {
                std::cerr << "unknown oracle '" << oracle_which << "' (expected mm1, mmc or all)\n";
                return kExitConfigError;
            }
            return all_pass ? kExitOk : kExitRuntimeAbort;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeAbort;
    }
    return kExitOk;
}
