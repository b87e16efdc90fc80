#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faassim/engine.hpp"
#include "faassim/metrics.hpp"
#include "faassim/policy.hpp"

namespace faassim {

// A policy x load x seed sweep described by a JSON config file. Loads are
// offered-load fractions of aggregate core capacity by default, or raw
// requests-per-second when load_unit is "rps".
struct ExperimentConfig {
    ClusterSpec cluster;
    WorkloadSpec workload; // from a preset name or inline spec
    std::string workload_name;
    std::string trace_path;
    FunctionDefaults functions;
    std::vector<Policy> policies;
    std::vector<std::string> policy_names; // as written in the config
    std::vector<double> loads;
    bool loads_are_rps = false;
    std::vector<std::uint64_t> seeds;
    StopCondition stop{100'000, 7200.0, true};
    double warmup_fraction = 0.1;
    double sample_window = 1.0;
    bool per_invocation_records = false;
    std::string output_dir = "out";

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text, const std::string& origin);
    std::string canonical_json() const; // deterministic echo used for hashing

    void validate() const;

    // Simulation config for one sweep point.
    SimConfig point(std::size_t policy_idx, std::size_t load_idx, std::size_t seed_idx) const;
};

struct ExperimentResult {
    std::string summary_csv_path;
    std::string manifest_path;
    std::size_t points = 0;
};

// Runs every (policy, load, seed) point, optionally in parallel over
// independent engines, and writes summary.csv + manifest.json (plus optional
// per-invocation CSVs). Results are merged in key order, so the output bytes
// do not depend on the parallelism level.
ExperimentResult run_experiment(const ExperimentConfig& config, int parallelism = 1,
                                bool quiet = false);

// Self-checking analytic oracles (see the `oracle` CLI subcommand).
struct OracleOutcome {
    std::string name;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0; // relative
    bool pass = false;
};
OracleOutcome oracle_mm1_fcfs(std::uint64_t completions = 1'000'000);
OracleOutcome oracle_mm1_ps(std::uint64_t completions = 1'000'000);
OracleOutcome oracle_mmc_late(std::uint64_t completions = 1'000'000);

// Erlang C: probability an arrival waits in an M/M/c queue.
double erlang_c(int servers, double offered_erlangs);

} // namespace faassim
