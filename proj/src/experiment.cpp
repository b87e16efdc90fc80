#include "faassim/experiment.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace faassim {

using nlohmann::json;

namespace {

double json_keep_alive(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "infinite" || s == "inf") return kInfiniteKeepAlive;
        throw std::invalid_argument("functions.keep_alive_s: expected a number or \"infinite\"");
    }
    return j.get<double>();
}

WorkloadSpec workload_from_json(const json& j) {
    if (j.contains("preset")) {
        WorkloadSpec spec = WorkloadSpec::preset(j.at("preset").get<std::string>());
        if (j.contains("duration_s")) spec.duration = j.at("duration_s").get<double>();
        return spec;
    }
    WorkloadSpec spec;
    spec.n_functions = j.at("n_functions").get<int>();
    if (j.contains("popularity"))
        spec.popularity = j.at("popularity").get<std::vector<double>>();
    else if (j.contains("hot_share"))
        spec.popularity = skewed_popularity(spec.n_functions, j.at("hot_share").get<double>());
    else
        spec.popularity = std::vector<double>(static_cast<std::size_t>(spec.n_functions),
                                              1.0 / spec.n_functions);
    const json& exec = j.at("exec");
    const auto type = exec.at("type").get<std::string>();
    if (type == "lognormal")
        spec.exec = LogNormalExec{exec.at("mu").get<double>(), exec.at("sigma").get<double>()};
    else if (type == "exponential")
        spec.exec = ExponentialExec{exec.at("mean").get<double>()};
    else if (type == "per_function")
        spec.exec = PerFunctionExec{exec.at("mean_by_function").get<std::vector<double>>()};
    else
        throw std::invalid_argument("workload.exec.type must be lognormal, exponential or per_function");
    if (j.contains("duration_s")) spec.duration = j.at("duration_s").get<double>();
    return spec;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(origin + ": " + e.what());
    }

    ExperimentConfig cfg;
    try {
        const json& cl = j.at("cluster");
        cfg.cluster.n_workers = cl.at("workers").get<int>();
        cfg.cluster.cores_per_worker = cl.at("cores_per_worker").get<int>();
        if (cl.contains("slot_capacity")) {
            const json& sc = cl.at("slot_capacity");
            if (sc.is_string()) {
                if (sc.get<std::string>() != "8x")
                    throw std::invalid_argument("cluster.slot_capacity: expected \"8x\" or an integer");
            } else {
                cfg.cluster.fixed_slot_capacity = sc.get<int>();
            }
        }

        const json& w = j.at("workload");
        if (w.contains("trace")) {
            cfg.trace_path = w.at("trace").get<std::string>();
            cfg.workload_name = "trace:" + cfg.trace_path;
        } else {
            cfg.workload = workload_from_json(w);
            cfg.workload_name = w.contains("preset") ? w.at("preset").get<std::string>() : "inline";
        }

        if (j.contains("functions")) {
            const json& f = j.at("functions");
            if (f.contains("memory_mb")) cfg.functions.memory_mb = f.at("memory_mb").get<int>();
            if (f.contains("cold_start_penalty_s"))
                cfg.functions.cold_start_penalty = f.at("cold_start_penalty_s").get<double>();
            if (f.contains("keep_alive_s"))
                cfg.functions.keep_alive = json_keep_alive(f.at("keep_alive_s"));
        }

        for (const auto& p : j.at("policies")) {
            const auto text_p = p.get<std::string>();
            cfg.policies.push_back(Policy::parse(text_p));
            cfg.policy_names.push_back(cfg.policies.back().to_string());
        }
        cfg.loads = j.at("loads").get<std::vector<double>>();
        if (j.contains("load_unit")) {
            const auto unit = j.at("load_unit").get<std::string>();
            if (unit == "rps") cfg.loads_are_rps = true;
            else if (unit != "fraction")
                throw std::invalid_argument("load_unit must be \"fraction\" or \"rps\"");
        }
        cfg.seeds = j.contains("seeds") ? j.at("seeds").get<std::vector<std::uint64_t>>()
                                        : std::vector<std::uint64_t>{1};

        if (j.contains("stop")) {
            const json& s = j.at("stop");
            cfg.stop = StopCondition{};
            if (s.contains("max_completions"))
                cfg.stop.max_completions = s.at("max_completions").get<std::uint64_t>();
            if (s.contains("max_time_s")) cfg.stop.max_time = s.at("max_time_s").get<double>();
            cfg.stop.until_all = s.value("until_all", cfg.stop.max_completions && cfg.stop.max_time);
        }
        if (j.contains("warmup_fraction")) cfg.warmup_fraction = j.at("warmup_fraction").get<double>();
        if (j.contains("sample_window_s")) cfg.sample_window = j.at("sample_window_s").get<double>();
        if (j.contains("per_invocation_records"))
            cfg.per_invocation_records = j.at("per_invocation_records").get<bool>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(origin + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    cluster.validate();
    if (trace_path.empty()) workload.validate();
    if (policies.empty()) throw std::invalid_argument("policies: at least one policy required");
    if (loads.empty()) throw std::invalid_argument("loads: at least one load required");
    for (double l : loads)
        if (!(l > 0.0)) throw std::invalid_argument("loads must be positive");
    if (seeds.empty()) throw std::invalid_argument("seeds: at least one seed required");
    if (!stop.max_completions && !stop.max_time && trace_path.empty() &&
        !std::isfinite(workload.duration))
        throw std::invalid_argument("stop: set max_completions and/or max_time_s");
}

SimConfig ExperimentConfig::point(std::size_t policy_idx, std::size_t load_idx,
                                  std::size_t seed_idx) const {
    SimConfig sim;
    sim.cluster = cluster;
    sim.policy = policies.at(policy_idx);
    sim.trace_path = trace_path;
    sim.functions = functions;
    sim.stop = stop;
    sim.warmup_fraction = warmup_fraction;
    sim.sample_window = sample_window;
    sim.seed = seeds.at(seed_idx);
    sim.offered_load = loads.at(load_idx);
    if (trace_path.empty()) {
        sim.workload = workload;
        sim.workload.arrival.rate =
            loads_are_rps ? loads[load_idx]
                          : load_fraction_to_rate(loads[load_idx], cluster.total_cores(),
                                                  workload.exec_mean());
    }
    return sim;
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["cluster"] = {{"workers", cluster.n_workers},
                    {"cores_per_worker", cluster.cores_per_worker},
                    {"slot_capacity", cluster.slot_capacity()}};
    j["workload"] = workload_name;
    j["functions"] = {{"memory_mb", functions.memory_mb},
                      {"cold_start_penalty_s", functions.cold_start_penalty},
                      {"keep_alive_s", std::isfinite(functions.keep_alive)
                                           ? json(functions.keep_alive)
                                           : json("infinite")}};
    j["policies"] = policy_names;
    j["loads"] = loads;
    j["load_unit"] = loads_are_rps ? "rps" : "fraction";
    j["seeds"] = seeds;
    json stop_j;
    if (stop.max_completions) stop_j["max_completions"] = *stop.max_completions;
    if (stop.max_time) stop_j["max_time_s"] = *stop.max_time;
    stop_j["until_all"] = stop.until_all;
    j["stop"] = stop_j;
    j["warmup_fraction"] = warmup_fraction;
    j["sample_window_s"] = sample_window;
    j["per_invocation_records"] = per_invocation_records;
    return j.dump(2);
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

std::string load_token(double load) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", load);
    return sanitize(buf);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int parallelism, bool quiet) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);

    struct Point {
        std::size_t p, l, s;
    };
    std::vector<Point> points;
    for (std::size_t p = 0; p < config.policies.size(); ++p)
        for (std::size_t l = 0; l < config.loads.size(); ++l)
            for (std::size_t s = 0; s < config.seeds.size(); ++s) points.push_back({p, l, s});

    std::vector<Summary> summaries(points.size());
    std::vector<SimReport> reports;
    if (config.per_invocation_records) reports.resize(points.size());

    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::string first_error;

    auto worker_fn = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            try {
                const SimConfig sim = config.point(points[i].p, points[i].l, points[i].s);
                SimReport report = run_simulation(sim);
                summaries[i] = summarize(report);
                if (config.per_invocation_records) reports[i] = std::move(report);
                if (!quiet) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    std::cerr << "  done " << config.policy_names[points[i].p] << " load "
                              << config.loads[points[i].l] << " seed " << config.seeds[points[i].s]
                              << " (" << summaries[i].completions << " completions)\n";
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (first_error.empty()) first_error = e.what();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(parallelism, static_cast<int>(points.size())));
    if (n_threads == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("sweep aborted: " + first_error);

    ExperimentResult result;
    result.points = points.size();
    result.summary_csv_path = (fs::path(config.output_dir) / "summary.csv").string();
    {
        std::ofstream out(result.summary_csv_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + result.summary_csv_path);
        out << summary_csv_header() << '\n';
        for (std::size_t i = 0; i < points.size(); ++i)
            out << summary_csv_row(config.policy_names[points[i].p], config.loads[points[i].l],
                                   config.seeds[points[i].s], summaries[i])
                << '\n';
    }

    if (config.per_invocation_records) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::string name = "records_" + sanitize(config.policy_names[points[i].p]) + "_" +
                                     load_token(config.loads[points[i].l]) + "_" +
                                     std::to_string(config.seeds[points[i].s]) + ".csv";
            std::ofstream out(fs::path(config.output_dir) / name, std::ios::trunc);
            out << per_invocation_csv_header() << '\n';
            for (const CompletionRecord& rec : reports[i].completions)
                out << per_invocation_csv_row(rec) << '\n';
        }
    }

    result.manifest_path = (fs::path(config.output_dir) / "manifest.json").string();
    {
        const std::string canonical = config.canonical_json();
        json manifest;
        manifest["tool"] = "faassim";
        manifest["version"] = "0.1.0";
        manifest["config_hash"] = fnv1a64(canonical);
        manifest["config"] = json::parse(canonical);
        manifest["points"] = points.size();
        std::ofstream out(result.manifest_path, std::ios::trunc);
        out << manifest.dump(2) << '\n';
    }
    return result;
}

double erlang_c(int servers, double offered_erlangs) {
    if (servers <= 0) throw std::invalid_argument("erlang_c: servers must be positive");
    const double rho = offered_erlangs / servers;
    if (!(rho < 1.0)) throw std::invalid_argument("erlang_c: requires offered load < servers");
    double erlang_b = 1.0;
    for (int n = 1; n <= servers; ++n)
        erlang_b = offered_erlangs * erlang_b / (n + offered_erlangs * erlang_b);
    return erlang_b / (1.0 - rho * (1.0 - erlang_b));
}

namespace {

SimConfig oracle_base(std::uint64_t completions) {
    SimConfig sim;
    sim.cluster = ClusterSpec{1, 1, std::nullopt};
    sim.workload.n_functions = 1;
    sim.workload.popularity = {1.0};
    sim.workload.arrival.rate = 0.5;
    sim.workload.exec = ExponentialExec{1.0};
    sim.stop.max_completions = completions;
    sim.sample_window = 0.0; // not needed; keeps long runs lean
    sim.seed = 20240915;
    return sim;
}

double mean_latency(const SimReport& report) {
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const auto& rec : report.completions) {
        if (rec.arrival < report.warmup_cutoff) continue;
        sum += rec.latency();
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double mean_wait(const SimReport& report) {
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const auto& rec : report.completions) {
        if (rec.arrival < report.warmup_cutoff) continue;
        sum += rec.dispatch - rec.arrival;
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

} // namespace

// M/M/1 FCFS: mean response 1/(mu - lambda) = 2.0 s at lambda=0.5, mu=1.
OracleOutcome oracle_mm1_fcfs(std::uint64_t completions) {
    SimConfig sim = oracle_base(completions);
    sim.cluster.fixed_slot_capacity = 1'000'000; // queue is effectively unbounded
    sim.policy = Policy::parse("E/LL/FCFS");
    const SimReport report = run_simulation(sim);
    OracleOutcome o{"M/M/1 FCFS mean response", mean_latency(report), 2.0, 0.02, false};
    o.pass = std::abs(o.measured - o.expected) <= o.tolerance * o.expected;
    return o;
}

// M/M/1 PS: same mean response as FCFS (PS insensitivity).
OracleOutcome oracle_mm1_ps(std::uint64_t completions) {
    SimConfig sim = oracle_base(completions);
    sim.cluster.fixed_slot_capacity = 1'000'000;
    sim.policy = Policy::parse("E/LL/PS");
    const SimReport report = run_simulation(sim);
    OracleOutcome o{"M/M/1 PS mean response", mean_latency(report), 2.0, 0.02, false};
    o.pass = std::abs(o.measured - o.expected) <= o.tolerance * o.expected;
    return o;
}

// M/M/c via late binding: 4 x 1-core workers, lambda=3.2, mu=1; mean wait
// equals ErlangC(4, 3.2) / (c*mu - lambda).
OracleOutcome oracle_mmc_late(std::uint64_t completions) {
    SimConfig sim = oracle_base(completions);
    sim.cluster = ClusterSpec{4, 1, std::nullopt};
    sim.workload.arrival.rate = 3.2;
    sim.policy = Policy::parse("L");
    const SimReport report = run_simulation(sim);
    const double expected_wait = erlang_c(4, 3.2) / (4.0 - 3.2);
    OracleOutcome o{"M/M/4 late-binding mean wait", mean_wait(report), expected_wait, 0.03, false};
    o.pass = std::abs(o.measured - o.expected) <= o.tolerance * o.expected;
    return o;
}

} // namespace faassim
