#include "faassim/workload.hpp"

#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace faassim {

void WorkloadSpec::validate() const {
    if (n_functions <= 0) throw std::invalid_argument("workload.n_functions must be positive");
    if (popularity.size() != static_cast<std::size_t>(n_functions))
        throw std::invalid_argument("workload.popularity must have n_functions entries");
    double sum = 0.0;
    for (double p : popularity) {
        if (p < 0.0) throw std::invalid_argument("workload.popularity entries must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("workload.popularity must sum to 1 (got " + std::to_string(sum) + ")");
    if (!(arrival.rate > 0.0)) throw std::invalid_argument("workload.arrival.rate must be positive");
    if (const auto* ln = std::get_if<LogNormalExec>(&exec)) {
        if (!(ln->sigma > 0.0)) throw std::invalid_argument("workload.exec.sigma must be positive");
    } else if (const auto* ex = std::get_if<ExponentialExec>(&exec)) {
        if (!(ex->mean > 0.0)) throw std::invalid_argument("workload.exec.mean must be positive");
    } else if (const auto* pf = std::get_if<PerFunctionExec>(&exec)) {
        if (pf->mean_by_function.size() != static_cast<std::size_t>(n_functions))
            throw std::invalid_argument("workload.exec.per_function must have n_functions entries");
        for (double m : pf->mean_by_function)
            if (!(m > 0.0)) throw std::invalid_argument("workload.exec.per_function entries must be positive");
    }
    if (!(duration > 0.0)) throw std::invalid_argument("workload.duration must be positive");
}

double WorkloadSpec::exec_mean() const {
    if (const auto* ln = std::get_if<LogNormalExec>(&exec)) return ln->mean();
    if (const auto* ex = std::get_if<ExponentialExec>(&exec)) return ex->mean;
    const auto& pf = std::get<PerFunctionExec>(exec);
    double mean = 0.0;
    for (std::size_t i = 0; i < pf.mean_by_function.size(); ++i)
        mean += popularity[i] * pf.mean_by_function[i];
    return mean;
}

std::vector<double> skewed_popularity(int n_functions, double hot_share) {
    std::vector<double> p(static_cast<std::size_t>(n_functions));
    if (n_functions == 1) {
        p[0] = 1.0;
        return p;
    }
    p[0] = hot_share;
    const double rest = (1.0 - hot_share) / (n_functions - 1);
    for (int i = 1; i < n_functions; ++i) p[static_cast<std::size_t>(i)] = rest;
    return p;
}

WorkloadSpec WorkloadSpec::preset(const std::string& name) {
    WorkloadSpec spec;
    spec.n_functions = 50;
    spec.exec = LogNormalExec{-0.38, 2.36};
    if (name == "sim-default") {
        spec.popularity = skewed_popularity(50, 0.98);
    } else if (name == "ms-representative") {
        spec.popularity = skewed_popularity(50, 0.90);
    } else if (name == "single-function") {
        spec.n_functions = 1;
        spec.popularity = {1.0};
    } else if (name == "multi-balanced") {
        spec.popularity = std::vector<double>(50, 1.0 / 50.0);
    } else if (name == "homogeneous-exec") {
        spec.popularity = skewed_popularity(50, 0.90);
        spec.exec = ExponentialExec{8.9};
    } else {
        throw std::invalid_argument("unknown workload preset '" + name + "'");
    }
    return spec;
}

std::vector<std::string> WorkloadSpec::preset_names() {
    return {"sim-default", "ms-representative", "single-function", "multi-balanced",
            "homogeneous-exec"};
}

double load_fraction_to_rate(double load, int total_cores, double exec_mean) {
    if (!(load > 0.0)) throw std::invalid_argument("load fraction must be positive");
    if (total_cores <= 0) throw std::invalid_argument("total_cores must be positive");
    if (!(exec_mean > 0.0)) throw std::invalid_argument("exec_mean must be positive");
    return load * total_cores / exec_mean;
}

GeneratedSource::GeneratedSource(const WorkloadSpec& spec)
    : spec_(spec),
      arrival_rng_(Rng::substream(spec.seed, "arrivals")),
      exec_rng_(Rng::substream(spec.seed, "exec-times")),
      function_rng_(Rng::substream(spec.seed, "function-choice")) {
    spec_.validate();
    cumulative_.reserve(spec_.popularity.size());
    double acc = 0.0;
    for (double p : spec_.popularity) {
        acc += p;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

std::optional<ArrivalRecord> GeneratedSource::next() {
    clock_ += sample_exponential(arrival_rng_, 1.0 / spec_.arrival.rate);
    if (clock_ >= spec_.duration) return std::nullopt;

    ArrivalRecord rec;
    rec.arrival_time = clock_;
    rec.function_id = static_cast<FunctionId>(sample_cumulative(function_rng_, cumulative_));
    if (const auto* ln = std::get_if<LogNormalExec>(&spec_.exec))
        rec.exec_time = sample_lognormal(exec_rng_, ln->mu, ln->sigma);
    else if (const auto* ex = std::get_if<ExponentialExec>(&spec_.exec))
        rec.exec_time = sample_exponential(exec_rng_, ex->mean);
    else
        rec.exec_time = sample_exponential(
            exec_rng_, std::get<PerFunctionExec>(spec_.exec)
                           .mean_by_function[static_cast<std::size_t>(rec.function_id)]);
    return rec;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(',', pos);
        std::string f = line.substr(pos, next - pos);
        // trim ascii whitespace
        const auto b = f.find_first_not_of(" \t\r");
        const auto e = f.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string{} : f.substr(b, e - b + 1));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return fields;
}

[[noreturn]] void trace_error(const std::string& path, std::size_t line_no, const std::string& what) {
    throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double_field(const std::string& path, std::size_t line_no, const std::string& field,
                          const std::string& name) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) trace_error(path, line_no, "trailing junk in " + name);
        return v;
    } catch (const std::invalid_argument&) {
        trace_error(path, line_no, "cannot parse " + name + " '" + field + "'");
    } catch (const std::out_of_range&) {
        trace_error(path, line_no, name + " out of range");
    }
}

} // namespace

TraceSource::TraceSource(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open trace file '" + path + "'");

    std::unordered_map<std::int64_t, FunctionId> dense;
    std::string line;
    std::size_t line_no = 0;
    double prev_arrival = -1.0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!header_seen) {
            header_seen = true;
            if (line.find("function_id") != std::string::npos) continue; // header row
        }
        const auto fields = split_csv_line(line);
        if (fields.size() < 3 || fields.size() > 4)
            trace_error(path, line_no, "expected 3 or 4 fields, got " + std::to_string(fields.size()));

        ArrivalRecord rec;
        const double raw_id = parse_double_field(path, line_no, fields[0], "function_id");
        rec.arrival_time = parse_double_field(path, line_no, fields[1], "arrival_time_s");
        rec.exec_time = parse_double_field(path, line_no, fields[2], "exec_time_s");
        if (fields.size() == 4 && !fields[3].empty()) {
            rec.memory_mb = static_cast<int>(parse_double_field(path, line_no, fields[3], "memory_mb"));
            if (rec.memory_mb <= 0) trace_error(path, line_no, "memory_mb must be positive");
        }
        if (!(rec.exec_time > 0.0)) trace_error(path, line_no, "exec_time_s must be positive");
        if (rec.arrival_time < prev_arrival)
            trace_error(path, line_no, "arrival_time_s decreases (trace must be time-ordered)");
        prev_arrival = rec.arrival_time;

        const auto orig = static_cast<std::int64_t>(raw_id);
        auto [it, inserted] = dense.try_emplace(orig, static_cast<FunctionId>(original_ids_.size()));
        if (inserted) original_ids_.push_back(orig);
        rec.function_id = it->second;
        records_.push_back(rec);
    }
}

std::optional<ArrivalRecord> TraceSource::next() {
    if (cursor_ >= records_.size()) return std::nullopt;
    return records_[cursor_++];
}

std::unique_ptr<ArrivalSource> open_trace(const std::string& path) {
    return std::make_unique<TraceSource>(path);
}

} // namespace faassim
