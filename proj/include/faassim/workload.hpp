#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "faassim/rng.hpp"
#include "faassim/types.hpp"

namespace faassim {

struct PoissonArrivals {
    double rate = 1.0; // invocations per second
};

struct LogNormalExec {
    double mu = -0.38;
    double sigma = 2.36;
    double mean() const { return std::exp(mu + sigma * sigma / 2.0); }
};
struct ExponentialExec {
    double mean = 1.0;
};
struct PerFunctionExec {
    std::vector<double> mean_by_function; // one entry per function
};
using ExecModel = std::variant<LogNormalExec, ExponentialExec, PerFunctionExec>;

// Generator parameters: arrival process x execution-time distribution x
// function popularity. Generation is open-loop; it never observes the
// cluster, and the streams depend only on (spec, seed).
struct WorkloadSpec {
    int n_functions = 1;
    std::vector<double> popularity; // sums to 1 within 1e-9
    PoissonArrivals arrival;
    ExecModel exec = LogNormalExec{};
    double duration = std::numeric_limits<double>::infinity(); // generation horizon, seconds
    std::uint64_t seed = 1;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;

    double exec_mean() const;

    // Named presets reproducing the published workload definitions:
    //   sim-default        50 functions, 98/2 skew, LogNormal(-0.38, 2.36)
    //   ms-representative  50 functions, 90/10 skew, LogNormal(-0.38, 2.36)
    //   single-function    1 function,              LogNormal(-0.38, 2.36)
    //   multi-balanced     50 functions, uniform,   LogNormal(-0.38, 2.36)
    //   homogeneous-exec   50 functions, 90/10 skew, Exponential(8.9 s)
    static WorkloadSpec preset(const std::string& name);
    static std::vector<std::string> preset_names();
};

// Popularity vector with `hot_share` on function 0 and the remainder split
// equally over the other n-1 functions.
std::vector<double> skewed_popularity(int n_functions, double hot_share);

// Converts an offered-load fraction of aggregate core capacity into an
// arrival rate: rate = load * total_cores / exec_mean.
double load_fraction_to_rate(double load, int total_cores, double exec_mean);

// One generated or trace-replayed arrival.
struct ArrivalRecord {
    FunctionId function_id = 0;
    SimTime arrival_time = 0.0;
    double exec_time = 0.0;
    int memory_mb = 256;
};

// Pull-based single-consumer arrival source.
class ArrivalSource {
public:
    virtual ~ArrivalSource() = default;
    virtual std::optional<ArrivalRecord> next() = 0;
    virtual int n_functions() const = 0;
};

// Poisson arrivals with i.i.d. execution times and popularity-sampled
// function choice. Arrivals, execution times and function draws use
// independent substreams of the spec seed, so consuming one stream never
// perturbs the others.
class GeneratedSource final : public ArrivalSource {
public:
    explicit GeneratedSource(const WorkloadSpec& spec);
    std::optional<ArrivalRecord> next() override;
    int n_functions() const override { return spec_.n_functions; }

private:
    WorkloadSpec spec_;
    std::vector<double> cumulative_;
    Rng arrival_rng_;
    Rng exec_rng_;
    Rng function_rng_;
    SimTime clock_ = 0.0;
};

// Normalized trace CSV: header `function_id,arrival_time_s,exec_time_s,memory_mb`,
// memory optional (default 256). Arrival times must be non-decreasing.
// Raw function ids are densified; originals are retained for reporting.
class TraceSource final : public ArrivalSource {
public:
    explicit TraceSource(const std::string& path);
    std::optional<ArrivalRecord> next() override;
    int n_functions() const override { return static_cast<int>(original_ids_.size()); }

    const std::vector<std::int64_t>& original_ids() const { return original_ids_; }
    std::size_t size() const { return records_.size(); }

private:
    std::vector<ArrivalRecord> records_; // function_id already densified
    std::vector<std::int64_t> original_ids_;
    std::size_t cursor_ = 0;
};

std::unique_ptr<ArrivalSource> open_trace(const std::string& path);

} // namespace faassim
