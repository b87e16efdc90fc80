#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "faassim/types.hpp"

namespace faassim {

struct CompletionRecord {
    InvocationId id = -1;
    FunctionId function_id = 0;
    SimTime arrival = 0.0;
    SimTime dispatch = 0.0;
    SimTime start = 0.0;
    SimTime completion = 0.0;
    double service_demand = 0.0;
    bool cold_start = false;
    WorkerId worker_id = -1;

    double latency() const { return completion - arrival; }
    double slowdown() const;
};

struct UtilizationSample {
    SimTime window_start = 0.0;
    double cores_busy_avg = 0.0; // time-average of sum_w min(hosted_w, cores_w)
    int servers_used = 0;        // workers hosting >= 1 invocation at any instant
};

// Everything a run produces: one record per completion, headline counters,
// the utilization series, and the work-conservation probes.
struct SimReport {
    std::vector<CompletionRecord> completions;
    std::uint64_t arrivals = 0;
    std::uint64_t rejections = 0;
    std::uint64_t in_flight_at_stop = 0;
    SimTime end_time = 0.0;
    SimTime warmup_cutoff = 0.0; // completions arriving before this are excluded from metrics
    std::vector<UtilizationSample> utilization;
    double sample_window = 1.0;

    // Independent accounting routes; equal within 1e-6 relative when the
    // rate bookkeeping is correct.
    double delivered_work = 0.0;
    double busy_core_seconds = 0.0;

    std::string policy;
    std::uint64_t seed = 0;
    double offered_load = 0.0; // as configured (fraction or RPS)
};

// Nearest-rank percentile: sorted ascending, 1-based index ceil(p/100 * n).
// `samples` is copied; throws on empty input or p outside (0, 100].
double percentile(std::vector<double> samples, double p);

// Aggregated headline numbers over post-warm-up completions.
struct Summary {
    std::uint64_t completions = 0;
    std::uint64_t rejections = 0;
    double rejection_rate = 0.0; // rejections / arrivals
    double p50_latency = 0.0, p99_latency = 0.0;
    double p50_slowdown = 0.0, p99_slowdown = 0.0;
    double mean_latency = 0.0, mean_slowdown = 0.0;
    double cold_start_rate = 0.0;
    double avg_cores_busy = 0.0;  // over post-warm-up windows
    double avg_servers_used = 0.0;
};

Summary summarize(const SimReport& report);

// Fraction of post-warm-up completions that were cold starts.
double cold_start_rate(const SimReport& report);

// Rebuilds the utilization series from completion records alone (hosting
// interval = [dispatch, completion]). Matches the engine-accumulated series
// exactly on fully drained runs; invocations still in flight at stop are
// invisible to this reconstruction.
std::vector<UtilizationSample> utilization_from_records(const std::vector<CompletionRecord>& records,
                                                        const std::vector<std::pair<WorkerId, int>>& worker_cores,
                                                        double window, SimTime end_time);

// CSV emission. Deterministic byte-for-byte for identical inputs.
std::string per_invocation_csv_header();
std::string per_invocation_csv_row(const CompletionRecord& rec);
std::string summary_csv_header();
std::string summary_csv_row(const std::string& policy, double load, std::uint64_t seed,
                            const Summary& s);

} // namespace faassim
