#include "faassim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace faassim {

double CompletionRecord::slowdown() const {
    if (completion < 0.0) throw std::invalid_argument("slowdown: completion not set");
    if (!(service_demand > 0.0)) throw std::invalid_argument("slowdown: service_demand must be > 0");
    return (completion - arrival) / service_demand;
}

double percentile(std::vector<double> samples, double p) {
    if (samples.empty()) throw std::invalid_argument("percentile: empty sample set");
    if (!(p > 0.0) || p > 100.0) throw std::invalid_argument("percentile: p must be in (0, 100]");
    std::sort(samples.begin(), samples.end());
    const auto n = samples.size();
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    if (rank == 0) rank = 1;
    return samples[rank - 1];
}

Summary summarize(const SimReport& report) {
    Summary s;
    s.rejections = report.rejections;
    s.rejection_rate =
        report.arrivals == 0 ? 0.0 : static_cast<double>(report.rejections) / static_cast<double>(report.arrivals);

    std::vector<double> latencies, slowdowns;
    std::uint64_t cold = 0;
    for (const CompletionRecord& rec : report.completions) {
        if (rec.arrival < report.warmup_cutoff) continue;
        latencies.push_back(rec.latency());
        slowdowns.push_back(rec.slowdown());
        if (rec.cold_start) ++cold;
    }
    s.completions = latencies.size();
    if (s.completions > 0) {
        double lat_sum = 0.0, slow_sum = 0.0;
        for (double v : latencies) lat_sum += v;
        for (double v : slowdowns) slow_sum += v;
        s.mean_latency = lat_sum / static_cast<double>(s.completions);
        s.mean_slowdown = slow_sum / static_cast<double>(s.completions);
        s.p50_latency = percentile(latencies, 50.0);
        s.p99_latency = percentile(latencies, 99.0);
        s.p50_slowdown = percentile(slowdowns, 50.0);
        s.p99_slowdown = percentile(slowdowns, 99.0);
        s.cold_start_rate = static_cast<double>(cold) / static_cast<double>(s.completions);
    }

    double cores_sum = 0.0;
    double servers_sum = 0.0;
    std::size_t windows = 0;
    for (const UtilizationSample& u : report.utilization) {
        if (u.window_start < report.warmup_cutoff) continue;
        cores_sum += u.cores_busy_avg;
        servers_sum += u.servers_used;
        ++windows;
    }
    if (windows > 0) {
        s.avg_cores_busy = cores_sum / static_cast<double>(windows);
        s.avg_servers_used = servers_sum / static_cast<double>(windows);
    }
    return s;
}

double cold_start_rate(const SimReport& report) {
    std::uint64_t total = 0, cold = 0;
    for (const CompletionRecord& rec : report.completions) {
        if (rec.arrival < report.warmup_cutoff) continue;
        ++total;
        if (rec.cold_start) ++cold;
    }
    if (total == 0) throw std::invalid_argument("cold_start_rate: no completions");
    return static_cast<double>(cold) / static_cast<double>(total);
}

std::vector<UtilizationSample> utilization_from_records(const std::vector<CompletionRecord>& records,
                                                        const std::vector<std::pair<WorkerId, int>>& worker_cores,
                                                        double window, SimTime end_time) {
    if (!(window > 0.0)) throw std::invalid_argument("utilization: window must be positive");
    const auto n_windows = static_cast<std::size_t>(std::floor(end_time / window));
    std::vector<UtilizationSample> out(n_windows);
    for (std::size_t i = 0; i < n_windows; ++i) out[i].window_start = static_cast<double>(i) * window;
    if (n_windows == 0) return out;

    std::map<WorkerId, int> cores;
    for (auto [id, c] : worker_cores) cores[id] = c;

    // Per worker: hosted-count step function from (dispatch, completion) edges.
    struct Edge {
        SimTime t;
        int delta;
    };
    std::map<WorkerId, std::vector<Edge>> edges;
    for (const CompletionRecord& rec : records) {
        edges[rec.worker_id].push_back({rec.dispatch, +1});
        edges[rec.worker_id].push_back({rec.completion, -1});
    }

    std::vector<double> busy(n_windows, 0.0);
    std::vector<int> servers(n_windows, 0);
    for (auto& [wid, ev] : edges) {
        std::sort(ev.begin(), ev.end(), [](const Edge& a, const Edge& b) {
            if (a.t != b.t) return a.t < b.t;
            return a.delta > b.delta; // at equal times count the arrival first
        });
        const int c = cores.at(wid);
        int hosted = 0;
        SimTime prev = 0.0;
        std::vector<bool> used(n_windows, false);
        auto accumulate = [&](SimTime from, SimTime to, int level) {
            if (to <= from || level == 0) return;
            const double contrib = std::min(level, c);
            std::size_t w = static_cast<std::size_t>(from / window);
            while (w < n_windows) {
                const SimTime wend = static_cast<double>(w + 1) * window;
                const SimTime seg_end = std::min(to, wend);
                const SimTime seg_start = std::max(from, static_cast<double>(w) * window);
                if (seg_end > seg_start) {
                    busy[w] += contrib * (seg_end - seg_start);
                    used[w] = true;
                }
                if (to <= wend) break;
                ++w;
            }
        };
        for (const Edge& e : ev) {
            accumulate(prev, e.t, hosted);
            hosted += e.delta;
            prev = e.t;
        }
        for (std::size_t w = 0; w < n_windows; ++w)
            if (used[w]) ++servers[w];
    }
    for (std::size_t w = 0; w < n_windows; ++w) {
        out[w].cores_busy_avg = busy[w] / window;
        out[w].servers_used = servers[w];
    }
    return out;
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}
} // namespace

std::string per_invocation_csv_header() {
    return "id,function_id,arrival,dispatch,start,completion,exec_time,slowdown,cold_start,worker_id";
}

std::string per_invocation_csv_row(const CompletionRecord& rec) {
    std::string row;
    row += std::to_string(rec.id);
    row += ',';
    row += std::to_string(rec.function_id);
    row += ',';
    row += fmt(rec.arrival);
    row += ',';
    row += fmt(rec.dispatch);
    row += ',';
    row += fmt(rec.start);
    row += ',';
    row += fmt(rec.completion);
    row += ',';
    row += fmt(rec.service_demand);
    row += ',';
    row += fmt(rec.slowdown());
    row += ',';
    row += rec.cold_start ? '1' : '0';
    row += ',';
    row += std::to_string(rec.worker_id);
    return row;
}

std::string summary_csv_header() {
    return "policy,load,seed,completions,rejections,rejection_rate,p50_latency,p99_latency,"
           "p50_slowdown,p99_slowdown,mean_latency,mean_slowdown,cold_start_rate,avg_cores_busy,"
           "avg_servers_used";
}

std::string summary_csv_row(const std::string& policy, double load, std::uint64_t seed,
                            const Summary& s) {
    std::string row;
    row += policy;
    row += ',';
    row += fmt(load);
    row += ',';
    row += std::to_string(seed);
    row += ',';
    row += std::to_string(s.completions);
    row += ',';
    row += std::to_string(s.rejections);
    row += ',';
    row += fmt(s.rejection_rate);
    row += ',';
    row += fmt(s.p50_latency);
    row += ',';
    row += fmt(s.p99_latency);
    row += ',';
    row += fmt(s.p50_slowdown);
    row += ',';
    row += fmt(s.p99_slowdown);
    row += ',';
    row += fmt(s.mean_latency);
    row += ',';
    row += fmt(s.mean_slowdown);
    row += ',';
    row += fmt(s.cold_start_rate);
    row += ',';
    row += fmt(s.avg_cores_busy);
    row += ',';
    row += fmt(s.avg_servers_used);
    return row;
}

} // namespace faassim
