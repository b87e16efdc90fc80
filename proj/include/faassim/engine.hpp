#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "faassim/event_queue.hpp"
#include "faassim/metrics.hpp"
#include "faassim/policy.hpp"
#include "faassim/rng.hpp"
#include "faassim/types.hpp"
#include "faassim/worker.hpp"
#include "faassim/workload.hpp"

namespace faassim {

struct ClusterSpec {
    int n_workers = 4;
    int cores_per_worker = 12;
    // Hosted-invocation cap per worker; defaults to 8x the core count.
    std::optional<int> fixed_slot_capacity;

    int slot_capacity() const { return fixed_slot_capacity.value_or(8 * cores_per_worker); }
    int total_cores() const { return n_workers * cores_per_worker; }
    void validate() const;
};

struct StopCondition {
    std::optional<std::uint64_t> max_completions;
    std::optional<SimTime> max_time;
    // false: stop at the first satisfied bound. true: run until every set
    // bound is satisfied (the sweep default of max(completions, sim time)).
    bool until_all = false;
};

struct FunctionDefaults {
    int memory_mb = 256;
    double cold_start_penalty = 0.0;
    double keep_alive = kInfiniteKeepAlive;
};

// Observer hook for tests: fired after each early-binding dispatch decision.
struct DispatchDecision {
    InvocationId invocation = -1;
    FunctionId function_id = 0;
    WorkerId chosen = -1;
    int load_after = 0;               // chosen worker's hosted count after admit
    int chosen_cores = 0;
    HybridMode mode = HybridMode::LeastLoaded; // meaningful for the hybrid balancer
    WorkerId least_loaded_choice = -1;         // what select_least_loaded would have picked
};

struct SimConfig {
    ClusterSpec cluster;
    Policy policy;
    WorkloadSpec workload;  // used when trace_path is empty
    std::string trace_path; // non-empty: replay a normalized trace instead
    FunctionDefaults functions;
    StopCondition stop;
    double warmup_fraction = 0.1;
    double sample_window = 1.0; // seconds; 0 disables the utilization series
    std::uint64_t seed = 1;
    double offered_load = 0.0; // echo for reports

    std::function<void(const DispatchDecision&)> on_dispatch; // test hook, not serialized

    void validate() const;
};

// One simulation: single-threaded, owns all its state, deterministic for a
// given (config, seed). Distinct engines share nothing and may run on
// separate threads.
class Engine {
public:
    explicit Engine(const SimConfig& config);
    Engine(const SimConfig& config, std::unique_ptr<ArrivalSource> source);

    SimReport run();

    const std::vector<Worker>& workers() const { return workers_; }

private:
    void schedule_next_arrival();
    void handle_arrival(const Event& e);
    void handle_departure(const Event& e);
    void handle_expiry(const Event& e);
    void handle_tick(const Event& e);

    void dispatch_early(InvocationId inv_id, SimTime now);
    void dispatch_late(SimTime now);
    void admit_to(WorkerId worker, InvocationId inv_id, SimTime now);
    void reschedule_departure(WorkerId worker, SimTime now);

    const FunctionProfile& profile_of(FunctionId fn);
    bool work_remains() const;
    bool all_workers_full() const;

    // Utilization bookkeeping (piecewise-constant integration between events).
    void integrate_usage(SimTime now);
    void on_hosted_change(WorkerId worker, SimTime now);

    SimConfig config_;
    std::unique_ptr<ArrivalSource> source_;
    bool source_exhausted_ = false;

    std::vector<Invocation> arena_;
    std::vector<Worker> workers_;
    std::vector<FunctionProfile> profiles_;
    EventQueue queue_;
    std::deque<InvocationId> controller_queue_; // late binding only
    std::vector<std::optional<EventQueue::Handle>> departure_handles_;

    Rng balancer_rng_;
    std::uint64_t placement_salt_ = 0;

    SimTime clock_ = 0.0;
    std::uint64_t arrivals_ = 0;
    std::uint64_t completions_ = 0;
    std::uint64_t rejections_ = 0;

    // usage accounting
    SimTime last_usage_time_ = 0.0;
    int busy_cores_now_ = 0;
    double window_busy_integral_ = 0.0;
    double busy_core_seconds_total_ = 0.0;
    std::vector<char> window_touched_;
    std::uint64_t window_index_ = 0;

    SimReport report_;

    // liveness watchdog
    SimTime watchdog_time_ = -1.0;
    std::uint64_t watchdog_events_ = 0;
};

SimReport run_simulation(const SimConfig& config);

} // namespace faassim
