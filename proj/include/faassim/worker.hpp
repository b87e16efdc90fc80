#pragma once

#include <deque>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "faassim/types.hpp"

namespace faassim {

// A server: `cores` parallel execution slots, a memory-derived cap on hosted
// invocations (running + waiting), an intra-worker discipline, and a pool of
// idle warm containers per function.
//
// Service accounting is explicit: advance_then_rebalance() first credits each
// hosted invocation the work it received since the last update at its stored
// rate, then recomputes rates for the active discipline and reports the next
// departure. Remaining work is the single source of truth; departure times
// are always re-derived from it.
class Worker {
public:
    Worker(WorkerId id, int cores, int slot_capacity, Discipline discipline)
        : id_(id), cores_(cores), slot_capacity_(slot_capacity), discipline_(discipline) {}

    WorkerId id() const { return id_; }
    int cores() const { return cores_; }
    int slot_capacity() const { return slot_capacity_; }
    Discipline discipline() const { return discipline_; }

    // Hosted invocations, running + waiting (the JSQ load signal).
    int load() const { return static_cast<int>(hosted_.size()); }
    bool full() const { return load() >= slot_capacity_; }
    bool empty() const { return hosted_.empty(); }
    const std::vector<InvocationId>& hosted() const { return hosted_; }

    // Cores currently delivering service.
    int busy_cores() const { return std::min<int>(load(), cores_); }

    bool has_idle_warm_container(FunctionId fn) const {
        auto it = warm_pool_.find(fn);
        return it != warm_pool_.end() && !it->second.empty();
    }
    int warm_count(FunctionId fn) const {
        auto it = warm_pool_.find(fn);
        return it == warm_pool_.end() ? 0 : static_cast<int>(it->second.size());
    }

    // Places an invocation on this worker. Consumes an idle warm container
    // when one exists; otherwise the cold-start penalty is prepended to the
    // invocation's remaining work. Caller must have advanced this worker to
    // `now` first and must reschedule the departure afterwards.
    AdmissionOutcome admit(std::vector<Invocation>& arena, InvocationId inv_id,
                           const FunctionProfile& profile, SimTime now);

    // Credits work done since last_rate_update, recomputes per-invocation
    // service rates under the discipline, and returns the next departure
    // (time, invocation) if anything is running.
    std::optional<std::pair<SimTime, InvocationId>> advance_then_rebalance(
        std::vector<Invocation>& arena, SimTime now);

    // Removes a finished invocation (remaining work ~ 0), stamps completion,
    // and parks an idle warm container for its function. Returns the
    // container's expiry time when the keep-alive is finite.
    std::optional<SimTime> release(std::vector<Invocation>& arena, InvocationId inv_id,
                                   const FunctionProfile& profile, SimTime now);

    // Drops idle warm containers whose keep-alive elapsed by `now`.
    void expire_containers(FunctionId fn, double keep_alive, SimTime now);

    SimTime last_rate_update() const { return last_rate_update_; }

    // Total service delivered by this worker (work-conservation probe).
    double delivered_work() const { return delivered_work_; }

    std::uint64_t containers_created() const { return containers_created_; }
    std::uint64_t containers_consumed() const { return containers_consumed_; }

private:
    void rebalance(std::vector<Invocation>& arena, SimTime now);

    WorkerId id_;
    int cores_;
    int slot_capacity_;
    Discipline discipline_;

    std::vector<InvocationId> hosted_; // admission order
    // function -> release timestamps of idle warm containers, oldest first.
    // Reuse takes the newest; expiry sweeps from the oldest.
    std::unordered_map<FunctionId, std::deque<SimTime>> warm_pool_;
    SimTime last_rate_update_ = 0.0;
    std::vector<int> running_scratch_; // SRPT selection buffer
    double delivered_work_ = 0.0;
    std::uint64_t containers_created_ = 0;
    std::uint64_t containers_consumed_ = 0;
};

} // namespace faassim
