#include "faassim/worker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace faassim {

namespace {
constexpr double kNegativeWorkTolerance = 1e-9;
} // namespace

AdmissionOutcome Worker::admit(std::vector<Invocation>& arena, InvocationId inv_id,
                               const FunctionProfile& profile, SimTime now) {
    if (full())
        throw std::logic_error("Worker " + std::to_string(id_) +
                               ": admit beyond slot capacity (policy bug)");
    Invocation& inv = arena[static_cast<std::size_t>(inv_id)];
    if (inv.worker_id >= 0)
        throw std::logic_error("Worker " + std::to_string(id_) + ": invocation " +
                               std::to_string(inv_id) + " already hosted elsewhere");

    inv.worker_id = id_;
    inv.remaining_work = inv.service_demand;
    auto pool = warm_pool_.find(inv.function_id);
    if (pool != warm_pool_.end() && !pool->second.empty()) {
        pool->second.pop_back(); // reuse the most recently released container
        ++containers_consumed_;
        inv.cold_start = false;
    } else {
        inv.cold_start = true;
        inv.remaining_work += profile.cold_start_penalty;
    }

    // Start timestamps are stamped by rebalance() when an invocation first
    // receives service; under SRPT a new arrival may not run immediately.
    const bool queued = discipline_ == Discipline::FCFS && load() >= cores_;
    hosted_.push_back(inv_id);

    if (queued) return AdmissionOutcome::Queued;
    return inv.cold_start ? AdmissionOutcome::StartedCold : AdmissionOutcome::StartedWarm;
}

std::optional<std::pair<SimTime, InvocationId>> Worker::advance_then_rebalance(
    std::vector<Invocation>& arena, SimTime now) {
    if (now < last_rate_update_)
        throw std::logic_error("Worker " + std::to_string(id_) + ": time moved backwards");

    const double dt = now - last_rate_update_;
    if (dt > 0.0) {
        for (InvocationId id : hosted_) {
            Invocation& inv = arena[static_cast<std::size_t>(id)];
            if (inv.service_rate <= 0.0) continue;
            const double served = dt * inv.service_rate;
            inv.remaining_work -= served;
            delivered_work_ += served;
            if (inv.remaining_work < -kNegativeWorkTolerance)
                throw std::logic_error("Worker " + std::to_string(id_) + ": invocation " +
                                       std::to_string(id) + " over-served by " +
                                       std::to_string(-inv.remaining_work) + " s");
            if (inv.remaining_work < 0.0) inv.remaining_work = 0.0;
        }
    }
    last_rate_update_ = now;

    rebalance(arena, now);

    std::optional<std::pair<SimTime, InvocationId>> next;
    for (InvocationId id : hosted_) {
        const Invocation& inv = arena[static_cast<std::size_t>(id)];
        if (inv.service_rate <= 0.0) continue;
        const SimTime t = now + inv.remaining_work / inv.service_rate;
        if (!next || t < next->first) next = {t, id};
    }
    return next;
}

void Worker::rebalance(std::vector<Invocation>& arena, SimTime now) {
    const int n = load();
    if (n == 0) return;

    switch (discipline_) {
    case Discipline::PS: {
        const double rate = std::min(1.0, static_cast<double>(cores_) / n);
        for (InvocationId id : hosted_) {
            Invocation& inv = arena[static_cast<std::size_t>(id)];
            inv.service_rate = rate;
            if (inv.start < 0.0) inv.start = now;
        }
        break;
    }
    case Discipline::FCFS: {
        // Oldest `cores_` hosted run to completion; the rest wait.
        for (int i = 0; i < n; ++i) {
            Invocation& inv = arena[static_cast<std::size_t>(hosted_[static_cast<std::size_t>(i)])];
            inv.service_rate = i < cores_ ? 1.0 : 0.0;
            if (inv.service_rate > 0.0 && inv.start < 0.0) inv.start = now;
        }
        break;
    }
    case Discipline::SRPT: {
        // The `cores_` smallest remaining-work invocations run; ties go to the
        // earlier admission. Relative order among hosted invocations cannot
        // change between admits/releases, so this point is sufficient.
        running_scratch_.clear();
        for (int i = 0; i < n; ++i) running_scratch_.push_back(i);
        const int k = std::min(n, cores_);
        std::partial_sort(running_scratch_.begin(), running_scratch_.begin() + k,
                          running_scratch_.end(), [&](int x, int y) {
                              const double rx =
                                  arena[static_cast<std::size_t>(hosted_[static_cast<std::size_t>(x)])].remaining_work;
                              const double ry =
                                  arena[static_cast<std::size_t>(hosted_[static_cast<std::size_t>(y)])].remaining_work;
                              if (rx != ry) return rx < ry;
                              return x < y;
                          });
        for (int i = 0; i < n; ++i)
            arena[static_cast<std::size_t>(hosted_[static_cast<std::size_t>(i)])].service_rate = 0.0;
        for (int i = 0; i < k; ++i) {
            Invocation& inv =
                arena[static_cast<std::size_t>(hosted_[static_cast<std::size_t>(running_scratch_[static_cast<std::size_t>(i)])])];
            inv.service_rate = 1.0;
            if (inv.start < 0.0) inv.start = now;
        }
        break;
    }
    }
}

std::optional<SimTime> Worker::release(std::vector<Invocation>& arena, InvocationId inv_id,
                                       const FunctionProfile& profile, SimTime now) {
    auto it = std::find(hosted_.begin(), hosted_.end(), inv_id);
    if (it == hosted_.end())
        throw std::logic_error("Worker " + std::to_string(id_) + ": release of non-hosted invocation " +
                               std::to_string(inv_id));
    Invocation& inv = arena[static_cast<std::size_t>(inv_id)];
    if (inv.remaining_work > kNegativeWorkTolerance)
        throw std::logic_error("Worker " + std::to_string(id_) + ": release with " +
                               std::to_string(inv.remaining_work) + " s of work left");

    inv.remaining_work = 0.0;
    inv.service_rate = 0.0;
    inv.completion = now;
    hosted_.erase(it);

    warm_pool_[inv.function_id].push_back(now);
    ++containers_created_;
    if (std::isfinite(profile.keep_alive)) return now + profile.keep_alive;
    return std::nullopt;
}

void Worker::expire_containers(FunctionId fn, double keep_alive, SimTime now) {
    auto it = warm_pool_.find(fn);
    if (it == warm_pool_.end()) return;
    auto& pool = it->second;
    while (!pool.empty() && pool.front() + keep_alive <= now) pool.pop_front();
}

} // namespace faassim
