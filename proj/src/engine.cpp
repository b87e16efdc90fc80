#include "faassim/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace faassim {

namespace {
constexpr std::uint64_t kWatchdogLimit = 50'000'000; // same-instant events before we declare a stall
} // namespace

void ClusterSpec::validate() const {
    if (n_workers <= 0) throw std::invalid_argument("cluster.n_workers must be positive");
    if (cores_per_worker <= 0) throw std::invalid_argument("cluster.cores_per_worker must be positive");
    if (fixed_slot_capacity && *fixed_slot_capacity <= 0)
        throw std::invalid_argument("cluster.slot_capacity must be positive");
}

void SimConfig::validate() const {
    cluster.validate();
    if (trace_path.empty()) workload.validate();
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        throw std::invalid_argument("warmup_fraction must be in [0, 1)");
    if (sample_window < 0.0) throw std::invalid_argument("sample_window must be >= 0");
    if (!(functions.cold_start_penalty >= 0.0))
        throw std::invalid_argument("functions.cold_start_penalty must be >= 0");
    if (!(functions.keep_alive > 0.0))
        throw std::invalid_argument("functions.keep_alive must be positive (or infinite)");
    const bool bounded = stop.max_completions.has_value() || stop.max_time.has_value() ||
                         !trace_path.empty() || std::isfinite(workload.duration);
    if (!bounded)
        throw std::invalid_argument("no stop condition: set stop.max_completions, stop.max_time, "
                                    "or a finite workload duration");
    if (stop.max_time && !(*stop.max_time > 0.0))
        throw std::invalid_argument("stop.max_time must be positive");
    if (stop.max_completions && *stop.max_completions == 0)
        throw std::invalid_argument("stop.max_completions must be positive");
}

Engine::Engine(const SimConfig& config)
    : Engine(config, config.trace_path.empty()
                         ? std::unique_ptr<ArrivalSource>(std::make_unique<GeneratedSource>([&] {
                               WorkloadSpec spec = config.workload;
                               spec.seed = config.seed;
                               return spec;
                           }()))
                         : open_trace(config.trace_path)) {}

Engine::Engine(const SimConfig& config, std::unique_ptr<ArrivalSource> source)
    : config_(config),
      source_(std::move(source)),
      balancer_rng_(Rng::substream(config.seed, "balancer")),
      placement_salt_(mix64(config.seed ^ fnv1a64("locality-placement"))) {
    config_.validate();

    const int slot_capacity = config_.cluster.slot_capacity();
    // Under late binding a worker never hosts more than its core count; the
    // discipline field is deliberately not consulted so that reports cannot
    // depend on it.
    const Discipline disc =
        config_.policy.binding == Binding::Late ? Discipline::FCFS : config_.policy.discipline;
    workers_.reserve(static_cast<std::size_t>(config_.cluster.n_workers));
    for (int i = 0; i < config_.cluster.n_workers; ++i)
        workers_.emplace_back(static_cast<WorkerId>(i), config_.cluster.cores_per_worker,
                              slot_capacity, disc);
    departure_handles_.assign(workers_.size(), std::nullopt);
    window_touched_.assign(workers_.size(), 0);

    const int n_fns = std::max(1, source_->n_functions());
    profiles_.reserve(static_cast<std::size_t>(n_fns));
    for (int f = 0; f < n_fns; ++f)
        profiles_.push_back(FunctionProfile{static_cast<FunctionId>(f), config_.functions.memory_mb,
                                            config_.functions.cold_start_penalty,
                                            config_.functions.keep_alive});

    report_.policy = config_.policy.to_string();
    report_.seed = config_.seed;
    report_.offered_load = config_.offered_load;
    report_.sample_window = config_.sample_window;
}

const FunctionProfile& Engine::profile_of(FunctionId fn) {
    return profiles_.at(static_cast<std::size_t>(fn));
}

bool Engine::all_workers_full() const {
    for (const Worker& w : workers_)
        if (!w.full()) return false;
    return true;
}

bool Engine::work_remains() const {
    if (!source_exhausted_) return true;
    if (!controller_queue_.empty()) return true;
    const std::uint64_t in_flight = arrivals_ - completions_ - rejections_;
    return in_flight > 0;
}

void Engine::integrate_usage(SimTime now) {
    const double dt = now - last_usage_time_;
    if (dt > 0.0 && busy_cores_now_ > 0) {
        window_busy_integral_ += busy_cores_now_ * dt;
        busy_core_seconds_total_ += busy_cores_now_ * dt;
    }
    last_usage_time_ = now;
}

void Engine::on_hosted_change(WorkerId worker, SimTime now) {
    integrate_usage(now);
    int busy = 0;
    for (const Worker& w : workers_) busy += w.busy_cores();
    busy_cores_now_ = busy;
    const Worker& w = workers_[static_cast<std::size_t>(worker)];
    if (w.load() > 0) window_touched_[static_cast<std::size_t>(worker)] = 1;
}

void Engine::schedule_next_arrival() {
    if (source_exhausted_) return;
    if (auto rec = source_->next()) {
        const auto id = static_cast<InvocationId>(arena_.size());
        Invocation inv;
        inv.id = id;
        inv.function_id = rec->function_id;
        inv.arrival = rec->arrival_time;
        inv.service_demand = rec->exec_time;
        arena_.push_back(inv);
        queue_.push(rec->arrival_time, EventKind::Arrival, id);
    } else {
        source_exhausted_ = true;
    }
}

void Engine::reschedule_departure(WorkerId worker, SimTime now) {
    auto& handle = departure_handles_[static_cast<std::size_t>(worker)];
    if (handle) {
        queue_.cancel(*handle);
        handle.reset();
    }
    Worker& w = workers_[static_cast<std::size_t>(worker)];
    if (auto next = w.advance_then_rebalance(arena_, now))
        handle = queue_.push(next->first, EventKind::Departure, worker, next->second);
}

void Engine::admit_to(WorkerId worker, InvocationId inv_id, SimTime now) {
    Worker& w = workers_[static_cast<std::size_t>(worker)];
    // Credit work served so far at the old rates before membership changes.
    w.advance_then_rebalance(arena_, now);
    w.admit(arena_, inv_id, profile_of(arena_[static_cast<std::size_t>(inv_id)].function_id), now);
    arena_[static_cast<std::size_t>(inv_id)].dispatch = now;
    on_hosted_change(worker, now);
    reschedule_departure(worker, now);
}

void Engine::dispatch_early(InvocationId inv_id, SimTime now) {
    const Invocation& inv = arena_[static_cast<std::size_t>(inv_id)];
    std::optional<WorkerId> choice = select_worker(workers_, config_.policy.balancer,
                                                   inv.function_id, balancer_rng_, placement_salt_);
    if (!choice) {
        ++rejections_;
        return;
    }

    DispatchDecision decision;
    if (config_.on_dispatch) {
        decision.invocation = inv_id;
        decision.function_id = inv.function_id;
        decision.chosen = *choice;
        decision.mode = hybrid_mode(workers_);
        decision.least_loaded_choice = select_least_loaded(workers_, inv.function_id).value_or(-1);
        decision.chosen_cores = workers_[static_cast<std::size_t>(*choice)].cores();
    }

    admit_to(*choice, inv_id, now);

    if (config_.on_dispatch) {
        decision.load_after = workers_[static_cast<std::size_t>(*choice)].load();
        config_.on_dispatch(decision);
    }
}

// Pops the controller queue while any worker has a free core. Invoked on
// every arrival and every departure; admitted invocations run uninterrupted
// at rate 1 until completion.
void Engine::dispatch_late(SimTime now) {
    while (!controller_queue_.empty()) {
        const InvocationId head = controller_queue_.front();
        const FunctionId fn = arena_[static_cast<std::size_t>(head)].function_id;
        WorkerId chosen = -1;
        bool chosen_warm = false;
        for (const Worker& w : workers_) {
            if (w.load() >= w.cores()) continue;
            const bool warm = w.has_idle_warm_container(fn);
            if (chosen < 0 || (warm && !chosen_warm)) {
                chosen = w.id();
                chosen_warm = warm;
            }
            if (chosen_warm) break; // lowest-id warm worker found
        }
        if (chosen < 0) return; // no free core anywhere
        controller_queue_.pop_front();
        admit_to(chosen, head, now);
    }
}

void Engine::handle_arrival(const Event& e) {
    ++arrivals_;
    schedule_next_arrival();
    const auto inv_id = static_cast<InvocationId>(e.a);
    if (config_.policy.binding == Binding::Early) {
        dispatch_early(inv_id, e.time);
    } else {
        controller_queue_.push_back(inv_id);
        dispatch_late(e.time);
    }
}

void Engine::handle_departure(const Event& e) {
    const auto worker_id = static_cast<WorkerId>(e.a);
    const auto inv_id = static_cast<InvocationId>(e.b);
    Worker& w = workers_[static_cast<std::size_t>(worker_id)];
    departure_handles_[static_cast<std::size_t>(worker_id)].reset(); // this event consumed it

    // Settle service up to now; the departing invocation's remaining work
    // reaches zero exactly here (within float tolerance).
    w.advance_then_rebalance(arena_, e.time);
    const FunctionProfile& profile = profile_of(arena_[static_cast<std::size_t>(inv_id)].function_id);
    const auto expiry = w.release(arena_, inv_id, profile, e.time);
    if (expiry)
        queue_.push(*expiry, EventKind::ContainerExpiry, worker_id,
                    arena_[static_cast<std::size_t>(inv_id)].function_id);

    on_hosted_change(worker_id, e.time);
    reschedule_departure(worker_id, e.time);

    const Invocation& inv = arena_[static_cast<std::size_t>(inv_id)];
    report_.completions.push_back(CompletionRecord{inv.id, inv.function_id, inv.arrival, inv.dispatch,
                                                   inv.start, inv.completion, inv.service_demand,
                                                   inv.cold_start, inv.worker_id});
    ++completions_;

    if (config_.policy.binding == Binding::Late) dispatch_late(e.time);
}

void Engine::handle_expiry(const Event& e) {
    Worker& w = workers_[static_cast<std::size_t>(e.a)];
    const FunctionProfile& profile = profile_of(static_cast<FunctionId>(e.b));
    w.expire_containers(static_cast<FunctionId>(e.b), profile.keep_alive, e.time);
}

void Engine::handle_tick(const Event& e) {
    integrate_usage(e.time);
    UtilizationSample sample;
    sample.window_start = static_cast<double>(window_index_) * config_.sample_window;
    sample.cores_busy_avg = window_busy_integral_ / config_.sample_window;
    for (std::size_t i = 0; i < workers_.size(); ++i)
        if (window_touched_[i]) ++sample.servers_used;
    report_.utilization.push_back(sample);

    ++window_index_;
    window_busy_integral_ = 0.0;
    for (std::size_t i = 0; i < workers_.size(); ++i)
        window_touched_[i] = workers_[i].load() > 0 ? 1 : 0;

    if (work_remains()) {
        const SimTime next = static_cast<double>(window_index_ + 1) * config_.sample_window;
        queue_.push(next, EventKind::SampleTick);
    }
}

SimReport Engine::run() {
    schedule_next_arrival();
    if (config_.sample_window > 0.0) queue_.push(config_.sample_window, EventKind::SampleTick);

    const StopCondition& stop = config_.stop;
    const SimTime time_limit = stop.max_time.value_or(std::numeric_limits<double>::infinity());
    const auto completions_satisfied = [&] {
        if (stop.max_completions) return completions_ >= *stop.max_completions;
        return stop.until_all; // unset bound: satisfied under all-of, never under first-of
    };
    const auto time_satisfied = [&] {
        if (stop.max_time) return clock_ >= *stop.max_time;
        return stop.until_all;
    };

    while (auto e = queue_.pop()) {
        if (e->time > time_limit && (!stop.until_all || completions_satisfied())) {
            clock_ = time_limit;
            break;
        }
        if (e->time < clock_) throw std::logic_error("engine: clock moved backwards");

        // Liveness watchdog: a bounded number of events may share a timestamp;
        // beyond that the engine is re-scheduling itself in place.
        if (e->time == watchdog_time_) {
            if (++watchdog_events_ > kWatchdogLimit)
                throw std::runtime_error("engine: clock stalled at t=" + std::to_string(e->time) +
                                         " with a non-empty event queue");
        } else {
            watchdog_time_ = e->time;
            watchdog_events_ = 0;
        }

        clock_ = e->time;
        switch (e->kind) {
        case EventKind::Arrival: handle_arrival(*e); break;
        case EventKind::Departure: handle_departure(*e); break;
        case EventKind::ContainerExpiry: handle_expiry(*e); break;
        case EventKind::SampleTick: handle_tick(*e); break;
        }
        if (stop.until_all) {
            if (completions_satisfied() && time_satisfied()) break;
        } else if (stop.max_completions && completions_ >= *stop.max_completions) {
            break;
        }
    }

    integrate_usage(clock_);
    report_.arrivals = arrivals_;
    report_.rejections = rejections_;
    report_.in_flight_at_stop = arrivals_ - completions_ - rejections_;
    report_.end_time = clock_;
    report_.warmup_cutoff = config_.warmup_fraction * clock_;
    report_.delivered_work = 0.0;
    for (const Worker& w : workers_) report_.delivered_work += w.delivered_work();
    report_.busy_core_seconds = busy_core_seconds_total_;

    // Conservation: every arrival is accounted for exactly once.
    std::uint64_t hosted_now = controller_queue_.size();
    for (const Worker& w : workers_) hosted_now += static_cast<std::uint64_t>(w.load());
    if (hosted_now != report_.in_flight_at_stop)
        throw std::logic_error("engine: invocation conservation violated (" +
                               std::to_string(hosted_now) + " hosted vs " +
                               std::to_string(report_.in_flight_at_stop) + " unaccounted)");

    return std::move(report_);
}

SimReport run_simulation(const SimConfig& config) {
    Engine engine(config);
    return engine.run();
}

} // namespace faassim
