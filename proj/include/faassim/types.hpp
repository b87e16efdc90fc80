#pragma once

#include <cstdint>
#include <limits>

#include "faassim/event_queue.hpp"

namespace faassim {

using InvocationId = std::int64_t;
using FunctionId = std::int64_t;
using WorkerId = std::int64_t;

constexpr SimTime kUnsetTime = -1.0;
constexpr double kInfiniteKeepAlive = std::numeric_limits<double>::infinity();

struct FunctionProfile {
    FunctionId function_id = 0;
    int memory_mb = 256;
    double cold_start_penalty = 0.0;           // seconds of extra initial work
    double keep_alive = kInfiniteKeepAlive;    // idle container lifetime, seconds
};

struct Invocation {
    InvocationId id = -1;
    FunctionId function_id = 0;
    SimTime arrival = 0.0;
    double service_demand = 0.0;   // intrinsic execution time, seconds
    SimTime dispatch = kUnsetTime; // controller handed it to a worker
    SimTime start = kUnsetTime;    // first received service
    SimTime completion = kUnsetTime;
    bool cold_start = false;
    WorkerId worker_id = -1;
    double remaining_work = 0.0;   // includes cold-start penalty when cold
    double service_rate = 0.0;     // current rate, set by the worker rebalance

    bool completed() const { return completion >= 0.0; }
};

enum class Discipline : std::uint8_t { FCFS, PS, SRPT };

enum class AdmissionOutcome : std::uint8_t { StartedWarm, StartedCold, Queued, Rejected };

} // namespace faassim
