#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faassim/rng.hpp"
#include "faassim/types.hpp"
#include "faassim/worker.hpp"

namespace faassim {

enum class Binding : std::uint8_t { Early, Late };
enum class Balancer : std::uint8_t { Random, Locality, LeastLoaded, Hybrid };

// A point in the scheduling taxonomy: when to bind, where to run, and how the
// worker shares its cores. Under late binding the balancer and discipline are
// ignored by the engine (invocations run uninterrupted on a free core).
struct Policy {
    Binding binding = Binding::Early;
    Balancer balancer = Balancer::LeastLoaded;
    Discipline discipline = Discipline::PS;

    // Canonical "T/LB/S" notation, e.g. "E/LL/PS"; late binding prints "L".
    std::string to_string() const;
    static Policy parse(const std::string& text);

    bool operator==(const Policy&) const = default;
};

// How the hybrid balancer behaves for the current cluster state: core-aware
// packing while any worker has a free core, least-loaded otherwise.
enum class HybridMode : std::uint8_t { Packing, LeastLoaded };

HybridMode hybrid_mode(const std::vector<Worker>& workers);

// Worker selection. All selectors consider only workers below slot capacity
// and return nullopt when every worker is full (the caller rejects).
std::optional<WorkerId> select_random(const std::vector<Worker>& workers, Rng& rng);

// Sticky per-function home (stable hash of the function id salted by the run
// seed); full homes fall back to a deterministic pseudo-random probe sequence
// keyed by (salt, function, probe index).
std::optional<WorkerId> select_locality(const std::vector<Worker>& workers, FunctionId fn,
                                        std::uint64_t placement_salt);

// Join-shortest-queue on hosted count; ties prefer a worker holding an idle
// warm container for the function, then the lowest id.
std::optional<WorkerId> select_least_loaded(const std::vector<Worker>& workers, FunctionId fn);

// Hermes balancer. Packing mode ranks candidates:
//   1. non-empty, free core, idle warm container for the function
//   2. non-empty, free core
//   3. empty, idle warm container
//   4. empty
// lowest id within a rank; consolidation outranks warmth across ranks 2/3.
// Once no worker has a free core it behaves exactly as select_least_loaded.
std::optional<WorkerId> select_hybrid(const std::vector<Worker>& workers, FunctionId fn);

std::optional<WorkerId> select_worker(const std::vector<Worker>& workers, Balancer balancer,
                                      FunctionId fn, Rng& rng, std::uint64_t placement_salt);

// Perfect-knowledge execution-time oracle used by SRPT.
inline double oracle_remaining(const Invocation& inv) { return inv.remaining_work; }

} // namespace faassim
