#include "faassim/policy.hpp"

#include <stdexcept>

namespace faassim {

namespace {

std::string balancer_token(Balancer b) {
    switch (b) {
    case Balancer::Random: return "R";
    case Balancer::Locality: return "LOC";
    case Balancer::LeastLoaded: return "LL";
    case Balancer::Hybrid: return "H";
    }
    return "?";
}

std::string discipline_token(Discipline d) {
    switch (d) {
    case Discipline::FCFS: return "FCFS";
    case Discipline::PS: return "PS";
    case Discipline::SRPT: return "SRPT";
    }
    return "?";
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        out.push_back(s.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

} // namespace

std::string Policy::to_string() const {
    if (binding == Binding::Late) return "L";
    return "E/" + balancer_token(balancer) + "/" + discipline_token(discipline);
}

Policy Policy::parse(const std::string& text) {
    const auto parts = split(text, '/');
    if (parts.empty() || parts.size() > 3)
        throw std::invalid_argument("policy '" + text + "': expected T/LB/S notation");

    Policy p;
    if (parts[0] == "L") {
        p.binding = Binding::Late;
        // "L", "L/*/*" and explicit fields are all accepted; the engine
        // ignores the balancer/discipline under late binding.
    } else if (parts[0] == "E") {
        p.binding = Binding::Early;
        if (parts.size() != 3)
            throw std::invalid_argument("policy '" + text + "': early binding needs E/LB/S");
    } else {
        throw std::invalid_argument("policy '" + text + "': binding must be E or L");
    }

    if (parts.size() >= 2 && parts[1] != "*") {
        if (parts[1] == "R") p.balancer = Balancer::Random;
        else if (parts[1] == "LOC") p.balancer = Balancer::Locality;
        else if (parts[1] == "LL") p.balancer = Balancer::LeastLoaded;
        else if (parts[1] == "H") p.balancer = Balancer::Hybrid;
        else throw std::invalid_argument("policy '" + text + "': balancer must be R, LOC, LL or H");
    }
    if (parts.size() >= 3 && parts[2] != "*") {
        if (parts[2] == "FCFS") p.discipline = Discipline::FCFS;
        else if (parts[2] == "PS") p.discipline = Discipline::PS;
        else if (parts[2] == "SRPT") p.discipline = Discipline::SRPT;
        else throw std::invalid_argument("policy '" + text + "': discipline must be FCFS, PS or SRPT");
    }
    return p;
}

HybridMode hybrid_mode(const std::vector<Worker>& workers) {
    for (const Worker& w : workers)
        if (w.load() < w.cores()) return HybridMode::Packing;
    return HybridMode::LeastLoaded;
}

std::optional<WorkerId> select_random(const std::vector<Worker>& workers, Rng& rng) {
    int eligible = 0;
    for (const Worker& w : workers)
        if (!w.full()) ++eligible;
    if (eligible == 0) return std::nullopt;
    std::uint64_t pick = rng.uniform_int(static_cast<std::uint64_t>(eligible));
    for (const Worker& w : workers) {
        if (w.full()) continue;
        if (pick == 0) return w.id();
        --pick;
    }
    return std::nullopt; // unreachable
}

std::optional<WorkerId> select_locality(const std::vector<Worker>& workers, FunctionId fn,
                                        std::uint64_t placement_salt) {
    const std::uint64_t n = workers.size();
    const std::uint64_t base = mix64(placement_salt ^ mix64(static_cast<std::uint64_t>(fn)));
    const auto home = static_cast<std::size_t>(bounded_hash(base, n));
    if (!workers[home].full()) return workers[home].id();

    bool any_free = false;
    for (const Worker& w : workers)
        if (!w.full()) {
            any_free = true;
            break;
        }
    if (!any_free) return std::nullopt;

    // Deterministic probe sequence; falls back to a scan once the sequence
    // has had ample chances, so termination never depends on hash luck.
    for (std::uint64_t probe = 1; probe <= 8 * n; ++probe) {
        const auto cand = static_cast<std::size_t>(bounded_hash(mix64(base ^ probe), n));
        if (!workers[cand].full()) return workers[cand].id();
    }
    for (std::uint64_t i = 1; i < n; ++i)
        if (const auto cand = (home + i) % n; !workers[cand].full()) return workers[cand].id();
    return std::nullopt;
}

std::optional<WorkerId> select_least_loaded(const std::vector<Worker>& workers, FunctionId fn) {
    const Worker* best = nullptr;
    bool best_warm = false;
    for (const Worker& w : workers) {
        if (w.full()) continue;
        const bool warm = w.has_idle_warm_container(fn);
        if (best == nullptr || w.load() < best->load() ||
            (w.load() == best->load() && warm && !best_warm)) {
            best = &w;
            best_warm = warm;
        }
    }
    if (best == nullptr) return std::nullopt;
    return best->id();
}

std::optional<WorkerId> select_hybrid(const std::vector<Worker>& workers, FunctionId fn) {
    if (hybrid_mode(workers) == HybridMode::LeastLoaded) return select_least_loaded(workers, fn);

    const Worker* best = nullptr;
    int best_rank = 5;
    for (const Worker& w : workers) {
        if (w.full()) continue;
        int rank;
        if (!w.empty() && w.load() < w.cores())
            rank = w.has_idle_warm_container(fn) ? 1 : 2;
        else if (w.empty())
            rank = w.has_idle_warm_container(fn) ? 3 : 4;
        else
            continue; // non-empty and core-saturated: not a packing candidate
        if (rank < best_rank) {
            best_rank = rank;
            best = &w;
        }
    }
    if (best == nullptr) return std::nullopt; // cannot happen in packing mode
    return best->id();
}

std::optional<WorkerId> select_worker(const std::vector<Worker>& workers, Balancer balancer,
                                      FunctionId fn, Rng& rng, std::uint64_t placement_salt) {
    switch (balancer) {
    case Balancer::Random: return select_random(workers, rng);
    case Balancer::Locality: return select_locality(workers, fn, placement_salt);
    case Balancer::LeastLoaded: return select_least_loaded(workers, fn);
    case Balancer::Hybrid: return select_hybrid(workers, fn);
    }
    return std::nullopt;
}

} // namespace faassim
