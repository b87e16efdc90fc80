#include <doctest.h>

#include <vector>

#include "faassim/worker.hpp"

using namespace faassim;

namespace {

InvocationId make_invocation(std::vector<Invocation>& arena, FunctionId fn, SimTime arrival,
                             double demand) {
    Invocation inv;
    inv.id = static_cast<InvocationId>(arena.size());
    inv.function_id = fn;
    inv.arrival = arrival;
    inv.service_demand = demand;
    arena.push_back(inv);
    return inv.id;
}

const FunctionProfile kPlainFn{0, 256, 0.0, kInfiniteKeepAlive};

} // namespace

TEST_CASE("admit consumes a warm container when one is idle") {
    std::vector<Invocation> arena;
    Worker w(0, 1, 8, Discipline::PS);

    const auto first = make_invocation(arena, 0, 0.0, 1.0);
    REQUIRE(w.admit(arena, first, kPlainFn, 0.0) == AdmissionOutcome::StartedCold);
    w.advance_then_rebalance(arena, 1.0);
    w.release(arena, first, kPlainFn, 1.0);
    REQUIRE(w.warm_count(0) == 1);

    const auto second = make_invocation(arena, 0, 1.5, 1.0);
    REQUIRE(w.admit(arena, second, kPlainFn, 1.5) == AdmissionOutcome::StartedWarm);
    REQUIRE(arena[1].cold_start == false);
    REQUIRE(w.warm_count(0) == 0);
}

TEST_CASE("admit on an empty pool is a cold start") {
    std::vector<Invocation> arena;
    Worker w(0, 1, 8, Discipline::PS);
    const auto id = make_invocation(arena, 3, 0.0, 2.0);
    REQUIRE(w.admit(arena, id, kPlainFn, 0.0) == AdmissionOutcome::StartedCold);
    REQUIRE(arena[0].cold_start == true);
}

TEST_CASE("two releases then one admit leaves one idle container") {
    std::vector<Invocation> arena;
    Worker w(0, 2, 16, Discipline::PS);
    const auto a = make_invocation(arena, 7, 0.0, 1.0);
    const auto b = make_invocation(arena, 7, 0.0, 1.0);
    w.admit(arena, a, kPlainFn, 0.0);
    w.admit(arena, b, kPlainFn, 0.0);
    w.advance_then_rebalance(arena, 1.0);
    w.release(arena, a, kPlainFn, 1.0);
    w.release(arena, b, kPlainFn, 1.0);
    REQUIRE(w.warm_count(7) == 2);

    const auto c = make_invocation(arena, 7, 2.0, 1.0);
    REQUIRE(w.admit(arena, c, kPlainFn, 2.0) == AdmissionOutcome::StartedWarm);
    REQUIRE(w.warm_count(7) == 1);
}

TEST_CASE("FCFS queues beyond the core count and starts at the predecessor's departure") {
    std::vector<Invocation> arena;
    Worker w(0, 1, 8, Discipline::FCFS);

    const auto a = make_invocation(arena, 0, 0.0, 2.0);
    const auto b = make_invocation(arena, 0, 0.5, 1.0);
    REQUIRE(w.admit(arena, a, kPlainFn, 0.0) == AdmissionOutcome::StartedCold);
    auto dep = w.advance_then_rebalance(arena, 0.0);
    REQUIRE(dep->second == a);
    REQUIRE(dep->first == doctest::Approx(2.0));

    REQUIRE(w.admit(arena, b, kPlainFn, 0.5) == AdmissionOutcome::Queued);
    dep = w.advance_then_rebalance(arena, 0.5);
    REQUIRE(dep->second == a); // b is waiting
    REQUIRE(arena[1].start < 0.0);

    w.advance_then_rebalance(arena, 2.0);
    w.release(arena, a, kPlainFn, 2.0);
    dep = w.advance_then_rebalance(arena, 2.0);
    REQUIRE(dep->second == b);
    REQUIRE(arena[1].start == doctest::Approx(2.0));
    REQUIRE(dep->first == doctest::Approx(3.0));
}

TEST_CASE("PS shares the cores equally") {
    std::vector<Invocation> arena;
    Worker w(0, 2, 16, Discipline::PS);
    for (int i = 0; i < 3; ++i) {
        const auto id = make_invocation(arena, 0, 0.0, 5.0);
        w.admit(arena, id, kPlainFn, 0.0);
    }
    w.advance_then_rebalance(arena, 0.0);
    // three invocations on two cores: rate 2/3 each
    w.advance_then_rebalance(arena, 1.0);
    for (int i = 0; i < 3; ++i)
        REQUIRE(arena[static_cast<std::size_t>(i)].remaining_work == doctest::Approx(5.0 - 2.0 / 3.0));
}

TEST_CASE("PS with n <= cores runs everyone at rate 1") {
    std::vector<Invocation> arena;
    Worker w(0, 2, 16, Discipline::PS);
    const auto a = make_invocation(arena, 0, 0.0, 5.0);
    const auto b = make_invocation(arena, 0, 0.0, 3.0);
    w.admit(arena, a, kPlainFn, 0.0);
    w.admit(arena, b, kPlainFn, 0.0);
    w.advance_then_rebalance(arena, 0.0);
    w.advance_then_rebalance(arena, 1.0);
    REQUIRE(arena[0].remaining_work == doctest::Approx(4.0));
    REQUIRE(arena[1].remaining_work == doctest::Approx(2.0));
}

TEST_CASE("SRPT serves the smallest remaining work first") {
    std::vector<Invocation> arena;
    Worker w(0, 1, 8, Discipline::SRPT);
    const auto big = make_invocation(arena, 0, 0.0, 5.0);
    const auto small = make_invocation(arena, 0, 0.1, 0.2);
    w.admit(arena, big, kPlainFn, 0.0);
    w.advance_then_rebalance(arena, 0.0);
    w.advance_then_rebalance(arena, 0.1);
    w.admit(arena, small, kPlainFn, 0.1);
    const auto dep = w.advance_then_rebalance(arena, 0.1);
    REQUIRE(dep->second == small);
    REQUIRE(dep->first == doctest::Approx(0.3));
    REQUIRE(arena[static_cast<std::size_t>(big)].service_rate == 0.0);
    REQUIRE(arena[static_cast<std::size_t>(small)].service_rate == 1.0);
}

// Head-of-line micro-scenario: 1 core, A(t=0, 10s) then B(t=1, 0.1s).
TEST_CASE("FCFS head-of-line blocking vs PS sharing, exact") {
    SUBCASE("FCFS: B completes at 10.1, slowdown 91") {
        std::vector<Invocation> arena;
        Worker w(0, 1, 8, Discipline::FCFS);
        const auto a = make_invocation(arena, 0, 0.0, 10.0);
        const auto b = make_invocation(arena, 1, 1.0, 0.1);
        w.admit(arena, a, kPlainFn, 0.0);
        w.advance_then_rebalance(arena, 0.0);
        w.advance_then_rebalance(arena, 1.0);
        w.admit(arena, b, kPlainFn, 1.0);
        auto dep = w.advance_then_rebalance(arena, 1.0);
        REQUIRE(dep->second == a);
        REQUIRE(dep->first == doctest::Approx(10.0));
        w.advance_then_rebalance(arena, 10.0);
        w.release(arena, a, kPlainFn, 10.0);
        dep = w.advance_then_rebalance(arena, 10.0);
        REQUIRE(dep->second == b);
        w.advance_then_rebalance(arena, dep->first);
        w.release(arena, b, kPlainFn, dep->first);
        REQUIRE(arena[1].completion == doctest::Approx(10.1));
        const double slowdown = (arena[1].completion - arena[1].arrival) / arena[1].service_demand;
        REQUIRE(slowdown == doctest::Approx(91.0));
    }
    SUBCASE("PS: B completes at 1.2, slowdown 2") {
        std::vector<Invocation> arena;
        Worker w(0, 1, 8, Discipline::PS);
        const auto a = make_invocation(arena, 0, 0.0, 10.0);
        const auto b = make_invocation(arena, 1, 1.0, 0.1);
        w.admit(arena, a, kPlainFn, 0.0);
        w.advance_then_rebalance(arena, 0.0);
        w.advance_then_rebalance(arena, 1.0);
        w.admit(arena, b, kPlainFn, 1.0);
        auto dep = w.advance_then_rebalance(arena, 1.0);
        REQUIRE(dep->second == b);
        REQUIRE(dep->first == doctest::Approx(1.2));
        w.advance_then_rebalance(arena, 1.2);
        w.release(arena, b, kPlainFn, 1.2);
        const double slowdown = (arena[1].completion - arena[1].arrival) / arena[1].service_demand;
        REQUIRE(slowdown == doctest::Approx(2.0));
    }
}

TEST_CASE("cold start penalty is extra initial work") {
    std::vector<Invocation> arena;
    const FunctionProfile slow_fn{0, 256, 0.5, kInfiniteKeepAlive};
    Worker w(0, 1, 8, Discipline::PS);
    const auto id = make_invocation(arena, 0, 0.0, 1.0);
    w.admit(arena, id, slow_fn, 0.0);
    const auto dep = w.advance_then_rebalance(arena, 0.0);
    REQUIRE(dep->first == doctest::Approx(1.5)); // payload + penalty at rate 1
}

TEST_CASE("container keep-alive expiry") {
    std::vector<Invocation> arena;
    const FunctionProfile keep_alive_fn{0, 256, 0.0, 600.0};
    Worker w(0, 1, 8, Discipline::PS);
    const auto id = make_invocation(arena, 0, 0.0, 1.0);
    w.admit(arena, id, keep_alive_fn, 0.0);
    w.advance_then_rebalance(arena, 1.0);
    const auto expiry = w.release(arena, id, keep_alive_fn, 1.0);
    REQUIRE(expiry.has_value());
    REQUIRE(*expiry == doctest::Approx(601.0));

    w.expire_containers(0, 600.0, 600.9); // not yet due
    REQUIRE(w.warm_count(0) == 1);
    w.expire_containers(0, 600.0, 601.0);
    REQUIRE(w.warm_count(0) == 0);
}

TEST_CASE("load counts running plus waiting") {
    std::vector<Invocation> arena;
    Worker w(0, 3, 24, Discipline::FCFS);
    REQUIRE(w.load() == 0);
    for (int i = 0; i < 5; ++i) {
        const auto id = make_invocation(arena, 0, 0.0, 10.0);
        w.admit(arena, id, kPlainFn, 0.0);
    }
    REQUIRE(w.load() == 5); // 3 running + 2 queued
    w.advance_then_rebalance(arena, 10.0);
    w.release(arena, 0, kPlainFn, 10.0);
    REQUIRE(w.load() == 4);
}

TEST_CASE("bookkeeping errors abort") {
    std::vector<Invocation> arena;
    Worker w(0, 1, 2, Discipline::PS);
    const auto a = make_invocation(arena, 0, 0.0, 1.0);
    const auto b = make_invocation(arena, 0, 0.0, 1.0);
    const auto c = make_invocation(arena, 0, 0.0, 1.0);
    w.admit(arena, a, kPlainFn, 0.0);
    w.admit(arena, b, kPlainFn, 0.0);
    REQUIRE_THROWS_AS(w.admit(arena, c, kPlainFn, 0.0), std::logic_error); // full

    REQUIRE_THROWS_AS(w.release(arena, c, kPlainFn, 0.0), std::logic_error); // not hosted
    w.advance_then_rebalance(arena, 0.0);
    REQUIRE_THROWS_AS(w.release(arena, a, kPlainFn, 0.0), std::logic_error); // work left
}

TEST_CASE("no invocation is ever served at rate above 1") {
    std::vector<Invocation> arena;
    Worker w(0, 4, 32, Discipline::PS);
    for (int i = 0; i < 3; ++i) {
        const auto id = make_invocation(arena, 0, 0.0, 1.0);
        w.admit(arena, id, kPlainFn, 0.0);
    }
    w.advance_then_rebalance(arena, 0.0);
    for (const auto& inv : arena) REQUIRE(inv.service_rate <= 1.0);
}
