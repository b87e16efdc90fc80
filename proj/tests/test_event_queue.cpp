#include <doctest.h>

#include <map>
#include <unordered_map>
#include <vector>

#include "faassim/event_queue.hpp"
#include "faassim/rng.hpp"

using namespace faassim;

TEST_CASE("equal-time events pop in insertion order") {
    EventQueue q;
    q.push(5.0, EventKind::Arrival, 1);
    q.push(3.0, EventKind::Arrival, 2);
    q.push(5.0, EventKind::Arrival, 3);

    REQUIRE(q.pop()->a == 2);
    REQUIRE(q.pop()->a == 1);
    REQUIRE(q.pop()->a == 3);
    REQUIRE(!q.pop().has_value());
}

TEST_CASE("cancelled events are skipped") {
    EventQueue q;
    q.push(1.0, EventKind::Arrival, 1);
    const auto h = q.push(2.0, EventKind::Arrival, 2);
    q.push(3.0, EventKind::Arrival, 3);
    q.cancel(h);

    REQUIRE(q.pop()->a == 1);
    REQUIRE(q.pop()->a == 3);
    REQUIRE(q.empty());
}

TEST_CASE("pushing into the past throws") {
    EventQueue q;
    q.push(10.0, EventKind::SampleTick);
    REQUIRE(q.pop().has_value());
    REQUIRE_THROWS_AS(q.push(5.0, EventKind::SampleTick), std::logic_error);
    REQUIRE_NOTHROW(q.push(10.0, EventKind::SampleTick)); // same instant is fine
}

TEST_CASE("peek_time sees through cancelled heads") {
    EventQueue q;
    const auto h = q.push(1.0, EventKind::SampleTick);
    q.push(2.0, EventKind::SampleTick);
    q.cancel(h);
    REQUIRE(q.peek_time().value() == 2.0);
}

// Heap order against an ordered-map oracle over a million random pushes,
// pops and cancellations.
TEST_CASE("event queue matches a sorted oracle") {
    EventQueue q;
    Rng rng(12345);

    using Key = std::pair<double, std::uint64_t>; // (time, insertion seq)
    std::map<Key, EventQueue::Handle> oracle;
    std::unordered_map<EventQueue::Handle, Key> index;
    std::uint64_t seq = 0;
    double clock = 0.0;

    const int kOps = 1'000'000;
    for (int i = 0; i < kOps; ++i) {
        const double what = rng.uniform01();
        if (what < 0.50) {
            const double t = clock + rng.uniform01() * 10.0;
            const auto h = q.push(t, EventKind::SampleTick, i);
            const Key key{t, seq++};
            oracle.emplace(key, h);
            index.emplace(h, key);
        } else if (what < 0.62 && !index.empty()) {
            // cancel a random live handle
            auto it = index.begin();
            const auto step = rng.uniform_int(std::min<std::uint64_t>(index.size(), 64));
            std::advance(it, static_cast<std::ptrdiff_t>(step));
            q.cancel(it->first);
            oracle.erase(it->second);
            index.erase(it);
        } else {
            const auto got = q.pop();
            if (oracle.empty()) {
                REQUIRE(!got.has_value());
            } else {
                REQUIRE(got.has_value());
                auto front = oracle.begin();
                REQUIRE(got->time == front->first.first);
                clock = got->time;
                index.erase(front->second);
                oracle.erase(front);
            }
        }
    }
    // drain and compare the tails
    while (auto got = q.pop()) {
        REQUIRE(!oracle.empty());
        auto front = oracle.begin();
        CHECK(got->time == front->first.first);
        oracle.erase(front);
    }
    CHECK(oracle.empty());
}
