#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace faassim {

using SimTime = double; // seconds of virtual time

enum class EventKind : std::uint8_t {
    Arrival,         // a = invocation id
    Departure,       // a = worker id, b = invocation id
    ContainerExpiry, // a = worker id, b = function id
    SampleTick,
};

struct Event {
    SimTime time = 0.0;
    std::uint64_t sequence = 0; // insertion order; ties at equal time pop FIFO
    EventKind kind = EventKind::SampleTick;
    std::int64_t a = -1;
    std::int64_t b = -1;
};

// Time-ordered event queue with O(log n) push/pop and handle-based
// cancellation (lazy deletion on pop). Equal-time events pop in insertion
// order. Pushing an event earlier than the last popped time throws: that is
// always an engine logic bug, never a recoverable condition.
class EventQueue {
public:
    using Handle = std::uint64_t;

    Handle push(SimTime time, EventKind kind, std::int64_t a = -1, std::int64_t b = -1) {
        if (time < clock_)
            throw std::logic_error("EventQueue: push into the past (t=" + std::to_string(time) +
                                   " < clock " + std::to_string(clock_) + ")");
        const Handle h = next_handle_++;
        heap_.push(Entry{Event{time, next_sequence_++, kind, a, b}, h});
        return h;
    }

    // Marks a pending event as dead; pop() will skip it.
    void cancel(Handle h) {
        if (h >= next_handle_) throw std::logic_error("EventQueue: cancel of unknown handle");
        cancelled_.insert(h);
    }

    std::optional<Event> pop() {
        while (!heap_.empty()) {
            Entry e = heap_.top();
            heap_.pop();
            if (auto it = cancelled_.find(e.handle); it != cancelled_.end()) {
                cancelled_.erase(it);
                continue;
            }
            clock_ = e.event.time;
            return e.event;
        }
        return std::nullopt;
    }

    // Time of the next live event, if any.
    std::optional<SimTime> peek_time() {
        skim();
        if (heap_.empty()) return std::nullopt;
        return heap_.top().event.time;
    }

    bool empty() {
        skim();
        return heap_.empty();
    }

    std::size_t size() const { return heap_.size() - cancelled_.size(); }
    SimTime clock() const { return clock_; }

private:
    struct Entry {
        Event event;
        Handle handle;
    };
    struct Later {
        bool operator()(const Entry& x, const Entry& y) const {
            if (x.event.time != y.event.time) return x.event.time > y.event.time;
            return x.event.sequence > y.event.sequence;
        }
    };

    // Drops cancelled entries sitting at the top so peek/empty see live state.
    void skim() {
        while (!heap_.empty()) {
            auto it = cancelled_.find(heap_.top().handle);
            if (it == cancelled_.end()) break;
            cancelled_.erase(it);
            heap_.pop();
        }
    }

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::unordered_set<Handle> cancelled_;
    Handle next_handle_ = 0;
    std::uint64_t next_sequence_ = 0;
    SimTime clock_ = 0.0;
};

} // namespace faassim
