#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

namespace edgehealth::netsim {

/// Simulated time in integer microseconds, so event ordering never depends on
/// floating-point rounding.
using SimTime = std::uint64_t;

inline SimTime from_seconds(double s) {
    return static_cast<SimTime>(std::llround(s * 1e6));
}
inline double to_seconds(SimTime t) {
    return static_cast<double>(t) / 1e6;
}

/// Discrete-event loop. Events fire in (time, insertion sequence) order.
class Simulator {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }

    void schedule(SimTime delay, Action action) { schedule_at(now_ + delay, std::move(action)); }
    void schedule_at(SimTime at, Action action);

    /// Fires the next event; false when the queue is empty.
    bool step();
    void run();
    /// Fires every event with time <= `until`, then sets the clock to `until`.
    void run_until(SimTime until);

    bool idle() const { return queue_.empty(); }
    std::size_t fired() const { return fired_; }

private:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::size_t fired_ = 0;
};

}  // namespace edgehealth::netsim
