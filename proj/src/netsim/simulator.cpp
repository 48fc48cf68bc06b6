#include "edgehealth/netsim/simulator.hpp"

#include <stdexcept>

namespace edgehealth::netsim {

void Simulator::schedule_at(SimTime at, Action action) {
    if (at < now_) throw std::logic_error("cannot schedule an event in the past");
    queue_.push(Event{at, next_seq_++, std::move(action)});
}

bool Simulator::step() {
    if (queue_.empty()) return false;
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ++fired_;
    ev.action();
    return true;
}

void Simulator::run() {
    while (step()) {
    }
}

void Simulator::run_until(SimTime until) {
    while (!queue_.empty() && queue_.top().time <= until) step();
    if (until > now_) now_ = until;
}

}  // namespace edgehealth::netsim
