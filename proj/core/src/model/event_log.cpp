#include "autonoma/model/event_log.hpp"

#include "autonoma/model/state_machine.hpp"

namespace autonoma::model {

EventLog::EventLog(std::vector<WorkflowEvent> existing) : events_(std::move(existing)) {
    state_ = replay(events_);
}

WorkflowEvent EventLog::emit(EventKind kind, Json payload, TimestampMs timestamp) {
    std::vector<Listener> listeners;
    WorkflowEvent e;
    WorkflowState s;
    {
        std::lock_guard lock(mu_);
        e.seq = state_.last_seq + 1;
        e.kind = kind;
        e.payload = std::move(payload);
        e.timestamp = timestamp;
        state_ = transition(state_, e);
        events_.push_back(e);
        s = state_;
        for (const auto& [id, l] : listeners_) listeners.push_back(l);
    }
    for (const auto& l : listeners) l(e, s);
    return e;
}

WorkflowState EventLog::state() const {
    std::lock_guard lock(mu_);
    return state_;
}

std::vector<WorkflowEvent> EventLog::events() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::vector<WorkflowEvent> EventLog::since(std::uint64_t seq) const {
    std::lock_guard lock(mu_);
    if (seq >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(seq), events_.end()};
}

std::uint64_t EventLog::last_seq() const {
    std::lock_guard lock(mu_);
    return state_.last_seq;
}

std::size_t EventLog::subscribe(Listener listener) {
    std::lock_guard lock(mu_);
    const auto id = next_listener_++;
    listeners_.emplace(id, std::move(listener));
    return id;
}

void EventLog::unsubscribe(std::size_t id) {
    std::lock_guard lock(mu_);
    listeners_.erase(id);
}

}  // namespace autonoma::model
