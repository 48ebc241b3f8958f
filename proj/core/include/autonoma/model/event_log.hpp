#pragma once

#include "autonoma/model/types.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <vector>

namespace autonoma::model {

// Where workflow events go. The sink assigns sequence numbers.
class EventSink {
public:
    virtual ~EventSink() = default;
    // Throws IllegalTransition when the event does not fit the current state.
    virtual WorkflowEvent emit(EventKind kind, Json payload, TimestampMs timestamp) = 0;
    virtual WorkflowState state() const = 0;
};

// In-memory event log folding every event into the current state. Listeners
// run after the event is applied, in subscription order, on the emitting
// thread.
class EventLog final : public EventSink {
public:
    using Listener = std::function<void(const WorkflowEvent&, const WorkflowState&)>;

    EventLog() = default;
    // Resumes from a persisted log; throws GapInSequence/IllegalTransition.
    explicit EventLog(std::vector<WorkflowEvent> existing);

    WorkflowEvent emit(EventKind kind, Json payload, TimestampMs timestamp) override;
    WorkflowState state() const override;

    std::vector<WorkflowEvent> events() const;
    std::vector<WorkflowEvent> since(std::uint64_t seq) const;
    std::uint64_t last_seq() const;

    std::size_t subscribe(Listener listener);
    void unsubscribe(std::size_t id);

private:
    mutable std::mutex mu_;
    std::vector<WorkflowEvent> events_;
    WorkflowState state_;
    std::map<std::size_t, Listener> listeners_;
    std::size_t next_listener_ = 1;
};

}  // namespace autonoma::model
