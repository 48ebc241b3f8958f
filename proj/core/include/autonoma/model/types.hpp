#pragma once

#include "autonoma/common/clock.hpp"
#include "autonoma/common/json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::model {

enum class Role { user, coordinator, planner, supervisor, agent, reporter };

enum class Lang { en, ar, und };

struct Message {
    std::string id;
    Role role = Role::user;
    std::string content;
    Lang lang = Lang::und;
    std::vector<std::string> attachments;  // artifact references
    TimestampMs timestamp = 0;
    // Reserved contextual cues (e.g. "urgency"). Carried and persisted, never
    // consumed by scheduling.
    std::map<std::string, std::string> metadata;

    bool operator==(const Message&) const = default;
};

struct PlanStep {
    std::string id;
    std::string description;
    std::string required_capability;
    std::optional<std::string> agent_hint;
    std::vector<std::string> depends_on;

    bool operator==(const PlanStep&) const = default;
};

struct Plan {
    std::string thought;
    std::vector<PlanStep> steps;
    std::string created_by;

    bool operator==(const Plan&) const = default;
};

enum class TaskPhase { Pending, Dispatched, Running, Stalled, Retrying, Succeeded, Failed, Skipped };

struct TaskStatus {
    TaskPhase phase = TaskPhase::Pending;
    std::uint32_t attempts = 0;
    std::optional<TimestampMs> last_heartbeat;

    bool operator==(const TaskStatus&) const = default;
};

inline bool is_terminal(TaskPhase p) {
    return p == TaskPhase::Succeeded || p == TaskPhase::Failed || p == TaskPhase::Skipped;
}

enum class WorkflowStatus {
    Created,
    AwaitingClarification,
    Planning,
    Executing,
    AwaitingApproval,
    Reporting,
    Complete,
    PartialFailure,
    Failed,
    Rejected,
};

inline bool is_terminal(WorkflowStatus s) {
    return s == WorkflowStatus::Complete || s == WorkflowStatus::PartialFailure ||
           s == WorkflowStatus::Failed || s == WorkflowStatus::Rejected;
}

// A workflow is "active" while a prompt is being handled end to end.
inline bool is_active(WorkflowStatus s) {
    return s == WorkflowStatus::Planning || s == WorkflowStatus::Executing ||
           s == WorkflowStatus::AwaitingApproval || s == WorkflowStatus::Reporting;
}

enum class EventKind {
    PromptReceived,
    IntentClassified,
    HandoffToPlanner,
    PlanProposed,
    TaskDispatched,
    Heartbeat,
    TaskRetried,
    TaskSucceeded,
    TaskFailed,
    HandoffRecorded,
    ApprovalRequested,
    ApprovalResolved,
    ReportReady,
    WorkflowClosed,
};

enum class IntentClass { CasualChat, Harmful, Ambiguous, Task };

struct HandoffRecord {
    Role from_role = Role::coordinator;
    Role to_role = Role::planner;
    std::string payload_digest;
    bool accepted = false;
    TimestampMs timestamp = 0;

    bool operator==(const HandoffRecord&) const = default;
};

struct WorkflowEvent {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::PromptReceived;
    Json payload = Json::object();
    TimestampMs timestamp = 0;

    bool operator==(const WorkflowEvent&) const = default;
};

struct WorkflowState {
    WorkflowStatus status = WorkflowStatus::Created;
    std::map<std::string, TaskStatus> task_states;
    std::optional<Plan> plan;

    std::uint64_t last_seq = 0;
    std::uint32_t retry_limit = 0;           // snapshot from PlanProposed
    std::set<std::string> pending_approvals;  // action digests awaiting a decision
    std::uint32_t clarifications = 0;        // consecutive clarification turns
    std::uint32_t turns = 0;                 // prompts received in this conversation
    bool handed_off = false;                 // HandoffToPlanner seen for the current workflow
    std::string close_reason;                // completed | failed | cancelled (last close)
    std::string close_cause;

    bool operator==(const WorkflowState&) const = default;
};

std::string_view to_string(Role r);
std::string_view to_string(Lang l);
std::string_view to_string(TaskPhase p);
std::string_view to_string(WorkflowStatus s);
std::string_view to_string(EventKind k);
std::string_view to_string(IntentClass c);

// Parsers throw Error(Errc::corrupt) on unknown tags.
Role role_from_string(std::string_view s);
Lang lang_from_string(std::string_view s);
TaskPhase task_phase_from_string(std::string_view s);
WorkflowStatus workflow_status_from_string(std::string_view s);
EventKind event_kind_from_string(std::string_view s);
IntentClass intent_class_from_string(std::string_view s);

}  // namespace autonoma::model
