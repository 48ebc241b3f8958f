#include "autonoma/model/types.hpp"

#include "autonoma/common/error.hpp"

#include <array>
#include <utility>

namespace autonoma::model {
namespace {

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s,
         std::string_view what) {
    for (const auto& [value, name] : table) {
        if (name == s) return value;
    }
    throw Error(Errc::corrupt, "unknown " + std::string(what) + " tag '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
    for (const auto& [value, name] : table) {
        if (value == v) return name;
    }
    return "unknown";
}

constexpr std::array<std::pair<Role, std::string_view>, 6> kRoles{{
    {Role::user, "user"},
    {Role::coordinator, "coordinator"},
    {Role::planner, "planner"},
    {Role::supervisor, "supervisor"},
    {Role::agent, "agent"},
    {Role::reporter, "reporter"},
}};

constexpr std::array<std::pair<Lang, std::string_view>, 3> kLangs{{
    {Lang::en, "en"},
    {Lang::ar, "ar"},
    {Lang::und, "und"},
}};

constexpr std::array<std::pair<TaskPhase, std::string_view>, 8> kPhases{{
    {TaskPhase::Pending, "Pending"},
    {TaskPhase::Dispatched, "Dispatched"},
    {TaskPhase::Running, "Running"},
    {TaskPhase::Stalled, "Stalled"},
    {TaskPhase::Retrying, "Retrying"},
    {TaskPhase::Succeeded, "Succeeded"},
    {TaskPhase::Failed, "Failed"},
    {TaskPhase::Skipped, "Skipped"},
}};

constexpr std::array<std::pair<WorkflowStatus, std::string_view>, 10> kStatuses{{
    {WorkflowStatus::Created, "Created"},
    {WorkflowStatus::AwaitingClarification, "AwaitingClarification"},
    {WorkflowStatus::Planning, "Planning"},
    {WorkflowStatus::Executing, "Executing"},
    {WorkflowStatus::AwaitingApproval, "AwaitingApproval"},
    {WorkflowStatus::Reporting, "Reporting"},
    {WorkflowStatus::Complete, "Complete"},
    {WorkflowStatus::PartialFailure, "PartialFailure"},
    {WorkflowStatus::Failed, "Failed"},
    {WorkflowStatus::Rejected, "Rejected"},
}};

constexpr std::array<std::pair<EventKind, std::string_view>, 14> kKinds{{
    {EventKind::PromptReceived, "PromptReceived"},
    {EventKind::IntentClassified, "IntentClassified"},
    {EventKind::HandoffToPlanner, "HandoffToPlanner"},
    {EventKind::PlanProposed, "PlanProposed"},
    {EventKind::TaskDispatched, "TaskDispatched"},
    {EventKind::Heartbeat, "Heartbeat"},
    {EventKind::TaskRetried, "TaskRetried"},
    {EventKind::TaskSucceeded, "TaskSucceeded"},
    {EventKind::TaskFailed, "TaskFailed"},
    {EventKind::HandoffRecorded, "HandoffRecorded"},
    {EventKind::ApprovalRequested, "ApprovalRequested"},
    {EventKind::ApprovalResolved, "ApprovalResolved"},
    {EventKind::ReportReady, "ReportReady"},
    {EventKind::WorkflowClosed, "WorkflowClosed"},
}};

constexpr std::array<std::pair<IntentClass, std::string_view>, 4> kIntents{{
    {IntentClass::CasualChat, "CasualChat"},
    {IntentClass::Harmful, "Harmful"},
    {IntentClass::Ambiguous, "Ambiguous"},
    {IntentClass::Task, "Task"},
}};

}  // namespace

std::string_view to_string(Role r) { return name_of(kRoles, r); }
std::string_view to_string(Lang l) { return name_of(kLangs, l); }
std::string_view to_string(TaskPhase p) { return name_of(kPhases, p); }
std::string_view to_string(WorkflowStatus s) { return name_of(kStatuses, s); }
std::string_view to_string(EventKind k) { return name_of(kKinds, k); }
std::string_view to_string(IntentClass c) { return name_of(kIntents, c); }

Role role_from_string(std::string_view s) { return lookup(kRoles, s, "role"); }
Lang lang_from_string(std::string_view s) { return lookup(kLangs, s, "lang"); }
TaskPhase task_phase_from_string(std::string_view s) { return lookup(kPhases, s, "task phase"); }
WorkflowStatus workflow_status_from_string(std::string_view s) {
    return lookup(kStatuses, s, "workflow status");
}
EventKind event_kind_from_string(std::string_view s) { return lookup(kKinds, s, "event kind"); }
IntentClass intent_class_from_string(std::string_view s) {
    return lookup(kIntents, s, "intent class");
}

}  // namespace autonoma::model
