#include "autonoma/model/state_machine.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/model/plan.hpp"
#include "autonoma/model/serialization.hpp"

#include <algorithm>

namespace autonoma::model {
namespace {

[[noreturn]] void illegal(const WorkflowState& s, const WorkflowEvent& e, const std::string& why = {}) {
    std::string msg = "illegal transition: " + std::string(to_string(e.kind)) + " in status " +
                      std::string(to_string(s.status));
    if (!why.empty()) msg += " (" + why + ")";
    throw Error(Errc::illegal_transition, msg);
}

std::string str_field(const WorkflowState& s, const WorkflowEvent& e, const char* key) {
    auto it = e.payload.find(key);
    if (it == e.payload.end() || !it->is_string()) illegal(s, e, std::string("payload lacks ") + key);
    return it->get<std::string>();
}

TaskStatus& task(WorkflowState& s, const WorkflowEvent& e, const std::string& id) {
    auto it = s.task_states.find(id);
    if (it == s.task_states.end()) illegal(s, e, "unknown step '" + id + "'");
    return it->second;
}

bool in(TaskPhase p, std::initializer_list<TaskPhase> allowed) {
    return std::find(allowed.begin(), allowed.end(), p) != allowed.end();
}

bool executing(WorkflowStatus st) {
    return st == WorkflowStatus::Executing || st == WorkflowStatus::AwaitingApproval;
}

void settle(WorkflowState& s) {
    if (s.status != WorkflowStatus::Executing) return;
    const bool all_terminal = std::all_of(s.task_states.begin(), s.task_states.end(),
                                          [](const auto& kv) { return is_terminal(kv.second.phase); });
    if (all_terminal) s.status = WorkflowStatus::Reporting;
}

void reset_workflow(WorkflowState& s) {
    s.plan.reset();
    s.task_states.clear();
    s.pending_approvals.clear();
    s.retry_limit = 0;
    s.handed_off = false;
    s.close_reason.clear();
    s.close_cause.clear();
}

}  // namespace

WorkflowStatus closing_outcome(const WorkflowState& state) {
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    for (const auto& [id, t] : state.task_states) {
        if (t.phase == TaskPhase::Succeeded) ++succeeded;
        if (t.phase == TaskPhase::Failed) ++failed;
    }
    if (!state.task_states.empty() && succeeded == state.task_states.size()) {
        return WorkflowStatus::Complete;
    }
    if (succeeded > 0 && failed > 0) return WorkflowStatus::PartialFailure;
    return WorkflowStatus::Failed;
}

WorkflowState transition(const WorkflowState& state, const WorkflowEvent& event) {
    if (event.seq != state.last_seq + 1) {
        throw Error(Errc::gap_in_sequence, "expected seq " + std::to_string(state.last_seq + 1) +
                                               ", got " + std::to_string(event.seq));
    }
    WorkflowState s = state;
    s.last_seq = event.seq;
    const auto& e = event;

    switch (e.kind) {
        case EventKind::PromptReceived: {
            if (is_terminal(s.status)) {
                reset_workflow(s);
            } else if (s.status != WorkflowStatus::Created &&
                       s.status != WorkflowStatus::AwaitingClarification) {
                illegal(state, e);
            }
            s.status = WorkflowStatus::Created;
            ++s.turns;
            break;
        }
        case EventKind::IntentClassified: {
            if (s.status != WorkflowStatus::Created) illegal(state, e);
            IntentClass cls;
            try {
                cls = intent_class_from_string(e.payload.at("intent").at("class").get<std::string>());
            } catch (const std::exception&) {
                illegal(state, e, "malformed intent");
            }
            switch (cls) {
                case IntentClass::Task:
                    s.status = WorkflowStatus::Planning;
                    s.clarifications = 0;
                    s.handed_off = false;
                    break;
                case IntentClass::CasualChat:
                    s.status = WorkflowStatus::Created;
                    s.clarifications = 0;
                    break;
                case IntentClass::Ambiguous:
                    s.status = WorkflowStatus::AwaitingClarification;
                    ++s.clarifications;
                    break;
                case IntentClass::Harmful:
                    s.status = WorkflowStatus::Rejected;
                    s.clarifications = 0;
                    break;
            }
            break;
        }
        case EventKind::HandoffToPlanner: {
            if (s.status != WorkflowStatus::Planning || s.handed_off) illegal(state, e);
            try {
                s.handed_off = e.payload.at("record").at("accepted").get<bool>();
            } catch (const std::exception&) {
                illegal(state, e, "malformed handoff record");
            }
            break;
        }
        case EventKind::HandoffRecorded: {
            if (!is_active(s.status)) illegal(state, e);
            break;
        }
        case EventKind::PlanProposed: {
            if (s.status != WorkflowStatus::Planning) illegal(state, e);
            if (!s.handed_off) illegal(state, e, "no accepted handoff to planner");
            Plan plan;
            try {
                plan = e.payload.at("plan").get<Plan>();
                s.retry_limit = e.payload.at("retry_limit").get<std::uint32_t>();
            } catch (const std::exception&) {
                illegal(state, e, "malformed plan payload");
            }
            if (plan.steps.empty()) illegal(state, e, "empty plan");
            s.task_states.clear();
            for (const auto& step : plan.steps) s.task_states[step.id] = TaskStatus{};
            s.plan = std::move(plan);
            s.status = WorkflowStatus::Executing;
            break;
        }
        case EventKind::TaskDispatched: {
            if (!executing(s.status)) illegal(state, e);
            auto& t = task(s, e, str_field(state, e, "step_id"));
            if (!in(t.phase, {TaskPhase::Pending, TaskPhase::Retrying})) illegal(state, e, "task not dispatchable");
            if (t.attempts + 1 > s.retry_limit + 1) illegal(state, e, "attempts exceed retry limit");
            ++t.attempts;
            t.phase = TaskPhase::Dispatched;
            t.last_heartbeat.reset();
            break;
        }
        case EventKind::Heartbeat: {
            if (!executing(s.status)) illegal(state, e);
            auto& t = task(s, e, str_field(state, e, "step_id"));
            if (!in(t.phase, {TaskPhase::Dispatched, TaskPhase::Running})) illegal(state, e, "task not running");
            if (e.payload.value("attempt", 0u) != t.attempts) illegal(state, e, "stale attempt");
            t.phase = TaskPhase::Running;
            t.last_heartbeat = e.timestamp;
            break;
        }
        case EventKind::TaskRetried: {
            if (!executing(s.status)) illegal(state, e);
            auto& t = task(s, e, str_field(state, e, "step_id"));
            if (!in(t.phase, {TaskPhase::Dispatched, TaskPhase::Running, TaskPhase::Stalled})) {
                illegal(state, e, "task not in flight");
            }
            if (t.attempts >= s.retry_limit + 1) illegal(state, e, "retry budget exhausted");
            t.phase = TaskPhase::Retrying;
            break;
        }
        case EventKind::TaskSucceeded: {
            if (!executing(s.status)) illegal(state, e);
            auto& t = task(s, e, str_field(state, e, "step_id"));
            if (!in(t.phase, {TaskPhase::Dispatched, TaskPhase::Running})) illegal(state, e, "task not in flight");
            t.phase = TaskPhase::Succeeded;
            settle(s);
            break;
        }
        case EventKind::TaskFailed: {
            if (!executing(s.status)) illegal(state, e);
            const auto id = str_field(state, e, "step_id");
            auto& t = task(s, e, id);
            if (!in(t.phase, {TaskPhase::Pending, TaskPhase::Dispatched, TaskPhase::Running,
                              TaskPhase::Retrying, TaskPhase::Stalled})) {
                illegal(state, e, "task already terminal");
            }
            t.phase = TaskPhase::Failed;
            for (const auto& d : transitive_dependents(*s.plan, id)) {
                auto& dt = s.task_states.at(d);
                if (dt.phase == TaskPhase::Pending) dt.phase = TaskPhase::Skipped;
            }
            settle(s);
            break;
        }
        case EventKind::ApprovalRequested: {
            if (!executing(s.status)) illegal(state, e);
            auto& t = task(s, e, str_field(state, e, "step_id"));
            if (!in(t.phase, {TaskPhase::Dispatched, TaskPhase::Running})) illegal(state, e, "task not in flight");
            s.pending_approvals.insert(str_field(state, e, "action_digest"));
            s.status = WorkflowStatus::AwaitingApproval;
            break;
        }
        case EventKind::ApprovalResolved: {
            if (s.status != WorkflowStatus::AwaitingApproval) illegal(state, e);
            const auto digest = str_field(state, e, "action_digest");
            if (!s.pending_approvals.erase(digest)) illegal(state, e, "no such pending approval");
            if (s.pending_approvals.empty()) {
                s.status = WorkflowStatus::Executing;
                settle(s);
            }
            break;
        }
        case EventKind::ReportReady: {
            if (s.status != WorkflowStatus::Reporting) illegal(state, e);
            break;
        }
        case EventKind::WorkflowClosed: {
            const auto reason = str_field(state, e, "reason");
            if (reason != "completed" && reason != "failed" && reason != "cancelled") {
                illegal(state, e, "unknown close reason");
            }
            s.close_reason = reason;
            s.close_cause = e.payload.value("cause", std::string{});
            if (s.status == WorkflowStatus::Reporting) {
                s.status = reason == "completed" ? closing_outcome(s) : WorkflowStatus::Failed;
            } else if (is_active(s.status) || s.status == WorkflowStatus::AwaitingClarification) {
                if (reason == "completed") illegal(state, e, "cannot complete before reporting");
                for (auto& [id, t] : s.task_states) {
                    if (!is_terminal(t.phase)) t.phase = TaskPhase::Failed;
                }
                s.pending_approvals.clear();
                s.status = WorkflowStatus::Failed;
            } else {
                illegal(state, e);
            }
            break;
        }
    }
    return s;
}

WorkflowState replay(std::span<const WorkflowEvent> events) {
    WorkflowState s;
    for (const auto& e : events) s = transition(s, e);
    return s;
}

std::optional<std::string> check_invariants(const WorkflowState& s) {
    for (const auto& [id, t] : s.task_states) {
        if (t.attempts > s.retry_limit + 1) return "step " + id + " exceeded retry limit";
    }
    if (s.status == WorkflowStatus::Complete) {
        if (s.task_states.empty()) return "Complete without tasks";
        for (const auto& [id, t] : s.task_states) {
            if (t.phase != TaskPhase::Succeeded) return "Complete with unsucceeded step " + id;
        }
    }
    if (s.status == WorkflowStatus::PartialFailure) {
        bool ok = false, bad = false;
        for (const auto& [id, t] : s.task_states) {
            ok |= t.phase == TaskPhase::Succeeded;
            bad |= t.phase == TaskPhase::Failed;
        }
        if (!(ok && bad)) return "PartialFailure without both a success and a failure";
    }
    if (s.plan) {
        for (const auto& [id, t] : s.task_states) {
            if (t.phase != TaskPhase::Skipped) continue;
            bool failed_ancestor = false;
            for (const auto& [other, ot] : s.task_states) {
                if (ot.phase != TaskPhase::Failed) continue;
                const auto desc = transitive_dependents(*s.plan, other);
                if (std::find(desc.begin(), desc.end(), id) != desc.end()) {
                    failed_ancestor = true;
                    break;
                }
            }
            if (!failed_ancestor) return "step " + id + " Skipped without a failed ancestor";
        }
    }
    if ((s.status == WorkflowStatus::Executing || s.status == WorkflowStatus::AwaitingApproval ||
         s.status == WorkflowStatus::Reporting) && !s.plan) {
        return "execution status without a plan";
    }
    if ((s.status == WorkflowStatus::AwaitingApproval) != !s.pending_approvals.empty()) {
        return "pending approvals inconsistent with status";
    }
    return std::nullopt;
}

}  // namespace autonoma::model
