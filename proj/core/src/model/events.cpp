#include "autonoma/model/events.hpp"

#include "autonoma/model/serialization.hpp"

namespace autonoma::model::payload {

Json prompt_received(const Message& message) { return Json{{"message", message}}; }

Json intent_classified(IntentClass cls, double confidence, const std::vector<std::string>& cues,
                       Lang lang, const std::optional<Message>& reply) {
    Json j{{"intent", {{"class", to_string(cls)}, {"confidence", confidence}, {"cues", cues}}},
           {"lang", to_string(lang)}};
    j["reply"] = reply ? Json(*reply) : Json(nullptr);
    return j;
}

Json handoff_to_planner(const HandoffRecord& record) { return Json{{"record", record}}; }

Json plan_proposed(const ValidatedPlan& plan, std::uint32_t retry_limit) {
    return Json{{"plan", plan.plan()}, {"levels", levels_to_json(plan.levels())}, {"retry_limit", retry_limit}};
}

Json task_dispatched(const std::string& step_id, const std::string& agent_id, std::uint32_t attempt,
                     const std::string& description) {
    return Json{{"step_id", step_id}, {"agent_id", agent_id}, {"attempt", attempt}, {"description", description}};
}

Json heartbeat(const std::string& step_id, std::uint32_t attempt, const std::string& note) {
    Json j{{"step_id", step_id}, {"attempt", attempt}};
    if (!note.empty()) j["note"] = note;
    return j;
}

Json task_retried(const std::string& step_id, std::uint32_t failed_attempt, const std::string& cause,
                  std::int64_t backoff_ms) {
    return Json{{"step_id", step_id}, {"attempt", failed_attempt}, {"cause", cause}, {"backoff_ms", backoff_ms}};
}

Json task_succeeded(const std::string& step_id, const std::string& agent_id, std::uint32_t attempts,
                    const std::string& summary, const std::vector<std::string>& artifacts,
                    std::int64_t duration_ms) {
    return Json{{"step_id", step_id}, {"agent_id", agent_id},       {"attempts", attempts},
                {"summary", summary}, {"artifacts", artifacts},     {"duration_ms", duration_ms}};
}

Json task_failed(const std::string& step_id, const std::string& agent_id, std::uint32_t attempts,
                 const std::string& cause, std::int64_t duration_ms) {
    return Json{{"step_id", step_id}, {"agent_id", agent_id}, {"attempts", attempts},
                {"cause", cause},     {"duration_ms", duration_ms}};
}

Json handoff_recorded(const HandoffRecord& record) { return Json{{"record", record}}; }

Json approval_requested(const std::string& step_id, const std::string& action_digest,
                        const std::string& description) {
    return Json{{"step_id", step_id}, {"action_digest", action_digest}, {"description", description}};
}

Json approval_resolved(const std::string& step_id, const std::string& action_digest, bool approved) {
    return Json{{"step_id", step_id}, {"action_digest", action_digest}, {"approved", approved}};
}

Json report_ready(const Json& report) { return Json{{"report", report}}; }

Json workflow_closed(const std::string& reason, const std::string& cause) {
    return Json{{"reason", reason}, {"cause", cause}};
}

}  // namespace autonoma::model::payload
