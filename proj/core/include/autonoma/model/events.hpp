#pragma once

#include "autonoma/model/plan.hpp"
#include "autonoma/model/types.hpp"

#include <string>
#include <vector>

// Payload builders, one per event kind. Keeping the field names here means
// the state fold, the supervisor and the metrics code agree on them.
namespace autonoma::model::payload {

Json prompt_received(const Message& message);

Json intent_classified(IntentClass cls, double confidence, const std::vector<std::string>& cues,
                       Lang lang, const std::optional<Message>& reply);

Json handoff_to_planner(const HandoffRecord& record);

Json plan_proposed(const ValidatedPlan& plan, std::uint32_t retry_limit);

Json task_dispatched(const std::string& step_id, const std::string& agent_id,
                     std::uint32_t attempt, const std::string& description);

Json heartbeat(const std::string& step_id, std::uint32_t attempt, const std::string& note = {});

Json task_retried(const std::string& step_id, std::uint32_t failed_attempt,
                  const std::string& cause, std::int64_t backoff_ms);

Json task_succeeded(const std::string& step_id, const std::string& agent_id,
                    std::uint32_t attempts, const std::string& summary,
                    const std::vector<std::string>& artifacts, std::int64_t duration_ms);

Json task_failed(const std::string& step_id, const std::string& agent_id,
                 std::uint32_t attempts, const std::string& cause, std::int64_t duration_ms);

Json handoff_recorded(const HandoffRecord& record);

Json approval_requested(const std::string& step_id, const std::string& action_digest,
                        const std::string& description);

Json approval_resolved(const std::string& step_id, const std::string& action_digest,
                       bool approved);

Json report_ready(const Json& report);

// reason: "completed" | "failed" | "cancelled"
Json workflow_closed(const std::string& reason, const std::string& cause);

}  // namespace autonoma::model::payload
