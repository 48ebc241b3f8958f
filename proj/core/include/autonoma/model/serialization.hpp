#pragma once

#include "autonoma/model/plan.hpp"
#include "autonoma/model/types.hpp"

#include <string>
#include <string_view>

// JSON mapping for the domain types (snake_case keys, integer seq and
// timestamps). Decoders are strict about types and required keys and throw
// Error(Errc::corrupt) on mismatch.
namespace autonoma::model {

void to_json(Json& j, const Message& m);
void from_json(const Json& j, Message& m);

void to_json(Json& j, const PlanStep& s);
void from_json(const Json& j, PlanStep& s);

void to_json(Json& j, const Plan& p);
void from_json(const Json& j, Plan& p);

void to_json(Json& j, const TaskStatus& t);
void from_json(const Json& j, TaskStatus& t);

void to_json(Json& j, const HandoffRecord& h);
void from_json(const Json& j, HandoffRecord& h);

void to_json(Json& j, const WorkflowEvent& e);
void from_json(const Json& j, WorkflowEvent& e);

void to_json(Json& j, const WorkflowState& s);
void from_json(const Json& j, WorkflowState& s);

std::string serialize_event(const WorkflowEvent& e);
WorkflowEvent parse_event(std::string_view line);

Json levels_to_json(const Levels& levels);

}  // namespace autonoma::model
