#pragma once

#include "autonoma/common/json.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace autonoma::model {

struct StepSucceeded {
    std::vector<std::string> artifacts;
    std::string summary;
    Json data = Json::object();

    bool operator==(const StepSucceeded&) const = default;
};

struct StepFailed {
    std::string cause;
    std::uint32_t attempts = 0;

    bool operator==(const StepFailed&) const = default;
};

// Never dispatched because an ancestor failed.
struct StepSkipped {
    std::string failed_ancestor;

    bool operator==(const StepSkipped&) const = default;
};

struct TaskResult {
    std::string step_id;
    std::variant<StepSucceeded, StepFailed, StepSkipped> outcome;
    std::int64_t duration_ms = 0;
    std::string agent_id;

    bool succeeded() const { return std::holds_alternative<StepSucceeded>(outcome); }
    bool operator==(const TaskResult&) const = default;
};

void to_json(Json& j, const TaskResult& r);
void from_json(const Json& j, TaskResult& r);

}  // namespace autonoma::model
