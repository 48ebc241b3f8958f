#pragma once

#include "autonoma/agents/manifest.hpp"
#include "autonoma/common/clock.hpp"
#include "autonoma/common/json.hpp"
#include "autonoma/model/types.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace autonoma::provider {
class Router;
}

namespace autonoma::agents {

struct TaskPayload {
    std::string conversation_id;
    std::string step_id;
    std::string description;
    std::string required_capability;
    std::uint32_t attempt = 1;
    model::Lang lang = model::Lang::en;
    // Summaries and data of the step's direct dependencies, keyed by step id.
    Json inputs = Json::object();
    // Structured arguments for agents that take them (file ops, scripts).
    Json args = Json::object();
    // The whole plan and every result so far, for the reporter.
    Json context = Json::object();
};

struct AgentOutput {
    std::string summary;
    std::vector<std::string> artifacts;
    Json data = Json::object();
};

struct AgentFailure {
    std::string cause;  // Timeout, AgentPanic, PrivilegeViolation, ...
    std::string detail;
    bool retryable = true;
};

// The agent wants to perform a destructive action. The supervisor asks the
// user and re-invokes the same attempt once the digest has been approved.
struct ApprovalNeeded {
    std::string action_digest;
    std::string description;
};

using AgentOutcome = std::variant<AgentOutput, AgentFailure, ApprovalNeeded>;

class ArtifactSink {
public:
    virtual ~ArtifactSink() = default;
    virtual std::string write_artifact(const std::string& name, std::string_view bytes) = 0;
    virtual std::string write_screenshot(const std::string& name, std::string_view bytes) = 0;
    virtual void append_line(const std::string& name, std::string_view line) = 0;
};

// Runtime services an agent sees during one invocation. Grants are installed
// by invoke() from the manifest and cannot be changed by the agent.
class TaskContext {
public:
    virtual ~TaskContext() = default;

    virtual void acknowledge() = 0;
    virtual void heartbeat(const std::string& note = {}) = 0;
    // Waits up to `ms`, returning early on cancellation.
    virtual void sleep_for(std::int64_t ms) = 0;
    virtual bool cancelled() const = 0;
    virtual TimestampMs now() const = 0;
    // Consumes a user approval for this conversation and digest if one is
    // outstanding.
    virtual bool redeem_approval(const std::string& action_digest) = 0;
    virtual ArtifactSink* artifacts() { return nullptr; }
    virtual provider::Router* provider() { return nullptr; }

    const PrivilegeGrants& grants() const { return grants_; }

private:
    friend class GrantScope;
    PrivilegeGrants grants_;
};

class Agent {
public:
    virtual ~Agent() = default;
    virtual AgentOutcome run(const TaskPayload& payload, TaskContext& ctx) = 0;
    // Agents that send their own acknowledgement return true; otherwise the
    // kit acknowledges on their behalf before run().
    virtual bool acknowledges_itself() const { return false; }
};

class MemoryArtifactSink final : public ArtifactSink {
public:
    std::string write_artifact(const std::string& name, std::string_view bytes) override;
    std::string write_screenshot(const std::string& name, std::string_view bytes) override;
    void append_line(const std::string& name, std::string_view line) override;

    std::map<std::string, std::string> files;  // reference -> bytes
};

}  // namespace autonoma::agents
