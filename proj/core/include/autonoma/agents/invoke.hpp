#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/agents/registry.hpp"

namespace autonoma::agents {

// Installs the manifest grants on the context for the duration of a call.
class GrantScope {
public:
    GrantScope(TaskContext& ctx, const PrivilegeGrants& grants) : ctx_(ctx), saved_(ctx.grants_) {
        ctx_.grants_ = grants;
    }
    ~GrantScope() { ctx_.grants_ = saved_; }
    GrantScope(const GrantScope&) = delete;
    GrantScope& operator=(const GrantScope&) = delete;

private:
    TaskContext& ctx_;
    PrivilegeGrants saved_;
};

// Runs one attempt. Never throws for agent misbehaviour: exceptions become
// AgentFailure (PrivilegeViolation, Timeout, AgentPanic, or the error code
// name), overruns of max_runtime become Timeout and summaries are cut to
// max_output bytes.
AgentOutcome invoke(const RegisteredAgent& agent, const TaskPayload& payload, TaskContext& ctx);

// Throws PrivilegeViolation unless the grants allow a connection to `host`.
void require_network(const PrivilegeGrants& grants, const std::string& host);

}  // namespace autonoma::agents
