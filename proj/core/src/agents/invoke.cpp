#include "autonoma/agents/invoke.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/common/utf8.hpp"

namespace autonoma::agents {

namespace {

AgentFailure failure_from(const Error& e) {
    switch (e.code()) {
        case Errc::privilege_violation: return {"PrivilegeViolation", e.what(), false};
        case Errc::jail_escape: return {"PrivilegeViolation", std::string("JailEscape: ") + e.what(), false};
        case Errc::timeout: return {"Timeout", e.what(), true};
        case Errc::agent_panic: return {"AgentPanic", e.what(), true};
        default: break;
    }
    // Deterministic input errors will not improve on retry.
    const bool retryable = e.code() != Errc::jail_escape && e.code() != Errc::invalid_query &&
                           e.code() != Errc::exec_denied && e.code() != Errc::not_found &&
                           e.code() != Errc::approval_denied && e.code() != Errc::nothing_to_report;
    return {std::string(to_string(e.code())), e.what(), retryable};
}

}  // namespace

AgentOutcome invoke(const RegisteredAgent& agent, const TaskPayload& payload, TaskContext& ctx) {
    GrantScope scope(ctx, agent.manifest.grants);
    const auto start = ctx.now();
    if (!agent.impl->acknowledges_itself()) ctx.acknowledge();
    if (agent.manifest.heartbeat_capable) ctx.heartbeat("started");

    AgentOutcome outcome;
    try {
        outcome = agent.impl->run(payload, ctx);
    } catch (const Error& e) {
        outcome = failure_from(e);
    } catch (const std::exception& e) {
        outcome = AgentFailure{"AgentPanic", e.what(), true};
    } catch (...) {
        outcome = AgentFailure{"AgentPanic", "unknown exception", true};
    }

    const auto elapsed = ctx.now() - start;
    if (ctx.cancelled()) return AgentFailure{"Cancelled", "invocation cancelled", false};
    if (elapsed > agent.manifest.grants.max_runtime_ms) {
        return AgentFailure{"Timeout",
                            "ran " + std::to_string(elapsed) + " ms, limit " +
                                std::to_string(agent.manifest.grants.max_runtime_ms) + " ms",
                            true};
    }
    if (auto* out = std::get_if<AgentOutput>(&outcome)) {
        out->summary = utf8::truncate(out->summary, agent.manifest.grants.max_output_bytes);
    }
    return outcome;
}

void require_network(const PrivilegeGrants& grants, const std::string& host) {
    if (!grants.allow_network) throw Error(Errc::privilege_violation, "network access not granted");
    if (!host_allowed(host, grants.network_allowlist)) {
        throw Error(Errc::privilege_violation, "host not in network allowlist: " + host);
    }
}

std::string MemoryArtifactSink::write_artifact(const std::string& name, std::string_view bytes) {
    const auto ref = "artifacts/" + name;
    files[ref] = std::string(bytes);
    return ref;
}

std::string MemoryArtifactSink::write_screenshot(const std::string& name, std::string_view bytes) {
    const auto ref = "screenshots/" + name;
    files[ref] = std::string(bytes);
    return ref;
}

void MemoryArtifactSink::append_line(const std::string& name, std::string_view line) {
    auto& f = files["artifacts/" + name];
    f.append(line);
    f.push_back('\n');
}

}  // namespace autonoma::agents
