#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace autonoma {

// Every failure the runtime reports by exception carries one of these codes.
// Names follow the contract vocabulary so tests can match on them directly.
enum class Errc {
    // workflow-model
    cyclic_dependency,
    unknown_capability,
    empty_plan,
    duplicate_step_id,
    unknown_dependency,
    illegal_transition,
    gap_in_sequence,
    // coordinator / provider
    provider_unavailable,
    ack_timeout,
    script_exhausted,
    fingerprint_mismatch,
    // planner
    schema_violation,
    plan_parse_error,
    // supervisor
    no_capable_agent,
    // agent-kit
    duplicate_agent_id,
    grant_lint_failure,
    unknown_agent,
    timeout,
    agent_panic,
    privilege_violation,
    // builtin agents
    all_tools_failed,
    invalid_query,
    exec_denied,
    jail_escape,
    not_found,
    approval_denied,
    nothing_to_report,
    // store
    storage_full,
    corrupt_existing,
    corrupt,
    chain_head_mismatch,
    invalid_argument,
    io_error,
    // gateway
    filtered,
    unauthenticated,
    busy,
    too_large,
    no_pending_approval,
    digest_mismatch,
    config_error,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Error(Errc code, const std::string& message, std::string path)
        : std::runtime_error(message), code_(code), path_(std::move(path)) {}

    Error(Errc code, const std::string& message, std::size_t offset)
        : std::runtime_error(message), code_(code), offset_(offset), has_offset_(true) {}

    Errc code() const noexcept { return code_; }

    // JSON-pointer-like location for schema violations ("/steps/2/depends_on").
    const std::string& path() const noexcept { return path_; }

    // Byte offset for Corrupt errors.
    std::size_t offset() const noexcept { return offset_; }
    bool has_offset() const noexcept { return has_offset_; }

private:
    Errc code_;
    std::string path_;
    std::size_t offset_ = 0;
    bool has_offset_ = false;
};

}  // namespace autonoma
