#pragma once

#include "autonoma/agents/agent.hpp"

#include <filesystem>
#include <string>

namespace autonoma::builtin {

enum class ScriptLang { python, shell };

ScriptLang script_lang_from_string(const std::string& s);

struct ExecResult {
    std::string stdout_text;
    std::string stderr_text;
    int exit_code = 0;
    std::int64_t duration_ms = 0;
    bool truncated = false;
};

struct Interpreters {
    std::string python = "python3";
    std::string shell = "/bin/sh";
};

// Runs `source` with the configured interpreter in <jail>/work. Network is
// cut off for the child unless granted. Throws ExecDenied without allow_exec
// or a jail, and Timeout past max_runtime.
ExecResult run_script(const std::string& source, ScriptLang lang, const agents::PrivilegeGrants& grants,
                      const Interpreters& interpreters = {});

// args: {"source": "...", "language": "python"|"shell"}
class CoderAgent final : public agents::Agent {
public:
    explicit CoderAgent(Interpreters interpreters = {}) : interpreters_(std::move(interpreters)) {}
    agents::AgentOutcome run(const agents::TaskPayload& payload, agents::TaskContext& ctx) override;

private:
    Interpreters interpreters_;
};

agents::AgentManifest coder_manifest(const std::filesystem::path& jail_root);

}  // namespace autonoma::builtin
