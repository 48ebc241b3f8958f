#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/agents/registry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace autonoma::agents {

// Out-of-process plugin. One child per invocation; messages are JSON lines
// {"type": "task"|"heartbeat"|"result"|"error", "payload": {...}}. The child
// receives one task line on stdin and answers with heartbeats followed by a
// single result or error line on stdout.
class ProcessAgent final : public Agent {
public:
    explicit ProcessAgent(std::vector<std::string> argv) : argv_(std::move(argv)) {}

    AgentOutcome run(const TaskPayload& payload, TaskContext& ctx) override;

private:
    std::vector<std::string> argv_;
};

// Manifest path for a plugin executable: "<dir>/<stem>.manifest.json".
std::filesystem::path manifest_path_for(const std::filesystem::path& executable);

// Reads the manifest next to the executable and builds the adapter. Throws
// NotFound or Corrupt.
RegisteredAgent load_process_plugin(const std::filesystem::path& executable);

}  // namespace autonoma::agents
