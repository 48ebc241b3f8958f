#pragma once

#include "autonoma/agents/agent.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::builtin {

// 1x1 transparent PNG used wherever a real capture would go.
std::string_view placeholder_png();

// Splits on "and", "then" and commas, trimming whitespace.
std::vector<std::string> split_actions(std::string_view request);

struct StubResult {
    std::vector<std::string> actions;
    std::string acknowledgment;
    std::optional<std::string> screenshot;  // artifact reference
};

// Recording adapter standing in for browser or desktop automation. Real
// backends attach behind the same agent interface.
class RecordingStubAgent final : public agents::Agent {
public:
    enum class Kind { browser, computer };
    explicit RecordingStubAgent(Kind kind) : kind_(kind) {}

    agents::AgentOutcome run(const agents::TaskPayload& payload, agents::TaskContext& ctx) override;

    StubResult perform(std::string_view request, agents::ArtifactSink* sink) const;

private:
    Kind kind_;
};

agents::AgentManifest browser_manifest();
agents::AgentManifest computer_manifest();

}  // namespace autonoma::builtin
