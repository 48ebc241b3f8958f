#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/model/task_result.hpp"
#include "autonoma/model/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace autonoma::builtin {

struct FailureEntry {
    std::string step_id;
    std::string cause;
    std::string recommendation;

    bool operator==(const FailureEntry&) const = default;
};

struct Report {
    std::string executive_summary;
    std::vector<std::string> key_findings;
    std::string detailed_analysis;
    std::string conclusions_and_recommendations;
    std::vector<std::string> sources;
    std::vector<FailureEntry> failure_log;
    model::Lang lang = model::Lang::en;

    bool operator==(const Report&) const = default;
};

Json report_to_json(const Report& r);
Report report_from_json(const Json& j);
std::string render_markdown(const Report& r);

// Advice for a failure cause, in the target language.
std::string recommendation_for(const std::string& cause, model::Lang lang);

// Deterministic template assembly. Throws NothingToReport on empty results.
Report compile_report(const model::Plan& plan, const std::vector<model::TaskResult>& results, model::Lang lang);

// payload.context: {"plan": Plan, "results": [TaskResult]}. Writes report.md
// and failures.log (one JSON record per line) through the artifact sink.
class ReporterAgent final : public agents::Agent {
public:
    agents::AgentOutcome run(const agents::TaskPayload& payload, agents::TaskContext& ctx) override;
};

agents::AgentManifest reporter_manifest();

}  // namespace autonoma::builtin
