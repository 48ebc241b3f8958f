#pragma once

#include "autonoma/agents/manifest.hpp"
#include "autonoma/builtin/researcher.hpp"
#include "autonoma/common/clock.hpp"
#include "autonoma/model/plan.hpp"
#include "autonoma/model/types.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::provider {
class Router;
}

namespace autonoma::planner {

struct Snippet {
    std::string source_id;
    std::string text;

    bool operator==(const Snippet&) const = default;
};

struct ContextNotes {
    std::vector<Snippet> snippets;
    TimestampMs gathered_at = 0;

    bool operator==(const ContextNotes&) const = default;
};

Json notes_to_json(const ContextNotes& notes);

struct PlanRequest {
    std::string request_text;
    std::vector<model::Message> context;  // trimmed history, oldest first
    std::optional<ContextNotes> pregathered;
    std::set<std::string> capability_vocabulary;
};

// Strict parse of the plan document
//   {"thought": str, "steps": [{"id", "description", "required_capability",
//    "agent_hint"?, "depends_on": [ids]}]}
// Unknown fields are rejected and every dependency must name an earlier
// step. Throws SchemaViolation with a JSON-pointer path.
model::Plan parse_plan(std::string_view raw, const std::set<std::string>& vocabulary);

// Default repair prompt; {raw}, {error_path} and {error} are substituted.
std::string_view default_repair_template();
std::string load_repair_template(const std::filesystem::path& file);
std::string render_repair_prompt(std::string_view tmpl, std::string_view raw, std::string_view error_path,
                                 std::string_view error);

struct PlannerOptions {
    std::string repair_template{default_repair_template()};
    std::uint32_t max_output_tokens = 2048;
};

// Asks the planner backend for a plan, with at most one repair round.
// Throws PlanParseError when the repaired answer is still invalid and
// ProviderUnavailable when the backend is down.
model::ValidatedPlan make_plan(const PlanRequest& req, const provider::Router& provider,
                               const PlannerOptions& options = {});

// The exact chat messages make_plan sends first; exposed so scripts can be
// authored against their fingerprint.
std::vector<std::pair<std::string, std::string>> plan_prompt(const PlanRequest& req);

// At most `budget` tool calls; failing tools are skipped. Never throws for
// tool failures.
ContextNotes pregather(const std::string& request_text,
                       const std::vector<std::shared_ptr<builtin::SearchTool>>& tools, std::size_t budget,
                       const agents::PrivilegeGrants& grants, TimestampMs now, std::size_t max_results = 3);

}  // namespace autonoma::planner
