#include "autonoma/planner/planner.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/common/utf8.hpp"
#include "autonoma/provider/provider.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace autonoma::planner {

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& what) {
    throw Error(Errc::schema_violation, (path.empty() ? std::string("/") : path) + ": " + what, path);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

// Accepts a single surrounding markdown code fence, which chat models add
// out of habit.
std::string strip_fence(const std::string& raw) {
    auto t = trim(raw);
    if (t.rfind("```", 0) != 0) return t;
    const auto first_nl = t.find('\n');
    if (first_nl == std::string::npos || t.size() < 6 || t.compare(t.size() - 3, 3, "```") != 0) return t;
    return trim(std::string_view(t).substr(first_nl + 1, t.size() - 3 - first_nl - 1));
}

bool valid_step_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) violation(path + "/" + key, "required field missing");
    return *it;
}

std::string require_text(const Json& obj, const char* key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) violation(path + "/" + key, "must be a string");
    auto s = v.get<std::string>();
    if (trim(s).empty()) violation(path + "/" + key, "must not be empty");
    return s;
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& path) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            violation(path + "/" + key, "unknown field");
        }
    }
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> s{
        "a",       "an",      "the",     "to",       "of",       "for",     "and",     "or",      "in",
        "on",      "at",      "me",      "my",       "i",        "you",     "your",    "we",      "us",
        "can",     "could",   "would",   "will",     "please",   "it",      "this",    "that",    "these",
        "those",   "them",    "with",    "about",    "from",     "is",      "are",     "be",      "some",
        "research", "find",   "search",  "look",     "summarize", "summarise", "write", "create",  "make",
        "report",  "analyze", "analyse", "compare",  "chart",    "plot",    "show",    "list",    "get",
        "compute", "calculate", "then",  "also",     "up",       "into",    "all",     "latest",  "current"};
    return s;
}

std::string role_label(model::Role r) { return std::string(model::to_string(r)); }

constexpr std::string_view kRepairTemplate =
    "Your previous answer was not a valid plan.\n"
    "Problem at {error_path}: {error}\n"
    "Previous answer:\n{raw}\n"
    "Reply with the corrected plan as a single JSON object and nothing else.";

}  // namespace

Json notes_to_json(const ContextNotes& notes) {
    Json snippets = Json::array();
    for (const auto& s : notes.snippets) snippets.push_back({{"source_id", s.source_id}, {"text", s.text}});
    return Json{{"snippets", snippets}, {"gathered_at", notes.gathered_at}};
}

model::Plan parse_plan(std::string_view raw, const std::set<std::string>& vocabulary) {
    const auto doc = Json::parse(strip_fence(std::string(raw)), nullptr, false);
    if (doc.is_discarded()) violation("", "not a JSON document");
    if (!doc.is_object()) violation("", "plan must be a JSON object");
    reject_unknown(doc, {"thought", "steps"}, "");

    model::Plan plan;
    plan.thought = require_text(doc, "thought", "");
    const auto& steps = require(doc, "steps", "");
    if (!steps.is_array()) violation("/steps", "must be an array");
    if (steps.empty()) violation("/steps", "plan has no steps");

    std::map<std::string, std::size_t> declared;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto path = "/steps/" + std::to_string(i);
        const auto& s = steps[i];
        if (!s.is_object()) violation(path, "step must be an object");
        reject_unknown(s, {"id", "description", "required_capability", "agent_hint", "depends_on"}, path);

        model::PlanStep step;
        step.id = require_text(s, "id", path);
        if (!valid_step_id(step.id)) violation(path + "/id", "ids use letters, digits, '_' or '-' (max 64)");
        if (declared.count(step.id)) violation(path + "/id", "duplicate step id '" + step.id + "'");
        step.description = require_text(s, "description", path);
        step.required_capability = require_text(s, "required_capability", path);
        if (!vocabulary.count(step.required_capability)) {
            violation(path + "/required_capability", "unknown capability '" + step.required_capability + "'");
        }
        if (auto it = s.find("agent_hint"); it != s.end() && !it->is_null()) {
            if (!it->is_string() || it->get<std::string>().empty()) {
                violation(path + "/agent_hint", "must be a non-empty string or null");
            }
            step.agent_hint = it->get<std::string>();
        }
        const auto& deps = require(s, "depends_on", path);
        if (!deps.is_array()) violation(path + "/depends_on", "must be an array");
        for (std::size_t k = 0; k < deps.size(); ++k) {
            if (!deps[k].is_string()) violation(path + "/depends_on/" + std::to_string(k), "must be a string");
            const auto d = deps[k].get<std::string>();
            if (!declared.count(d)) {
                violation(path + "/depends_on", "'" + d + "' is not an earlier step");
            }
            if (std::find(step.depends_on.begin(), step.depends_on.end(), d) != step.depends_on.end()) {
                violation(path + "/depends_on", "'" + d + "' listed twice");
            }
            step.depends_on.push_back(d);
        }
        declared.emplace(step.id, i);
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

std::string_view default_repair_template() { return kRepairTemplate; }

std::string load_repair_template(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::config_error, "cannot read repair template " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    auto t = ss.str();
    if (t.find("{raw}") == std::string::npos || t.find("{error_path}") == std::string::npos) {
        throw Error(Errc::config_error, "repair template must contain {raw} and {error_path}");
    }
    return t;
}

std::string render_repair_prompt(std::string_view tmpl, std::string_view raw, std::string_view error_path,
                                  std::string_view error) {
    // Single pass so substituted text is never re-scanned for placeholders.
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            if (tmpl.substr(i, 5) == "{raw}") {
                out += raw;
                i += 5;
                continue;
            }
            if (tmpl.substr(i, 12) == "{error_path}") {
                out += error_path.empty() ? std::string_view("/") : error_path;
                i += 12;
                continue;
            }
            if (tmpl.substr(i, 7) == "{error}") {
                out += error;
                i += 7;
                continue;
            }
        }
        out.push_back(tmpl[i++]);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> plan_prompt(const PlanRequest& req) {
    std::string vocab;
    for (const auto& c : req.capability_vocabulary) vocab += (vocab.empty() ? "" : ", ") + c;
    std::string system =
        "You are the planner of a task automation system. Restate the user's request as a thought, then "
        "decompose it into steps. Reply with one JSON object and nothing else:\n"
        "{\"thought\": string, \"steps\": [{\"id\": string, \"description\": string, "
        "\"required_capability\": string, \"agent_hint\": string (optional), \"depends_on\": [earlier step "
        "ids]}]}\n"
        "Allowed capabilities: " +
        vocab + ".";

    std::string user = "Request: " + req.request_text;
    if (!req.context.empty()) {
        user += "\n\nConversation so far:";
        for (const auto& m : req.context) user += "\n" + role_label(m.role) + ": " + m.content;
    }
    if (req.pregathered && !req.pregathered->snippets.empty()) {
        user += "\n\nBackground notes:";
        for (const auto& s : req.pregathered->snippets) user += "\n- [" + s.source_id + "] " + s.text;
    }
    return {{"system", std::move(system)}, {"user", std::move(user)}};
}

model::ValidatedPlan make_plan(const PlanRequest& req, const provider::Router& provider,
                               const PlannerOptions& options) {
    if (req.capability_vocabulary.empty()) {
        throw Error(Errc::invalid_argument, "planner needs a non-empty capability vocabulary");
    }
    provider::CompletionRequest creq;
    creq.role_context = provider::RoleContext::planner;
    creq.params.max_output_tokens = options.max_output_tokens;
    for (auto& [role, content] : plan_prompt(req)) creq.messages.push_back({role, content});

    const auto backend = provider.backend(provider::RoleContext::planner);
    const auto identity = backend ? backend->identity() : std::string("unknown");

    auto raw = provider.complete(creq).text;
    model::Plan plan;
    try {
        plan = parse_plan(raw, req.capability_vocabulary);
    } catch (const Error& first) {
        if (first.code() != Errc::schema_violation) throw;
        creq.messages.push_back({"assistant", raw});
        creq.messages.push_back(
            {"user", render_repair_prompt(options.repair_template, raw, first.path(), first.what())});
        raw = provider.complete(creq).text;
        try {
            plan = parse_plan(raw, req.capability_vocabulary);
        } catch (const Error& second) {
            if (second.code() != Errc::schema_violation) throw;
            throw Error(Errc::plan_parse_error, std::string("plan still invalid after repair: ") + second.what(),
                        second.path());
        }
    }
    plan.created_by = identity;
    return model::validate_plan(plan, req.capability_vocabulary);
}

ContextNotes pregather(const std::string& request_text,
                       const std::vector<std::shared_ptr<builtin::SearchTool>>& tools, std::size_t budget,
                       const agents::PrivilegeGrants& grants, TimestampMs now, std::size_t max_results) {
    ContextNotes notes;
    notes.gathered_at = now;
    if (budget == 0 || tools.empty()) return notes;
    std::string query;
    for (const auto& t : utf8::tokenize(request_text)) {
        if (!stopwords().count(t)) query += (query.empty() ? "" : " ") + t;
    }
    if (query.empty()) return notes;
    try {
        const auto found = builtin::research(query, tools, budget, grants, now, max_results);
        for (const auto& f : found.items) notes.snippets.push_back({f.source_id, f.claim});
    } catch (const Error&) {
        // Every tool failed; planning proceeds without notes.
    }
    return notes;
}

}  // namespace autonoma::planner
