#include "autonoma/builtin/researcher.hpp"

#include "autonoma/agents/invoke.hpp"
#include "autonoma/common/error.hpp"
#include "autonoma/common/utf8.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace autonoma::builtin {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// First sentence of the text mentioning a query token, else the title.
std::string claim_for(const SearchHit& hit, const std::vector<std::string>& tokens) {
    std::size_t start = 0;
    while (start < hit.text.size()) {
        auto end = hit.text.find_first_of(".!?", start);
        if (end == std::string::npos) end = hit.text.size() - 1;
        const auto sentence = trim(std::string_view(hit.text).substr(start, end - start + 1));
        const auto words = utf8::tokenize(sentence);
        for (const auto& t : tokens) {
            if (std::find(words.begin(), words.end(), t) != words.end()) return sentence;
        }
        start = end + 1;
    }
    return hit.title;
}

}  // namespace

FixtureSearchTool::FixtureSearchTool(const fs::path& dir, std::string name) : name_(std::move(name)) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(Errc::not_found, "fixture corpus not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f);
        std::stringstream ss;
        ss << in.rdbuf();
        Json doc = Json::parse(ss.str(), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) throw Error(Errc::corrupt, "fixture document: " + f.string());
        docs_.push_back({doc.value("id", f.stem().string()), doc.value("title", std::string{}),
                         doc.value("text", std::string{})});
    }
}

std::vector<SearchHit> FixtureSearchTool::search(const std::string& query, std::size_t max_results,
                                                 const agents::PrivilegeGrants&) {
    const auto tokens = utf8::tokenize(query);
    if (tokens.empty()) return {};
    std::vector<std::pair<std::size_t, const SearchHit*>> scored;
    for (const auto& d : docs_) {
        const auto words = utf8::tokenize(d.title + " " + d.text);
        std::size_t score = 0;
        bool all = true;
        for (const auto& t : tokens) {
            const auto n = static_cast<std::size_t>(std::count(words.begin(), words.end(), t));
            if (n == 0) {
                all = false;
                break;
            }
            score += n;
        }
        if (all) scored.emplace_back(score, &d);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second->source_id < b.second->source_id;
    });
    std::vector<SearchHit> out;
    for (std::size_t i = 0; i < scored.size() && i < max_results; ++i) out.push_back(*scored[i].second);
    return out;
}

HttpSearchTool::HttpSearchTool(std::string host, int port, std::string path, std::string name)
    : host_(std::move(host)), port_(port), path_(std::move(path)), name_(std::move(name)) {}

std::vector<SearchHit> HttpSearchTool::search(const std::string& query, std::size_t max_results,
                                              const agents::PrivilegeGrants& grants) {
    agents::require_network(grants, host_);
    httplib::Client cli(host_, port_);
    cli.set_read_timeout(std::chrono::milliseconds(grants.max_runtime_ms));
    auto res = cli.Get(path_, httplib::Params{{"q", query}}, httplib::Headers{});
    if (!res || res->status != 200) throw Error(Errc::io_error, name_ + ": search request failed");
    Json doc = Json::parse(res->body, nullptr, false);
    if (!doc.is_array()) throw Error(Errc::io_error, name_ + ": unexpected response");
    std::vector<SearchHit> out;
    for (const auto& d : doc) {
        if (out.size() >= max_results) break;
        if (!d.is_object()) continue;
        out.push_back({d.value("id", std::string{}), d.value("title", std::string{}), d.value("text", std::string{})});
    }
    return out;
}

Json findings_to_json(const Findings& f) {
    Json items = Json::array();
    for (const auto& i : f.items) {
        items.push_back({{"claim", i.claim}, {"source_id", i.source_id}, {"retrieved_at", i.retrieved_at}});
    }
    return Json{{"query", f.query}, {"items", items}};
}

Findings research(const std::string& query, const std::vector<std::shared_ptr<SearchTool>>& tools,
                  std::size_t budget, const agents::PrivilegeGrants& grants, TimestampMs now,
                  std::size_t max_results_per_tool) {
    Findings f;
    f.query = trim(query);
    if (f.query.empty()) throw Error(Errc::invalid_query, "empty research query");
    if (budget == 0) throw Error(Errc::invalid_argument, "research budget must be at least 1");
    const auto tokens = utf8::tokenize(f.query);

    std::size_t calls = 0;
    std::size_t failures = 0;
    std::string last_error;
    std::set<std::string> seen;
    for (const auto& tool : tools) {
        if (calls == budget) break;
        ++calls;
        try {
            for (const auto& hit : tool->search(f.query, max_results_per_tool, grants)) {
                if (hit.source_id.empty() || !seen.insert(hit.source_id).second) continue;
                f.items.push_back({claim_for(hit, tokens), hit.source_id, now});
            }
        } catch (const std::exception& e) {
            ++failures;
            last_error = tool->name() + ": " + e.what();
        }
    }
    if (calls > 0 && failures == calls) throw Error(Errc::all_tools_failed, "every research tool failed; " + last_error);
    return f;
}

agents::AgentOutcome ResearcherAgent::run(const agents::TaskPayload& payload, agents::TaskContext& ctx) {
    const auto query = payload.args.is_object() && payload.args.contains("query")
                           ? payload.args["query"].get<std::string>()
                           : payload.description;
    const auto findings = research(query, tools_, budget_, ctx.grants(), ctx.now());
    ctx.heartbeat("searched");
    agents::AgentOutput out;
    out.summary = "Found " + std::to_string(findings.items.size()) + " sourced item(s) for \"" + findings.query + "\"";
    for (const auto& i : findings.items) out.summary += "\n- " + i.claim + " [" + i.source_id + "]";
    out.data = findings_to_json(findings);
    return out;
}

agents::AgentManifest researcher_manifest() {
    agents::AgentManifest m;
    m.id = "researcher";
    m.display_name = "Researcher";
    m.capabilities = {agents::cap::web_search};
    m.heartbeat_capable = true;
    m.description = "Gathers sourced findings through search tools";
    return m;
}

}  // namespace autonoma::builtin
