#pragma once

#include "autonoma/agents/agent.hpp"
#include "autonoma/common/clock.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace autonoma::builtin {

struct SearchHit {
    std::string source_id;
    std::string title;
    std::string text;
};

// One research backend. Live web clients and the offline fixture corpus are
// interchangeable behind this interface.
class SearchTool {
public:
    virtual ~SearchTool() = default;
    virtual std::string name() const = 0;
    // Throws on backend failure.
    virtual std::vector<SearchHit> search(const std::string& query, std::size_t max_results,
                                          const agents::PrivilegeGrants& grants) = 0;
};

// Directory of JSON documents {id, title, text}. A document matches when it
// contains every query token; hits are ordered by token frequency, then id.
class FixtureSearchTool final : public SearchTool {
public:
    explicit FixtureSearchTool(const std::filesystem::path& dir, std::string name = "fixture");

    std::string name() const override { return name_; }
    std::vector<SearchHit> search(const std::string& query, std::size_t max_results,
                                  const agents::PrivilegeGrants& grants) override;

    std::size_t size() const { return docs_.size(); }

private:
    std::string name_;
    std::vector<SearchHit> docs_;
};

// GET <path>?q=<query> against a JSON search service answering a list of
// {id, title, text}. Subject to the caller's network grants.
class HttpSearchTool final : public SearchTool {
public:
    HttpSearchTool(std::string host, int port, std::string path, std::string name = "http");

    std::string name() const override { return name_; }
    std::vector<SearchHit> search(const std::string& query, std::size_t max_results,
                                  const agents::PrivilegeGrants& grants) override;

private:
    std::string host_;
    int port_;
    std::string path_;
    std::string name_;
};

struct Finding {
    std::string claim;
    std::string source_id;
    TimestampMs retrieved_at = 0;
};

struct Findings {
    std::string query;
    std::vector<Finding> items;
};

Json findings_to_json(const Findings& f);

// Calls each tool at most once, stopping after `budget` calls. Throws
// InvalidQuery for an empty query and AllToolsFailed when no call succeeded.
Findings research(const std::string& query, const std::vector<std::shared_ptr<SearchTool>>& tools,
                  std::size_t budget, const agents::PrivilegeGrants& grants, TimestampMs now,
                  std::size_t max_results_per_tool = 5);

class ResearcherAgent final : public agents::Agent {
public:
    ResearcherAgent(std::vector<std::shared_ptr<SearchTool>> tools, std::size_t budget = 3)
        : tools_(std::move(tools)), budget_(budget) {}

    agents::AgentOutcome run(const agents::TaskPayload& payload, agents::TaskContext& ctx) override;

private:
    std::vector<std::shared_ptr<SearchTool>> tools_;
    std::size_t budget_;
};

agents::AgentManifest researcher_manifest();

}  // namespace autonoma::builtin
