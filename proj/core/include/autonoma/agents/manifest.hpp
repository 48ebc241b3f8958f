#pragma once

#include "autonoma/common/json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace autonoma::agents {

// Capability tags understood by the grant linter.
namespace cap {
inline constexpr const char* web_search = "web_search";
inline constexpr const char* code_exec = "code_exec";
inline constexpr const char* file_ops = "file_ops";
inline constexpr const char* report = "report";
inline constexpr const char* browse = "browse";
inline constexpr const char* computer_control = "computer_control";
}  // namespace cap

struct PrivilegeGrants {
    std::optional<std::filesystem::path> fs_jail_root;
    bool allow_exec = false;
    bool allow_network = false;
    std::vector<std::string> network_allowlist;  // host patterns, "*.example.org" allowed
    std::int64_t max_runtime_ms = 30000;
    std::size_t max_output_bytes = 64 * 1024;

    bool operator==(const PrivilegeGrants&) const = default;
};

struct AgentManifest {
    std::string id;
    std::string display_name;
    std::set<std::string> capabilities;
    PrivilegeGrants grants;
    bool heartbeat_capable = false;
    std::string description;

    bool operator==(const AgentManifest&) const = default;
};

void to_json(Json& j, const PrivilegeGrants& g);
void from_json(const Json& j, PrivilegeGrants& g);
void to_json(Json& j, const AgentManifest& m);
void from_json(const Json& j, AgentManifest& m);

struct LintRule {
    std::string id;
    std::string text;
};

// The fixed rule table.
const std::vector<LintRule>& lint_rules();

// Ids of every violated rule, in table order. Empty means the manifest is
// acceptable.
std::vector<std::string> lint_manifest(const AgentManifest& m);

// True when `host` matches one of the allowlist patterns.
bool host_allowed(const std::string& host, const std::vector<std::string>& allowlist);

}  // namespace autonoma::agents
