#pragma once

#include "autonoma/common/json.hpp"
#include "autonoma/net/ip_filter.hpp"
#include "autonoma/provider/provider.hpp"
#include "autonoma/supervisor/supervisor.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::gateway {

struct ProviderConfig {
    std::string kind = "scripted";  // scripted | http
    std::filesystem::path script;
    std::string mode = "strict";  // scripted: strict | lenient
    provider::HttpBackendConfig http;
    std::string api_key_env;  // http: variable holding the key

    bool operator==(const ProviderConfig&) const = default;
};

struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    std::uint16_t port = 8420;
    std::vector<net::Cidr> allowlist = net::default_allowlist();
    bool allow_non_lan_bind = false;
    std::int64_t pairing_ttl_ms = 300000;
    std::size_t max_body_bytes = 1 << 20;
    std::filesystem::path storage_root = "autonoma-data";
    std::filesystem::path audit_log;  // empty: <storage_root>/audit.log
    std::filesystem::path workspace_root;  // empty: <storage_root>/workspace
    std::filesystem::path rules_dir = "config";
    std::filesystem::path search_fixtures;  // empty: researcher has no tools
    std::filesystem::path plugin_dir;       // empty: no process plugins
    supervisor::ExecutionPolicy policy;
    std::map<provider::RoleContext, ProviderConfig> providers;

    bool operator==(const ServiceConfig&) const = default;
};

// One parsed `key = value` line. Keys are dotted with their table header.
struct ConfigEntry {
    Json value;
    int line = 0;
};
using ConfigDoc = std::map<std::string, ConfigEntry>;

// The supported subset: `# comments`, `[table]` and `[table.sub]` headers,
// `key = value` where value is a "basic string", a 'literal string', an
// integer, a float, true/false, or a one-line [array] of those. Throws
// ConfigError with the line number.
ConfigDoc parse_config_text(std::string_view text);

// Applies the document, then AUTONOMA_* overrides from `env`, onto the
// defaults. The variable for key `policy.retry_limit` is
// AUTONOMA_POLICY_RETRY_LIMIT; list values in variables are comma separated.
// Unknown keys are errors.
ServiceConfig build_service_config(const ConfigDoc& doc, const std::map<std::string, std::string>& env = {});
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                  const std::map<std::string, std::string>& env);

// AUTONOMA_* variables of this process.
std::map<std::string, std::string> autonoma_environment();

// Allowlist non-empty and, unless allow_non_lan_bind, the bind address is
// inside it (wildcard addresses never are). Throws ConfigError.
void validate_service_config(const ServiceConfig& c);

std::filesystem::path audit_path(const ServiceConfig& c);
std::filesystem::path workspace_path(const ServiceConfig& c);

// Builds the per-role backends the configuration names.
void configure_router(const ServiceConfig& c, provider::Router& router);

Json config_to_json(const ServiceConfig& c);

}  // namespace autonoma::gateway
