#include "autonoma/agents/manifest.hpp"

#include "autonoma/common/error.hpp"

#include <regex>

namespace autonoma::agents {

void to_json(Json& j, const PrivilegeGrants& g) {
    j = Json{{"fs_jail_root", g.fs_jail_root ? Json(g.fs_jail_root->string()) : Json(nullptr)},
             {"allow_exec", g.allow_exec},
             {"allow_network", g.allow_network},
             {"network_allowlist", g.network_allowlist},
             {"max_runtime", g.max_runtime_ms},
             {"max_output", g.max_output_bytes}};
}

void from_json(const Json& j, PrivilegeGrants& g) {
    g = PrivilegeGrants{};
    if (!j.is_object()) throw Error(Errc::corrupt, "grants must be an object");
    if (j.contains("fs_jail_root") && !j["fs_jail_root"].is_null()) {
        g.fs_jail_root = std::filesystem::path(j["fs_jail_root"].get<std::string>());
    }
    g.allow_exec = j.value("allow_exec", false);
    g.allow_network = j.value("allow_network", false);
    g.network_allowlist = j.value("network_allowlist", std::vector<std::string>{});
    g.max_runtime_ms = j.value("max_runtime", g.max_runtime_ms);
    g.max_output_bytes = j.value("max_output", g.max_output_bytes);
}

void to_json(Json& j, const AgentManifest& m) {
    j = Json{{"id", m.id},
             {"display_name", m.display_name},
             {"capabilities", m.capabilities},
             {"grants", m.grants},
             {"heartbeat_capable", m.heartbeat_capable},
             {"description", m.description}};
}

void from_json(const Json& j, AgentManifest& m) {
    try {
        m.id = j.at("id").get<std::string>();
        m.display_name = j.value("display_name", m.id);
        m.capabilities = j.at("capabilities").get<std::set<std::string>>();
        m.grants = j.contains("grants") ? j["grants"].get<PrivilegeGrants>() : PrivilegeGrants{};
        m.heartbeat_capable = j.value("heartbeat_capable", false);
        m.description = j.value("description", std::string{});
    } catch (const Json::exception& e) {
        throw Error(Errc::corrupt, std::string("manifest: ") + e.what());
    }
}

const std::vector<LintRule>& lint_rules() {
    static const std::vector<LintRule> rules{
        {"id-format", "id is a non-empty token of [a-z0-9_-]"},
        {"capabilities-nonempty", "at least one capability is declared"},
        {"file-ops-needs-jail", "file_ops requires fs_jail_root"},
        {"exec-needs-capability", "allow_exec requires the code_exec capability"},
        {"code-exec-needs-grants", "code_exec requires allow_exec and fs_jail_root"},
        {"jail-needs-capability", "fs_jail_root is only granted with file_ops or code_exec"},
        {"network-needs-capability", "allow_network requires web_search or browse"},
        {"network-needs-allowlist", "allow_network requires a non-empty network_allowlist"},
        {"allowlist-needs-network", "network_allowlist is empty unless allow_network"},
        {"limits-positive", "max_runtime and max_output are positive"},
    };
    return rules;
}

std::vector<std::string> lint_manifest(const AgentManifest& m) {
    static const std::regex id_re("[a-z0-9_-]+");
    const auto has = [&](const char* c) { return m.capabilities.count(c) != 0; };
    const auto& g = m.grants;
    std::vector<std::string> out;
    if (!std::regex_match(m.id, id_re)) out.push_back("id-format");
    if (m.capabilities.empty()) out.push_back("capabilities-nonempty");
    if (has(cap::file_ops) && !g.fs_jail_root) out.push_back("file-ops-needs-jail");
    if (g.allow_exec && !has(cap::code_exec)) out.push_back("exec-needs-capability");
    if (has(cap::code_exec) && (!g.allow_exec || !g.fs_jail_root)) out.push_back("code-exec-needs-grants");
    if (g.fs_jail_root && !has(cap::file_ops) && !has(cap::code_exec)) out.push_back("jail-needs-capability");
    if (g.allow_network && !has(cap::web_search) && !has(cap::browse)) out.push_back("network-needs-capability");
    if (g.allow_network && g.network_allowlist.empty()) out.push_back("network-needs-allowlist");
    if (!g.allow_network && !g.network_allowlist.empty()) out.push_back("allowlist-needs-network");
    if (g.max_runtime_ms <= 0 || g.max_output_bytes == 0) out.push_back("limits-positive");
    return out;
}

bool host_allowed(const std::string& host, const std::vector<std::string>& allowlist) {
    for (const auto& pat : allowlist) {
        if (pat == host) return true;
        if (pat.size() > 2 && pat.compare(0, 2, "*.") == 0) {
            const auto suffix = pat.substr(1);  // ".example.org"
            if (host.size() > suffix.size() && host.compare(host.size() - suffix.size(), suffix.size(), suffix) == 0) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace autonoma::agents
