#include "autonoma/gateway/config.hpp"

#include "autonoma/common/error.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

extern char** environ;

namespace autonoma::gateway {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw Error(Errc::config_error, "line " + std::to_string(line) + ": " + msg);
}

class ValueParser {
public:
    ValueParser(std::string_view text, int line) : s_(text), line_(line) {}

    Json parse_all() {
        Json v = value();
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != '#') fail(line_, "unexpected text after value");
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    Json value() {
        skip_ws();
        if (pos_ >= s_.size()) fail(line_, "missing value");
        const char c = s_[pos_];
        if (c == '"') return basic_string();
        if (c == '\'') return literal_string();
        if (c == '[') return array();
        if (s_.substr(pos_, 4) == "true") return pos_ += 4, Json(true);
        if (s_.substr(pos_, 5) == "false") return pos_ += 5, Json(false);
        return number();
    }

    Json basic_string() {
        std::string out;
        for (++pos_; pos_ < s_.size(); ++pos_) {
            const char c = s_[pos_];
            if (c == '"') {
                ++pos_;
                return out;
            }
            if (c != '\\') {
                out += c;
                continue;
            }
            if (++pos_ >= s_.size()) break;
            switch (s_[pos_]) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(line_, "unsupported escape \\" + std::string(1, s_[pos_]));
            }
        }
        fail(line_, "unterminated string");
    }

    Json literal_string() {
        const auto end = s_.find('\'', pos_ + 1);
        if (end == std::string_view::npos) fail(line_, "unterminated string");
        std::string out(s_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        return out;
    }

    Json array() {
        Json out = Json::array();
        ++pos_;
        for (;;) {
            skip_ws();
            if (pos_ >= s_.size()) fail(line_, "unterminated array");
            if (s_[pos_] == ']') {
                ++pos_;
                return out;
            }
            out.push_back(value());
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
            } else if (pos_ >= s_.size() || s_[pos_] != ']') {
                fail(line_, "expected , or ] in array");
            }
        }
    }

    Json number() {
        const auto start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '+' ||
                                    s_[pos_] == '-' || s_[pos_] == '.')) {
            ++pos_;
        }
        const auto tok = s_.substr(start, pos_ - start);
        if (tok.empty()) fail(line_, "invalid value");
        const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
        const char* e = tok.data() + tok.size();
        std::int64_t i = 0;
        if (auto [p, ec] = std::from_chars(b, e, i); ec == std::errc{} && p == e) return i;
        double d = 0;
        if (auto [p, ec] = std::from_chars(b, e, d); ec == std::errc{} && p == e) return d;
        fail(line_, "invalid value '" + std::string(tok) + "'");
    }

    std::string_view s_;
    int line_;
    std::size_t pos_ = 0;
};

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    for (const char c : k) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
    }
    return k.front() != '.' && k.back() != '.' && k.find("..") == std::string_view::npos;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string env_name(const std::string& key) {
    std::string out = "AUTONOMA_";
    for (const char c : key) {
        out += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return out;
}

const char* kRoles[] = {"coordinator", "planner", "agent", "reporter"};

std::string as_string(const ConfigEntry& e, const std::string& key) {
    if (!e.value.is_string()) fail(e.line, key + " must be a string");
    return e.value.get<std::string>();
}

std::int64_t as_int(const ConfigEntry& e, const std::string& key, std::int64_t lo, std::int64_t hi) {
    if (!e.value.is_number_integer()) fail(e.line, key + " must be an integer");
    const auto v = e.value.get<std::int64_t>();
    if (v < lo || v > hi) fail(e.line, key + " out of range");
    return v;
}

bool as_bool(const ConfigEntry& e, const std::string& key) {
    if (!e.value.is_boolean()) fail(e.line, key + " must be true or false");
    return e.value.get<bool>();
}

using Setter = std::function<void(ServiceConfig&, const ConfigEntry&, const std::string&)>;

std::map<std::string, Setter> setters() {
    std::map<std::string, Setter> s;
    s["bind"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.bind_address = as_string(e, k);
        if (!net::parse_address(c.bind_address)) fail(e.line, "bind is not an IP address");
    };
    s["port"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.port = static_cast<std::uint16_t>(as_int(e, k, 0, 65535));
    };
    s["allow_cidr"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        if (!e.value.is_array()) fail(e.line, k + " must be an array of strings");
        c.allowlist.clear();
        for (const auto& v : e.value) {
            if (!v.is_string()) fail(e.line, k + " must be an array of strings");
            try {
                c.allowlist.push_back(net::parse_cidr(v.get<std::string>()));
            } catch (const Error& err) {
                fail(e.line, err.what());
            }
        }
    };
    s["allow_non_lan_bind"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.allow_non_lan_bind = as_bool(e, k);
    };
    s["pairing_ttl_ms"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.pairing_ttl_ms = as_int(e, k, 1, INT64_MAX);
    };
    s["max_body_bytes"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.max_body_bytes = static_cast<std::size_t>(as_int(e, k, 1, INT32_MAX));
    };
    s["storage_root"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.storage_root = as_string(e, k);
    };
    s["audit_log"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) { c.audit_log = as_string(e, k); };
    s["workspace_root"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.workspace_root = as_string(e, k);
    };
    s["rules_dir"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) { c.rules_dir = as_string(e, k); };
    s["search_fixtures"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.search_fixtures = as_string(e, k);
    };
    s["plugin_dir"] = [](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
        c.plugin_dir = as_string(e, k);
    };
    const auto policy_fields = supervisor::policy_to_json({});
    for (const auto& [field, value] : policy_fields.items()) {
        s["policy." + field] = [field](ServiceConfig& c, const ConfigEntry& e, const std::string&) {
            try {
                c.policy = supervisor::policy_from_json(Json{{field, e.value}}, c.policy);
            } catch (const Error& err) {
                fail(e.line, err.what());
            }
        };
    }
    for (const char* role_name : kRoles) {
        const auto role = provider::role_context_from_string(role_name);
        const std::string p = std::string("provider.") + role_name + ".";
        s[p + "kind"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            const auto v = as_string(e, k);
            if (v != "scripted" && v != "http") fail(e.line, k + " must be scripted or http");
            c.providers[role].kind = v;
        };
        s[p + "script"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].script = as_string(e, k);
        };
        s[p + "mode"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            const auto v = as_string(e, k);
            if (v != "strict" && v != "lenient") fail(e.line, k + " must be strict or lenient");
            c.providers[role].mode = v;
        };
        s[p + "host"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].http.host = as_string(e, k);
        };
        s[p + "port"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].http.port = static_cast<int>(as_int(e, k, 1, 65535));
        };
        s[p + "path"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].http.path = as_string(e, k);
        };
        s[p + "model"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].http.model = as_string(e, k);
        };
        s[p + "timeout_ms"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].http.timeout_ms = static_cast<int>(as_int(e, k, 1, INT32_MAX));
        };
        s[p + "api_key_env"] = [role](ServiceConfig& c, const ConfigEntry& e, const std::string& k) {
            c.providers[role].api_key_env = as_string(e, k);
        };
    }
    return s;
}

ConfigEntry env_entry(const std::string& key, const std::string& raw) {
    ConfigEntry e{Json(), 0};
    if (key == "allow_cidr" && !trim(raw).starts_with("[")) {
        e.value = Json::array();
        std::stringstream ss(raw);
        for (std::string part; std::getline(ss, part, ',');) {
            if (!trim(part).empty()) e.value.push_back(std::string(trim(part)));
        }
        return e;
    }
    try {
        e.value = ValueParser(raw, 0).parse_all();
    } catch (const Error&) {
        e.value = raw;  // bare words are strings
    }
    return e;
}

}  // namespace

ConfigDoc parse_config_text(std::string_view text) {
    ConfigDoc doc;
    std::string table;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            auto close = line.find(']');
            if (close == std::string_view::npos) fail(line_no, "unterminated table header");
            const auto rest = trim(line.substr(close + 1));
            if (!rest.empty() && rest.front() != '#') fail(line_no, "unexpected text after table header");
            const auto name = trim(line.substr(1, close - 1));
            if (!valid_key(name)) fail(line_no, "invalid table name");
            table = std::string(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (!valid_key(key)) fail(line_no, "invalid key '" + std::string(key) + "'");
        const auto full = table.empty() ? std::string(key) : table + "." + std::string(key);
        if (doc.count(full)) fail(line_no, "duplicate key " + full);
        doc[full] = ConfigEntry{ValueParser(line.substr(eq + 1), line_no).parse_all(), line_no};
    }
    return doc;
}

ServiceConfig build_service_config(const ConfigDoc& doc, const std::map<std::string, std::string>& env) {
    const auto table = setters();
    ServiceConfig c;
    for (const auto& [key, entry] : doc) {
        const auto it = table.find(key);
        if (it == table.end()) fail(entry.line, "unknown key " + key);
        it->second(c, entry, key);
    }
    for (const auto& [key, setter] : table) {
        const auto e = env.find(env_name(key));
        if (e == env.end()) continue;
        try {
            setter(c, env_entry(key, e->second), key);
        } catch (const Error& err) {
            throw Error(Errc::config_error, e->first + ": " + err.what());
        }
    }
    return c;
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                  const std::map<std::string, std::string>& env) {
    ConfigDoc doc;
    if (file) {
        std::ifstream in(*file, std::ios::binary);
        if (!in) throw Error(Errc::config_error, "cannot read config file " + file->string());
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            doc = parse_config_text(ss.str());
        } catch (const Error& e) {
            throw Error(Errc::config_error, file->string() + ": " + e.what());
        }
    }
    return build_service_config(doc, env);
}

std::map<std::string, std::string> autonoma_environment() {
    std::map<std::string, std::string> out;
    for (char** e = environ; e && *e; ++e) {
        std::string_view kv(*e);
        if (!kv.starts_with("AUTONOMA_")) continue;
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos) continue;
        out.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
    }
    return out;
}

void validate_service_config(const ServiceConfig& c) {
    if (c.allowlist.empty()) throw Error(Errc::config_error, "allowlist must not be empty");
    supervisor::validate_policy(c.policy);
    const auto addr = net::parse_address(c.bind_address);
    if (!addr) throw Error(Errc::config_error, "bind address is not an IP address: " + c.bind_address);
    if (c.allow_non_lan_bind) return;
    const bool wildcard = *addr == *net::parse_address("0.0.0.0") || *addr == *net::parse_address("::");
    if (wildcard || net::ip_filter(*addr, c.allowlist) == net::FilterDecision::Deny) {
        throw Error(Errc::config_error, "refusing to bind " + c.bind_address +
                                            ": not inside the allowlist (set allow_non_lan_bind to override)");
    }
}

std::filesystem::path audit_path(const ServiceConfig& c) {
    return c.audit_log.empty() ? c.storage_root / "audit.log" : c.audit_log;
}

std::filesystem::path workspace_path(const ServiceConfig& c) {
    return c.workspace_root.empty() ? c.storage_root / "workspace" : c.workspace_root;
}

void configure_router(const ServiceConfig& c, provider::Router& router) {
    for (const auto& [role, p] : c.providers) {
        if (p.kind == "scripted") {
            if (p.script.empty()) {
                throw Error(Errc::config_error, "provider." + std::string(provider::to_string(role)) +
                                                    ".script is required for a scripted backend");
            }
            router.set(role, std::make_shared<provider::ScriptedBackend>(
                                 provider::load_script(p.script),
                                 p.mode == "lenient" ? provider::ScriptedBackend::Mode::lenient
                                                     : provider::ScriptedBackend::Mode::strict,
                                 "scripted:" + p.script.filename().string()));
        } else {
            auto http = p.http;
            if (!p.api_key_env.empty()) {
                if (const char* key = std::getenv(p.api_key_env.c_str())) http.api_key = key;
            }
            router.set(role, std::make_shared<provider::HttpBackend>(http));
        }
    }
}

Json config_to_json(const ServiceConfig& c) {
    Json allow = Json::array();
    for (const auto& b : c.allowlist) allow.push_back(net::to_string(b));
    Json providers = Json::object();
    for (const auto& [role, p] : c.providers) {
        Json j{{"kind", p.kind}};
        if (p.kind == "scripted") {
            j["script"] = p.script.string();
            j["mode"] = p.mode;
        } else {
            j["host"] = p.http.host;
            j["port"] = p.http.port;
            j["path"] = p.http.path;
            j["model"] = p.http.model;
            j["timeout_ms"] = p.http.timeout_ms;
            j["api_key_env"] = p.api_key_env;
        }
        providers[std::string(provider::to_string(role))] = j;
    }
    return Json{{"bind", c.bind_address},
                {"port", c.port},
                {"allow_cidr", allow},
                {"allow_non_lan_bind", c.allow_non_lan_bind},
                {"pairing_ttl_ms", c.pairing_ttl_ms},
                {"max_body_bytes", c.max_body_bytes},
                {"storage_root", c.storage_root.string()},
                {"audit_log", audit_path(c).string()},
                {"workspace_root", workspace_path(c).string()},
                {"rules_dir", c.rules_dir.string()},
                {"search_fixtures", c.search_fixtures.string()},
                {"plugin_dir", c.plugin_dir.string()},
                {"policy", supervisor::policy_to_json(c.policy)},
                {"provider", providers}};
}

}  // namespace autonoma::gateway
