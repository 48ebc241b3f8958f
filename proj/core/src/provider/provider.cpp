#include "autonoma/provider/provider.hpp"

#include "autonoma/common/digest.hpp"
#include "autonoma/common/error.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

namespace autonoma::provider {

std::string_view to_string(RoleContext r) {
    switch (r) {
        case RoleContext::coordinator: return "coordinator";
        case RoleContext::planner: return "planner";
        case RoleContext::agent: return "agent";
        case RoleContext::reporter: return "reporter";
    }
    return "coordinator";
}

RoleContext role_context_from_string(std::string_view s) {
    for (auto r : {RoleContext::coordinator, RoleContext::planner, RoleContext::agent, RoleContext::reporter}) {
        if (to_string(r) == s) return r;
    }
    throw Error(Errc::config_error, "unknown provider role: " + std::string(s));
}

namespace {

std::string normalize_newlines(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r' && i + 1 < s.size() && s[i + 1] == '\n') continue;
        out.push_back(s[i]);
    }
    return out;
}

}  // namespace

std::string fingerprint(const std::vector<ChatMessage>& messages) {
    Json arr = Json::array();
    for (const auto& m : messages) arr.push_back(Json::array({m.role, normalize_newlines(m.content)}));
    return sha256_hex(canonical_dump(arr));
}

std::vector<ScriptEntry> parse_script(const Json& doc) {
    if (!doc.is_array()) throw Error(Errc::corrupt, "provider script must be a JSON list");
    std::vector<ScriptEntry> out;
    for (const auto& e : doc) {
        if (!e.is_object() || !e.contains("match") || !e.contains("response") || !e["match"].is_string() ||
            !e["response"].is_string()) {
            throw Error(Errc::corrupt, "script entry needs string fields match and response");
        }
        out.push_back({e["match"].get<std::string>(), e["response"].get<std::string>()});
    }
    return out;
}

std::vector<ScriptEntry> load_script(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot open script " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    Json doc = Json::parse(ss.str(), nullptr, false);
    if (doc.is_discarded()) throw Error(Errc::corrupt, "script is not valid JSON: " + file.string());
    return parse_script(doc);
}

Json script_to_json(const std::vector<ScriptEntry>& entries) {
    Json arr = Json::array();
    for (const auto& e : entries) arr.push_back({{"match", e.match}, {"response", e.response}});
    return arr;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> entries, Mode mode, std::string identity)
    : entries_(std::move(entries)), mode_(mode), identity_(std::move(identity)) {}

Completion ScriptedBackend::complete(const CompletionRequest& req) {
    std::lock_guard lock(mu_);
    if (cursor_ >= entries_.size()) throw Error(Errc::script_exhausted, "provider script exhausted");
    const auto& entry = entries_[cursor_];
    if (mode_ == Mode::strict && entry.match != "*") {
        const auto fp = fingerprint(req.messages);
        if (fp != entry.match) {
            throw Error(Errc::fingerprint_mismatch,
                        "script entry " + std::to_string(cursor_) + " expects " + entry.match + ", got " + fp);
        }
    }
    ++cursor_;
    Completion c;
    c.text = entry.response;
    for (const auto& m : req.messages) c.usage.prompt_tokens += m.content.size();
    c.usage.completion_tokens = entry.response.size();
    return c;
}

std::size_t ScriptedBackend::cursor() const {
    std::lock_guard lock(mu_);
    return cursor_;
}

std::size_t ScriptedBackend::remaining() const {
    std::lock_guard lock(mu_);
    return entries_.size() - cursor_;
}

Completion RecordingBackend::complete(const CompletionRequest& req) {
    auto c = inner_->complete(req);
    std::lock_guard lock(mu_);
    recorded_.push_back({fingerprint(req.messages), c.text});
    return c;
}

std::vector<ScriptEntry> RecordingBackend::entries() const {
    std::lock_guard lock(mu_);
    return recorded_;
}

void RecordingBackend::write_trace(const std::filesystem::path& file) const {
    const auto doc = script_to_json(entries());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + file.string());
    out << doc.dump(2) << '\n';
}

Completion TripwireBackend::complete(const CompletionRequest& req) {
    ++calls_;
    throw Error(Errc::provider_unavailable,
                "tripwire: unexpected model call from role " + std::string(to_string(req.role_context)));
}

Completion HttpBackend::complete(const CompletionRequest& req) {
    Json body;
    body["model"] = cfg_.model;
    body["temperature"] = req.params.temperature;
    body["max_tokens"] = req.params.max_output_tokens;
    body["messages"] = Json::array();
    for (const auto& m : req.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const auto payload = body.dump();

    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.transport_retries; ++attempt) {
        httplib::Client cli(cfg_.host, cfg_.port);
        cli.set_connection_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
        cli.set_read_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
        auto res = cli.Post(cfg_.path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            throw Error(Errc::provider_unavailable, "provider returned HTTP " + std::to_string(res->status));
        }
        Json doc = Json::parse(res->body, nullptr, false);
        if (doc.is_discarded()) throw Error(Errc::provider_unavailable, "provider returned invalid JSON");
        try {
            Completion c;
            c.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
            if (doc.contains("usage") && doc["usage"].is_object()) {
                c.usage.prompt_tokens = doc["usage"].value("prompt_tokens", 0ULL);
                c.usage.completion_tokens = doc["usage"].value("completion_tokens", 0ULL);
            }
            return c;
        } catch (const Json::exception& e) {
            throw Error(Errc::provider_unavailable, std::string("unexpected provider response: ") + e.what());
        }
    }
    throw Error(Errc::provider_unavailable, "provider unreachable: " + last_error);
}

void Router::set(RoleContext role, std::shared_ptr<Backend> backend) {
    std::lock_guard lock(mu_);
    backends_[role] = std::move(backend);
}

void Router::set_all(const std::shared_ptr<Backend>& backend) {
    for (auto r : {RoleContext::coordinator, RoleContext::planner, RoleContext::agent, RoleContext::reporter}) {
        set(r, backend);
    }
}

bool Router::has(RoleContext role) const {
    std::lock_guard lock(mu_);
    return backends_.count(role) != 0;
}

std::shared_ptr<Backend> Router::backend(RoleContext role) const {
    std::lock_guard lock(mu_);
    auto it = backends_.find(role);
    return it == backends_.end() ? nullptr : it->second;
}

Completion Router::complete(const CompletionRequest& req) const {
    if (req.messages.empty()) throw Error(Errc::invalid_argument, "completion request has no messages");
    auto b = backend(req.role_context);
    if (!b) {
        throw Error(Errc::provider_unavailable,
                    "no backend configured for role " + std::string(to_string(req.role_context)));
    }
    return b->complete(req);
}

}  // namespace autonoma::provider
