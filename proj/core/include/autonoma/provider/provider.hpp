#pragma once

#include "autonoma/common/json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::provider {

// Which system role is asking; selects the configured backend.
enum class RoleContext { coordinator, planner, agent, reporter };

std::string_view to_string(RoleContext r);
RoleContext role_context_from_string(std::string_view s);

struct ChatMessage {
    std::string role;  // system | user | assistant
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct CompletionParams {
    double temperature = 0.0;
    std::uint32_t max_output_tokens = 1024;
};

struct CompletionRequest {
    RoleContext role_context = RoleContext::coordinator;
    std::vector<ChatMessage> messages;
    CompletionParams params;
};

struct Usage {
    std::uint64_t prompt_tokens = 0;
    std::uint64_t completion_tokens = 0;
};

struct Completion {
    std::string text;
    Usage usage;
};

// Stable token over (role, content) pairs. Line endings are normalized, ids
// and timestamps never enter the hash.
std::string fingerprint(const std::vector<ChatMessage>& messages);

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const CompletionRequest& req) = 0;
    virtual std::string identity() const = 0;
};

struct ScriptEntry {
    std::string match;  // fingerprint or "*"
    std::string response;

    bool operator==(const ScriptEntry&) const = default;
};

std::vector<ScriptEntry> parse_script(const Json& doc);
std::vector<ScriptEntry> load_script(const std::filesystem::path& file);
Json script_to_json(const std::vector<ScriptEntry>& entries);

// Replays authored or recorded responses in order. Strict mode requires the
// entry's match to equal the request fingerprint (or be "*"); lenient mode
// ignores the match field.
class ScriptedBackend final : public Backend {
public:
    enum class Mode { strict, lenient };

    explicit ScriptedBackend(std::vector<ScriptEntry> entries, Mode mode = Mode::strict,
                             std::string identity = "scripted");

    Completion complete(const CompletionRequest& req) override;
    std::string identity() const override { return identity_; }

    std::size_t cursor() const;
    std::size_t remaining() const;

private:
    mutable std::mutex mu_;
    std::vector<ScriptEntry> entries_;
    std::size_t cursor_ = 0;
    Mode mode_;
    std::string identity_;
};

// Wraps another backend and records every exchange as a strict script entry.
class RecordingBackend final : public Backend {
public:
    explicit RecordingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}

    Completion complete(const CompletionRequest& req) override;
    std::string identity() const override { return inner_->identity(); }

    std::vector<ScriptEntry> entries() const;
    // Writes provider_trace.json in the script file format.
    void write_trace(const std::filesystem::path& file) const;

private:
    std::shared_ptr<Backend> inner_;
    mutable std::mutex mu_;
    std::vector<ScriptEntry> recorded_;
};

// Fails loudly on any call. Used to prove that a code path performs no model
// I/O.
class TripwireBackend final : public Backend {
public:
    Completion complete(const CompletionRequest& req) override;
    std::string identity() const override { return "tripwire"; }
    std::size_t calls() const { return calls_; }

private:
    std::size_t calls_ = 0;
};

struct HttpBackendConfig {
    std::string host = "127.0.0.1";
    int port = 8000;
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;
    int timeout_ms = 60000;
    int transport_retries = 2;
};

// OpenAI-compatible chat completions over plain HTTP.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {}

    Completion complete(const CompletionRequest& req) override;
    std::string identity() const override { return cfg_.model.empty() ? "http" : cfg_.model; }

private:
    HttpBackendConfig cfg_;
};

// Per-role backend table. The only entry point other modules use.
class Router {
public:
    void set(RoleContext role, std::shared_ptr<Backend> backend);
    void set_all(const std::shared_ptr<Backend>& backend);
    bool has(RoleContext role) const;
    std::shared_ptr<Backend> backend(RoleContext role) const;

    // Throws ProviderUnavailable when no backend serves the role.
    Completion complete(const CompletionRequest& req) const;

private:
    mutable std::mutex mu_;
    std::map<RoleContext, std::shared_ptr<Backend>> backends_;
};

}  // namespace autonoma::provider
