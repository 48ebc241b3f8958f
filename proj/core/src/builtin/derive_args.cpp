#include "autonoma/builtin/derive_args.hpp"

#include "autonoma/common/error.hpp"
#include "autonoma/provider/provider.hpp"

namespace autonoma::builtin {

namespace {

std::string strip_fence(std::string text) {
    const auto open = text.find("```");
    if (open == std::string::npos) return text;
    const auto nl = text.find('\n', open);
    const auto close = text.rfind("```");
    if (nl == std::string::npos || close <= nl) return text;
    return text.substr(nl + 1, close - nl - 1);
}

}  // namespace

std::optional<Json> derive_args(const agents::TaskPayload& payload, agents::TaskContext& ctx,
                                const std::string& schema) {
    auto* router = ctx.provider();
    if (!router || !router->has(provider::RoleContext::agent)) return std::nullopt;
    provider::CompletionRequest req;
    req.role_context = provider::RoleContext::agent;
    std::string user = "Task: " + payload.description;
    if (!payload.inputs.empty()) user += "\nInputs: " + payload.inputs.dump();
    req.messages = {{"system", "Reply with one JSON object and nothing else. " + schema}, {"user", user}};
    const auto answer = router->complete(req).text;
    Json args = Json::parse(strip_fence(answer), nullptr, false);
    if (args.is_discarded() || !args.is_object()) {
        throw Error(Errc::invalid_argument, "agent arguments are not a JSON object");
    }
    return args;
}

std::optional<Json> ArgsCache::find(const agents::TaskPayload& p) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(Key{p.conversation_id, p.step_id, p.attempt});
    if (it == entries_.end()) return std::nullopt;
    return std::optional<Json>(std::in_place, it->second);
}

void ArgsCache::put(const agents::TaskPayload& p, Json args) {
    std::lock_guard lock(mu_);
    entries_[Key{p.conversation_id, p.step_id, p.attempt}] = std::move(args);
}

}  // namespace autonoma::builtin
