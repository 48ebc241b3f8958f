#include "autonoma/agents/approvals.hpp"

#include "autonoma/common/digest.hpp"

namespace autonoma::agents {

std::string ApprovalAuthority::issue(const std::string& conversation_id, const std::string& action_digest,
                                     TimestampMs now) {
    const auto token = base64url_encode(random_bytes(24));
    std::lock_guard lock(mu_);
    tokens_[token] = Grant{conversation_id, action_digest, now + ttl_ms_};
    return token;
}

bool ApprovalAuthority::redeem(const std::string& token, const std::string& conversation_id,
                               const std::string& action_digest, TimestampMs now) {
    std::lock_guard lock(mu_);
    auto it = tokens_.find(token);
    if (it == tokens_.end()) return false;
    const bool ok = it->second.conversation_id == conversation_id && it->second.action_digest == action_digest &&
                    now <= it->second.expires_at;
    if (ok || now > it->second.expires_at) tokens_.erase(it);
    return ok;
}

bool ApprovalAuthority::redeem_binding(const std::string& conversation_id, const std::string& action_digest,
                                       TimestampMs now) {
    std::lock_guard lock(mu_);
    for (auto it = tokens_.begin(); it != tokens_.end(); ++it) {
        if (it->second.conversation_id == conversation_id && it->second.action_digest == action_digest) {
            const bool ok = now <= it->second.expires_at;
            tokens_.erase(it);
            return ok;
        }
    }
    return false;
}

}  // namespace autonoma::agents
