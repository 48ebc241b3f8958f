#pragma once

#include "autonoma/common/clock.hpp"

#include <map>
#include <mutex>
#include <string>

namespace autonoma::agents {

// Single-use approval tokens bound to (conversation, action digest).
class ApprovalAuthority {
public:
    static constexpr std::int64_t kDefaultTtlMs = 10 * 60 * 1000;

    explicit ApprovalAuthority(std::int64_t ttl_ms = kDefaultTtlMs) : ttl_ms_(ttl_ms) {}

    std::string issue(const std::string& conversation_id, const std::string& action_digest, TimestampMs now);

    // True exactly once per issued token, while unexpired and for the
    // matching binding.
    bool redeem(const std::string& token, const std::string& conversation_id, const std::string& action_digest,
                TimestampMs now);

    // Finds and redeems the outstanding token for a binding.
    bool redeem_binding(const std::string& conversation_id, const std::string& action_digest, TimestampMs now);

private:
    struct Grant {
        std::string conversation_id;
        std::string action_digest;
        TimestampMs expires_at = 0;
    };
    std::int64_t ttl_ms_;
    std::mutex mu_;
    std::map<std::string, Grant> tokens_;
};

}  // namespace autonoma::agents
