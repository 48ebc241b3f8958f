#pragma once

#include "autonoma/common/clock.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace autonoma::net {

struct PairingSession {
    std::string token;  // 32 random bytes, base64url
    TimestampMs issued_at = 0;
    std::int64_t ttl_ms = 0;
    std::optional<std::string> bound_client;
};

enum class AuthResult { ok, unknown_token, expired, bound_elsewhere };

// Issued pairing tokens. The first client to present a live token owns it;
// once bound, the token authenticates that client only. Unbound tokens
// expire after the TTL.
class PairingRegistry {
public:
    explicit PairingRegistry(std::int64_t ttl_ms = 300000,
                             std::shared_ptr<Clock> clock = std::make_shared<SystemClock>());

    PairingSession issue();
    AuthResult authenticate(const std::string& token, const std::string& client_id);
    std::optional<PairingSession> find(const std::string& token) const;
    std::size_t size() const;

private:
    std::int64_t ttl_ms_;
    std::shared_ptr<Clock> clock_;
    mutable std::mutex mu_;
    std::map<std::string, PairingSession> sessions_;
};

// autonoma://pair?host=<addr>&port=<p>&token=<t>
std::string qr_payload(const std::string& host, std::uint16_t port, const std::string& token);

}  // namespace autonoma::net
