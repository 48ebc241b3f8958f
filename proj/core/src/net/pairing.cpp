#include "autonoma/net/pairing.hpp"

#include "autonoma/common/digest.hpp"

namespace autonoma::net {

PairingRegistry::PairingRegistry(std::int64_t ttl_ms, std::shared_ptr<Clock> clock)
    : ttl_ms_(ttl_ms), clock_(std::move(clock)) {}

PairingSession PairingRegistry::issue() {
    PairingSession s;
    s.token = base64url_encode(random_bytes(32));
    s.issued_at = clock_->now_ms();
    s.ttl_ms = ttl_ms_;
    std::lock_guard lock(mu_);
    // Expired, never-bound tokens are dead weight.
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        const bool dead = !it->second.bound_client && s.issued_at - it->second.issued_at > it->second.ttl_ms;
        it = dead ? sessions_.erase(it) : std::next(it);
    }
    sessions_.emplace(s.token, s);
    return s;
}

AuthResult PairingRegistry::authenticate(const std::string& token, const std::string& client_id) {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(token);
    if (it == sessions_.end()) return AuthResult::unknown_token;
    auto& s = it->second;
    if (s.bound_client) return *s.bound_client == client_id ? AuthResult::ok : AuthResult::bound_elsewhere;
    if (clock_->now_ms() - s.issued_at > s.ttl_ms) return AuthResult::expired;
    s.bound_client = client_id;
    return AuthResult::ok;
}

std::optional<PairingSession> PairingRegistry::find(const std::string& token) const {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(token);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

std::size_t PairingRegistry::size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

std::string qr_payload(const std::string& host, std::uint16_t port, const std::string& token) {
    // IPv6 literals are bracketed so the payload stays a valid URI.
    const auto h = host.find(':') != std::string::npos ? "[" + host + "]" : host;
    return "autonoma://pair?host=" + h + "&port=" + std::to_string(port) + "&token=" + token;
}

}  // namespace autonoma::net
