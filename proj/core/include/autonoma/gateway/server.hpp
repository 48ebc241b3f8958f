#pragma once

#include "autonoma/engine/engine.hpp"
#include "autonoma/gateway/config.hpp"
#include "autonoma/net/pairing.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace autonoma::gateway {

struct GatewayStats {
    std::uint64_t filtered = 0;         // connections refused by the IP filter
    std::uint64_t unauthenticated = 0;  // requests refused for auth
    std::uint64_t requests = 0;         // requests routed to a handler
    std::uint64_t streams = 0;          // event streams opened
};

// HTTP + WebSocket front end of one engine.
//
//   POST /api/prompt                    {conversation_id?, text, attachments?, policy?}
//   GET  /api/conversations
//   GET  /api/conversations/{id}
//   POST /api/approvals/{id}            {action_digest, decision: approve|deny}
//   WS   /ws/conversations/{id}?since=N
//
// Requests carry `Authorization: Bearer <pairing token>`; stream clients
// may pass `token=` in the query instead. The client identity bound to a
// token is the X-Autonoma-Client header, or the peer address without it.
class Gateway {
public:
    Gateway(ServiceConfig config, engine::Engine& engine, std::shared_ptr<net::PairingRegistry> pairing,
            std::size_t io_threads = 2);
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    // Validates the configuration and starts listening. Throws ConfigError
    // or IoError.
    void start();
    void stop();
    // The bound port; differs from the configured one when that was 0.
    std::uint16_t port() const;

    // The request path of one connection without the socket: filter, parse,
    // authenticate, route. Returns the serialized response; stream upgrades
    // are refused with 400.
    std::string handle_raw(const std::string& remote_address, std::string_view request_bytes);

    GatewayStats stats() const;

    struct Impl;

private:
    std::shared_ptr<Impl> impl_;
};

}  // namespace autonoma::gateway
