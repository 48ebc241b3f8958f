#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::net {

// An address normalized to 16 bytes; IPv4 (and IPv4-mapped IPv6) use the
// last four bytes with `v4` set.
struct IpAddress {
    std::array<std::uint8_t, 16> bytes{};
    bool v4 = false;

    bool operator==(const IpAddress&) const = default;
};

std::optional<IpAddress> parse_address(std::string_view text);
std::string to_string(const IpAddress& a);

struct Cidr {
    IpAddress network;  // host bits cleared
    unsigned prefix = 0;

    bool contains(const IpAddress& a) const;
    bool operator==(const Cidr&) const = default;
};

// "a.b.c.d/n" or "x::y/n"; a bare address means a single host. Throws
// ConfigError on malformed input.
Cidr parse_cidr(std::string_view text);
std::string to_string(const Cidr& c);

// 192.168.0.0/16, 10.0.0.0/8, 172.16.0.0/12, 127.0.0.0/8
std::vector<Cidr> default_allowlist();

enum class FilterDecision { Allow, Deny };

// Allow iff the address parses and lies in one of the blocks.
FilterDecision ip_filter(std::string_view remote_address, const std::vector<Cidr>& allowlist);
FilterDecision ip_filter(const IpAddress& remote_address, const std::vector<Cidr>& allowlist);

}  // namespace autonoma::net
