#include "autonoma/net/ip_filter.hpp"

#include "autonoma/common/error.hpp"

#include <boost/asio/ip/address.hpp>

#include <charconv>

namespace autonoma::net {

namespace {

constexpr std::array<std::uint8_t, 12> kMappedPrefix{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0xff, 0xff};

IpAddress from_asio(const boost::asio::ip::address& a) {
    IpAddress out;
    if (a.is_v4()) {
        const auto b = a.to_v4().to_bytes();
        std::copy(kMappedPrefix.begin(), kMappedPrefix.end(), out.bytes.begin());
        std::copy(b.begin(), b.end(), out.bytes.begin() + 12);
        out.v4 = true;
        return out;
    }
    const auto b = a.to_v6().to_bytes();
    std::copy(b.begin(), b.end(), out.bytes.begin());
    out.v4 = std::equal(kMappedPrefix.begin(), kMappedPrefix.end(), out.bytes.begin());
    return out;
}

}  // namespace

std::optional<IpAddress> parse_address(std::string_view text) {
    // Scope ids ("fe80::1%eth0") are not addresses a peer can present.
    if (text.empty() || text.size() > 64 || text.find('%') != std::string_view::npos) return std::nullopt;
    boost::system::error_code ec;
    const auto a = boost::asio::ip::make_address(std::string(text), ec);
    if (ec) return std::nullopt;
    return from_asio(a);
}

std::string to_string(const IpAddress& a) {
    if (a.v4) {
        boost::asio::ip::address_v4::bytes_type b;
        std::copy(a.bytes.begin() + 12, a.bytes.end(), b.begin());
        return boost::asio::ip::address_v4(b).to_string();
    }
    boost::asio::ip::address_v6::bytes_type b;
    std::copy(a.bytes.begin(), a.bytes.end(), b.begin());
    return boost::asio::ip::address_v6(b).to_string();
}

bool Cidr::contains(const IpAddress& a) const {
    if (a.v4 != network.v4) return false;
    const unsigned bits = network.v4 ? prefix + 96 : prefix;
    const unsigned full = bits / 8;
    for (unsigned i = 0; i < full; ++i) {
        if (a.bytes[i] != network.bytes[i]) return false;
    }
    if (const unsigned rem = bits % 8; rem != 0) {
        const auto mask = static_cast<std::uint8_t>(0xff << (8 - rem));
        if ((a.bytes[full] & mask) != (network.bytes[full] & mask)) return false;
    }
    return true;
}

Cidr parse_cidr(std::string_view text) {
    const auto slash = text.find('/');
    const auto addr = parse_address(text.substr(0, slash));
    if (!addr) throw Error(Errc::config_error, "invalid CIDR address: " + std::string(text));
    Cidr c;
    c.network = *addr;
    const unsigned max = addr->v4 ? 32 : 128;
    c.prefix = max;
    if (slash != std::string_view::npos) {
        const auto p = text.substr(slash + 1);
        unsigned v = 0;
        const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
        if (p.empty() || ec != std::errc{} || ptr != p.data() + p.size() || v > max) {
            throw Error(Errc::config_error, "invalid CIDR prefix: " + std::string(text));
        }
        c.prefix = v;
    }
    const unsigned bits = c.network.v4 ? c.prefix + 96 : c.prefix;
    for (unsigned i = 0; i < 128; ++i) {
        if (i >= bits) c.network.bytes[i / 8] &= static_cast<std::uint8_t>(~(0x80u >> (i % 8)));
    }
    return c;
}

std::string to_string(const Cidr& c) { return to_string(c.network) + "/" + std::to_string(c.prefix); }

std::vector<Cidr> default_allowlist() {
    return {parse_cidr("192.168.0.0/16"), parse_cidr("10.0.0.0/8"), parse_cidr("172.16.0.0/12"),
            parse_cidr("127.0.0.0/8")};
}

FilterDecision ip_filter(const IpAddress& remote_address, const std::vector<Cidr>& allowlist) {
    for (const auto& c : allowlist) {
        if (c.contains(remote_address)) return FilterDecision::Allow;
    }
    return FilterDecision::Deny;
}

FilterDecision ip_filter(std::string_view remote_address, const std::vector<Cidr>& allowlist) {
    const auto a = parse_address(remote_address);
    return a ? ip_filter(*a, allowlist) : FilterDecision::Deny;
}

}  // namespace autonoma::net
