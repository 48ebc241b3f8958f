#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);

// Cryptographically random bytes from the OS CSPRNG.
std::vector<std::uint8_t> random_bytes(std::size_t count);

// RFC 4648 section 5 alphabet, no padding.
std::string base64url_encode(std::span<const std::uint8_t> bytes);

// Random version-4 UUID in canonical lowercase form.
std::string random_uuid();

bool is_lowercase_uuid(std::string_view id);

}  // namespace autonoma
