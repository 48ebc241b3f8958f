#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace autonoma {

using Json = nlohmann::json;

// Canonical serialization: object keys sorted bytewise, no insignificant
// whitespace, UTF-8 passed through unescaped. nlohmann::json keeps objects in
// a std::map, so a compact dump already satisfies the ordering rule.
inline std::string canonical_dump(const Json& value) {
    return value.dump(-1, ' ', false, Json::error_handler_t::strict);
}

}  // namespace autonoma
