#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace autonoma::utf8 {

// Decodes UTF-8 into codepoints. Malformed sequences decode to U+FFFD and
// consume one byte.
std::vector<char32_t> decode(std::string_view text);

// Longest prefix of `text` no longer than `max_bytes` that does not split a
// multi-byte sequence.
std::string truncate(std::string_view text, std::size_t max_bytes);

std::string to_lower_ascii(std::string_view text);

// Splits on runs of non-alphanumeric ASCII; non-ASCII bytes are kept inside
// tokens. Tokens are lowercased.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace autonoma::utf8
