#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crex {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(BytesView b) {
    return std::string(b.begin(), b.end());
}

inline void append(Bytes& out, BytesView more) {
    out.insert(out.end(), more.begin(), more.end());
}

std::string hex_encode(BytesView data);

// Throws ParseError on non-hex input or odd length.
Bytes hex_decode(std::string_view hex);

}  // namespace crex
