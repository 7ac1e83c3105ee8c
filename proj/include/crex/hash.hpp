#pragma once

#include <array>
#include <initializer_list>

#include "crex/bytes.hpp"

namespace crex {

inline constexpr const char* kHashId = "sha256";

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(BytesView data);

// Domain-separated hash over a sequence of parts; each part is
// length-prefixed so part boundaries cannot be shifted.
Digest sha256_parts(std::string_view domain_tag, std::initializer_list<BytesView> parts);

}  // namespace crex
