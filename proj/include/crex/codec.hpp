#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crex/bytes.hpp"

namespace crex {

// Canonical serialization: big-endian fixed-width integers, and structured
// records as length-prefixed field sequences. Field 0 of every record is its
// tag. This encoding is the bit-exact contract for hashing, signing, and
// transcript files.

void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
std::uint32_t get_u32(BytesView in, std::size_t& pos);
std::uint64_t get_u64(BytesView in, std::size_t& pos);

struct Record {
    std::string tag;
    std::vector<Bytes> fields;

    Record() = default;
    explicit Record(std::string t) : tag(std::move(t)) {}

    Record& add(BytesView field);
    Record& add_str(std::string_view field);
    Record& add_u32(std::uint32_t v);
    Record& add_u64(std::uint64_t v);

    // Accessors throw ParseError when the field is missing or malformed.
    BytesView field(std::size_t i) const;
    std::string str(std::size_t i) const;
    std::uint32_t u32(std::size_t i) const;
    std::uint64_t u64(std::size_t i) const;

    bool operator==(const Record&) const = default;
};

Bytes encode_record(const Record& r);

// Decodes one record starting at `pos`; advances `pos` past it.
Record decode_record(BytesView in, std::size_t& pos);
Record decode_record(BytesView in);

}  // namespace crex
