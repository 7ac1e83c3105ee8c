#include "crex/codec.hpp"

#include "crex/errors.hpp"

namespace crex {

std::string hex_encode(BytesView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes hex_decode(std::string_view hex) {
    if (hex.size() % 2 != 0)
        throw ParseError(hex.size(), "odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_nibble(hex[2 * i]);
        int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0)
            throw ParseError(2 * i, "invalid hex digit");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

void put_u32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void put_u64(Bytes& out, std::uint64_t v) {
    put_u32(out, static_cast<std::uint32_t>(v >> 32));
    put_u32(out, static_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(BytesView in, std::size_t& pos) {
    if (pos + 4 > in.size())
        throw ParseError(pos, "truncated u32");
    std::uint32_t v = (std::uint32_t(in[pos]) << 24) | (std::uint32_t(in[pos + 1]) << 16) |
                      (std::uint32_t(in[pos + 2]) << 8) | std::uint32_t(in[pos + 3]);
    pos += 4;
    return v;
}

std::uint64_t get_u64(BytesView in, std::size_t& pos) {
    std::uint64_t hi = get_u32(in, pos);
    std::uint64_t lo = get_u32(in, pos);
    return (hi << 32) | lo;
}

Record& Record::add(BytesView field) {
    fields.emplace_back(field.begin(), field.end());
    return *this;
}

Record& Record::add_str(std::string_view field) {
    fields.push_back(to_bytes(field));
    return *this;
}

Record& Record::add_u32(std::uint32_t v) {
    Bytes b;
    put_u32(b, v);
    fields.push_back(std::move(b));
    return *this;
}

Record& Record::add_u64(std::uint64_t v) {
    Bytes b;
    put_u64(b, v);
    fields.push_back(std::move(b));
    return *this;
}

BytesView Record::field(std::size_t i) const {
    if (i >= fields.size())
        throw ParseError(0, "record '" + tag + "' has no field " + std::to_string(i));
    return fields[i];
}

std::string Record::str(std::size_t i) const {
    return to_string(field(i));
}

std::uint32_t Record::u32(std::size_t i) const {
    BytesView f = field(i);
    if (f.size() != 4)
        throw ParseError(0, "record '" + tag + "' field " + std::to_string(i) + " is not a u32");
    std::size_t pos = 0;
    return get_u32(f, pos);
}

std::uint64_t Record::u64(std::size_t i) const {
    BytesView f = field(i);
    if (f.size() != 8)
        throw ParseError(0, "record '" + tag + "' field " + std::to_string(i) + " is not a u64");
    std::size_t pos = 0;
    return get_u64(f, pos);
}

Bytes encode_record(const Record& r) {
    Bytes out;
    put_u32(out, static_cast<std::uint32_t>(r.fields.size() + 1));
    Bytes tag = to_bytes(r.tag);
    put_u32(out, static_cast<std::uint32_t>(tag.size()));
    append(out, tag);
    for (const Bytes& f : r.fields) {
        put_u32(out, static_cast<std::uint32_t>(f.size()));
        append(out, f);
    }
    return out;
}

Record decode_record(BytesView in, std::size_t& pos) {
    std::uint32_t count = get_u32(in, pos);
    if (count == 0)
        throw ParseError(pos - 4, "record with zero fields");
    if (count > in.size())  // cheap bound: each field needs >= 4 bytes of prefix
        throw ParseError(pos - 4, "implausible field count");
    Record r;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint32_t len = get_u32(in, pos);
        if (pos + len > in.size())
            throw ParseError(pos - 4, "field length overruns input");
        BytesView f = in.subspan(pos, len);
        pos += len;
        if (i == 0)
            r.tag = to_string(f);
        else
            r.fields.emplace_back(f.begin(), f.end());
    }
    return r;
}

Record decode_record(BytesView in) {
    std::size_t pos = 0;
    Record r = decode_record(in, pos);
    if (pos != in.size())
        throw ParseError(pos, "trailing bytes after record");
    return r;
}

}  // namespace crex
