#include "crex/hash.hpp"

#include <openssl/evp.h>

#include "crex/codec.hpp"
#include "crex/errors.hpp"

namespace crex {

Digest sha256(BytesView data) {
    Digest out{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != out.size())
        throw Error("sha256 failed");
    return out;
}

Digest sha256_parts(std::string_view domain_tag, std::initializer_list<BytesView> parts) {
    Bytes buf;
    Bytes tag = to_bytes(domain_tag);
    put_u32(buf, static_cast<std::uint32_t>(tag.size()));
    append(buf, tag);
    for (BytesView p : parts) {
        put_u32(buf, static_cast<std::uint32_t>(p.size()));
        append(buf, p);
    }
    return sha256(buf);
}

}  // namespace crex
