#include "crex/rubric.hpp"

#include "crex/codec.hpp"
#include "crex/errors.hpp"
#include "crex/hash.hpp"

namespace crex {

RubricFn rubric_by_id(const std::string& id) {
    if (id == "hash") {
        return [](BytesView q, BytesView a) {
            Digest d = sha256_parts("crex.rubric.hash", {q, a});
            return to_bytes("m" + hex_encode(BytesView(d.data(), 1)));
        };
    }
    if (id == "length") {
        return [](BytesView, BytesView a) {
            return to_bytes("L" + std::to_string(a.size() % 10));
        };
    }
    throw ConfigError("unknown rubric '" + id + "'");
}

}  // namespace crex
