#pragma once

#include <functional>
#include <string>

#include "crex/bytes.hpp"

namespace crex {

// Marks are opaque byte tokens produced by a deterministic rubric over one
// (question, answer) pair; the protocol never interprets them.
using RubricFn = std::function<Bytes(BytesView question, BytesView answer)>;

// "hash": token from a digest of the pair. "length": token from the answer
// length. Throws ConfigError on unknown ids.
RubricFn rubric_by_id(const std::string& id);

}  // namespace crex
