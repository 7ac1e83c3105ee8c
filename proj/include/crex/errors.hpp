#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crex {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Authenticated decryption failed: wrong key or tampered ciphertext.
struct AuthFailure : Error {
    using Error::Error;
};

// A batch entry failed a proof/membership check; the whole batch is rejected.
struct ValidationFailure : Error {
    std::size_t index;
    ValidationFailure(std::size_t i, const std::string& what)
        : Error(what), index(i) {}
};

struct MissingProof : Error {
    std::size_t index;
    explicit MissingProof(std::size_t i)
        : Error("batch entry " + std::to_string(i) + " carries no proof"), index(i) {}
};

struct NotFound : Error {
    using Error::Error;
};

// More than one mixnet output satisfies the injection search relation.
struct Ambiguous : Error {
    using Error::Error;
};

struct InconsistentReveal : Error {
    using Error::Error;
};

struct CrossCheckFailure : Error {
    std::size_t examiner;
    CrossCheckFailure(std::size_t e, const std::string& what)
        : Error(what), examiner(e) {}
};

struct UncoveredPartition : Error {
    using Error::Error;
};

struct MissingMarks : Error {
    std::size_t column;
    explicit MissingMarks(std::size_t c)
        : Error("no accepted mark vector for shuffled column " + std::to_string(c)),
          column(c) {}
};

struct PhaseError : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::size_t offset;
    ParseError(std::size_t off, const std::string& what)
        : Error(what + " (byte offset " + std::to_string(off) + ")"), offset(off) {}
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace crex
