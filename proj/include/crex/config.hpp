#pragma once

#include <cstdint>
#include <string>

#include "crex/codec.hpp"

namespace crex {

// Simulation run parameters. Text form is `key = value` lines with `#`
// comments; keys are documented in the README.
struct RunConfig {
    std::string group_id = "test16";
    std::uint32_t candidates = 5;   // n
    std::uint32_t examiners = 2;    // m
    std::uint32_t questions = 3;    // k, at least two
    std::uint32_t partitions = 2;   // d
    std::uint32_t mix_servers = 2;
    std::uint64_t seed = 1;
    std::string rubric_id = "hash";
    // Remark!-style leak: the authority additionally publishes each
    // candidate's answers beside their pseudonym. Used as the negative
    // control for the coercion games.
    bool remark_answer_leak = false;

    void validate() const;  // throws ConfigError

    Record to_record() const;
    static RunConfig from_record(const Record& r);

    std::string to_text() const;
    static RunConfig parse_text(std::string_view text);
    static RunConfig load_file(const std::string& path);

    bool operator==(const RunConfig&) const = default;
};

}  // namespace crex
