#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string_view>
#include <vector>

#include "crex/hash.hpp"

namespace crex {

// Deterministic hash-based byte stream. One master source is seeded per run
// and forked with labels, one fork per role, so adding a consumer does not
// perturb the draws of any other.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed);

    RandomSource fork(std::string_view label) const;

    void fill(std::uint8_t* out, std::size_t n);
    Bytes bytes(std::size_t n);

    // Uniform in [0, bound) by rejection sampling; bound > 0.
    mpz_class below(const mpz_class& bound);
    // Uniform in [1, bound).
    mpz_class nonzero_below(const mpz_class& bound);

    std::uint64_t u64_below(std::uint64_t bound);

    // Fisher-Yates permutation of [0, n).
    std::vector<std::size_t> permutation(std::size_t n);

  private:
    explicit RandomSource(const Digest& seed) : seed_(seed) {}

    Digest seed_{};
    std::uint64_t counter_ = 0;
};

}  // namespace crex
