#include "crex/rng.hpp"

#include <cstring>

#include "crex/codec.hpp"
#include "crex/errors.hpp"

namespace crex {

RandomSource::RandomSource(std::uint64_t seed) {
    Bytes b;
    put_u64(b, seed);
    seed_ = sha256_parts("crex.rng.seed", {b});
}

RandomSource RandomSource::fork(std::string_view label) const {
    Bytes lab = to_bytes(label);
    return RandomSource(sha256_parts("crex.rng.fork", {BytesView(seed_), lab}));
}

void RandomSource::fill(std::uint8_t* out, std::size_t n) {
    while (n > 0) {
        Bytes ctr;
        put_u64(ctr, counter_++);
        Digest block = sha256_parts("crex.rng.block", {BytesView(seed_), ctr});
        std::size_t take = n < block.size() ? n : block.size();
        std::memcpy(out, block.data(), take);
        out += take;
        n -= take;
    }
}

Bytes RandomSource::bytes(std::size_t n) {
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

mpz_class RandomSource::below(const mpz_class& bound) {
    if (bound <= 0)
        throw Error("random bound must be positive");
    std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    std::size_t nbytes = (bits + 7) / 8;
    std::uint8_t top_mask = bits % 8 ? static_cast<std::uint8_t>((1u << (bits % 8)) - 1) : 0xff;
    Bytes buf(nbytes);
    for (;;) {
        fill(buf.data(), buf.size());
        buf[0] &= top_mask;
        mpz_class x;
        mpz_import(x.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
        if (x < bound)
            return x;
    }
}

mpz_class RandomSource::nonzero_below(const mpz_class& bound) {
    for (;;) {
        mpz_class x = below(bound);
        if (x != 0)
            return x;
    }
}

std::uint64_t RandomSource::u64_below(std::uint64_t bound) {
    if (bound == 0)
        throw Error("random bound must be positive");
    // Rejection sampling over the smallest power-of-two mask covering bound.
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
        std::uint8_t raw[8];
        fill(raw, 8);
        std::uint64_t x = 0;
        for (std::uint8_t b : raw) x = (x << 8) | b;
        x &= mask;
        if (x < bound)
            return x;
    }
}

std::vector<std::size_t> RandomSource::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = u64_below(i);
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

}  // namespace crex
