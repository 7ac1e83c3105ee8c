#include <doctest.h>

#include <set>

#include "crex/rng.hpp"

using namespace crex;

TEST_CASE("same seed, same stream") {
    RandomSource a(42), b(42);
    CHECK(a.bytes(64) == b.bytes(64));
    RandomSource c(43);
    CHECK(a.bytes(64) != c.bytes(64));
}

TEST_CASE("forks are independent and labeled") {
    RandomSource root(1);
    RandomSource x = root.fork("alice");
    RandomSource y = root.fork("bob");
    RandomSource x2 = RandomSource(1).fork("alice");
    CHECK(x.bytes(32) == x2.bytes(32));
    CHECK(RandomSource(1).fork("alice").bytes(32) != y.bytes(32));

    // Draws on one fork do not perturb a sibling created later.
    RandomSource root2(1);
    root2.fork("alice").bytes(1000);
    CHECK(root2.fork("bob").bytes(32) == RandomSource(1).fork("bob").bytes(32));
}

TEST_CASE("below stays in range and covers it") {
    RandomSource rng(5);
    mpz_class bound(11);
    std::set<unsigned long> seen;
    for (int i = 0; i < 500; ++i) {
        mpz_class v = rng.below(bound);
        CHECK(v >= 0);
        CHECK(v < bound);
        seen.insert(v.get_ui());
    }
    CHECK(seen.size() == 11);  // all residues hit in 500 draws
    for (int i = 0; i < 200; ++i)
        CHECK(rng.nonzero_below(bound) != 0);
}

TEST_CASE("permutation is a bijection") {
    RandomSource rng(9);
    for (std::size_t n : {0u, 1u, 2u, 7u, 20u}) {
        auto p = rng.permutation(n);
        REQUIRE(p.size() == n);
        std::set<std::size_t> s(p.begin(), p.end());
        CHECK(s.size() == n);
        for (std::size_t v : p)
            CHECK(v < n);
    }
}

TEST_CASE("u64_below respects bound") {
    RandomSource rng(11);
    for (int i = 0; i < 1000; ++i)
        CHECK(rng.u64_below(3) < 3);
    CHECK(rng.u64_below(1) == 0);
}
