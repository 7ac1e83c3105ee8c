#include <doctest.h>

#include "crex/errors.hpp"
#include "crex/group.hpp"
#include "oracle.hpp"

using namespace crex;

TEST_CASE("presets satisfy the group invariants") {
    for (const char* id : {"micro11", "test16", "modp2048"}) {
        GroupParams gp = GroupParams::preset(id);
        CHECK_NOTHROW(gp.validate());
        CHECK((gp.p - 1) % gp.q == 0);
    }
    CHECK_THROWS_AS(GroupParams::preset("nope"), ConfigError);

    GroupParams bad = GroupParams::preset("micro11");
    bad.q = 12;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("keygen matches the modular exponentiation oracle") {
    GroupParams gp = GroupParams::preset("micro11");
    // sk = 3 gives pk = 2^3 mod 23
    Scalar sk = Scalar::reduced(3, gp);
    GroupElement pk = generator(gp).pow(sk, gp);
    CHECK(pk.value() == oracle::powmod(2, 3, 23));
    CHECK(pk.value() == 8);
}

TEST_CASE("keygen never emits sk = 0 and draws look uniform") {
    GroupParams gp = GroupParams::preset("micro11");
    RandomSource rng(100);
    int collisions = 0;
    for (int i = 0; i < 1000; ++i) {
        RandomSource a = rng.fork("a" + std::to_string(i));
        RandomSource b = rng.fork("b" + std::to_string(i));
        KeyPair ka = keygen(gp, a);
        KeyPair kb = keygen(gp, b);
        CHECK(!ka.sk.is_zero());
        CHECK(!kb.sk.is_zero());
        CHECK(ka.pk == generator(gp).pow(ka.sk, gp));
        if (ka.sk == kb.sk)
            ++collisions;
    }
    // Distinct streams collide at rate ~1/(q-1) = 1/10: expect ~100 of 1000,
    // sigma ~ 9.5; allow 4 sigma.
    CHECK(collisions > 60);
    CHECK(collisions < 140);
}

TEST_CASE("group element constructors enforce membership") {
    GroupParams gp = GroupParams::preset("micro11");
    // 5^11 mod 23 = 22, so 5 is not in the order-11 subgroup.
    CHECK(oracle::powmod(5, 11, 23) != 1);
    CHECK_THROWS_AS(GroupElement::checked(5, gp), ValidationFailure);
    CHECK_THROWS(GroupElement::checked(0, gp));
    CHECK_THROWS(GroupElement::checked(23, gp));
    CHECK_NOTHROW(GroupElement::checked(8, gp));

    // Every member the group operations emit still satisfies x^q = 1.
    RandomSource rng(3);
    for (int i = 0; i < 50; ++i) {
        KeyPair k = keygen(gp, rng);
        GroupElement prod = k.pk.mul(generator(gp), gp);
        GroupElement powr = k.pk.pow(Scalar::random(gp, rng), gp);
        CHECK(GroupElement::is_member(prod.value(), gp));
        CHECK(GroupElement::is_member(powr.value(), gp));
    }
}

TEST_CASE("fixed-width encoding roundtrips and rejects out-of-range") {
    for (const char* id : {"micro11", "test16", "modp2048"}) {
        GroupParams gp = GroupParams::preset(id);
        RandomSource rng(17);
        for (int i = 0; i < 10; ++i) {
            KeyPair k = keygen(gp, rng);
            CHECK(GroupElement::decode(gp, k.pk.encode(gp)) == k.pk);
            CHECK(Scalar::decode(gp, k.sk.encode(gp)) == k.sk);
            CHECK(k.pk.encode(gp).size() == gp.element_width());
            CHECK(k.sk.encode(gp).size() == gp.scalar_width());
        }
    }
    GroupParams gp = GroupParams::preset("micro11");
    CHECK_THROWS_AS(Scalar::decode(gp, Bytes{11}), ParseError);   // == q
    CHECK_THROWS_AS(Scalar::decode(gp, Bytes{1, 2}), ParseError); // wrong width
    CHECK_THROWS_AS(GroupElement::decode(gp, Bytes{5}), ParseError);
}

TEST_CASE("scalar arithmetic reduces mod q") {
    GroupParams gp = GroupParams::preset("micro11");
    Scalar a = Scalar::reduced(7, gp);
    Scalar b = Scalar::reduced(9, gp);
    CHECK(a.add(b, gp).value() == (7 + 9) % 11);
    CHECK(a.mul(b, gp).value() == (7 * 9) % 11);
    CHECK(Scalar::reduced(-1, gp).value() == 10);
    CHECK(Scalar::reduced(22, gp).value() == 0);
}

TEST_CASE("hash_to_scalar is deterministic, domain separated, in range") {
    GroupParams gp = GroupParams::preset("micro11");
    Bytes a = to_bytes("part-a");
    Bytes b = to_bytes("part-b");
    Scalar s1 = hash_to_scalar(gp, "tag1", {a, b});
    Scalar s2 = hash_to_scalar(gp, "tag1", {a, b});
    CHECK(s1 == s2);
    CHECK(hash_to_scalar(gp, "tag2", {a, b}) != s1);

    // Shifting bytes across part boundaries changes the digest.
    Bytes ab = to_bytes("part-apart-b");
    CHECK(hash_to_scalar(gp, "tag1", {ab}) != s1);

    GroupParams big = GroupParams::preset("test16");
    for (int i = 0; i < 200; ++i) {
        Bytes part = to_bytes(std::to_string(i));
        CHECK(hash_to_scalar(big, "range", {part}).value() < big.q);
    }
}
