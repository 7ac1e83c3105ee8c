#include <doctest.h>

#include <cmath>

#include "crex/errors.hpp"
#include "crex/schnorr.hpp"

using namespace crex;

namespace {

GroupElement nontrivial_generator(const GroupParams& gp, RandomSource& rng) {
    for (;;) {
        GroupElement h = generator(gp).pow(Scalar::random_nonzero(gp, rng), gp);
        if (!h.is_one())
            return h;
    }
}

}  // namespace

TEST_CASE("sign/verify completeness under g and under pseudonym generators") {
    for (const char* id : {"micro11", "test16"}) {
        GroupParams gp = GroupParams::preset(id);
        RandomSource rng(21);
        for (int i = 0; i < 100; ++i) {
            KeyPair k = keygen(gp, rng);
            GroupElement gen = (i % 2 == 0) ? generator(gp) : nontrivial_generator(gp, rng);
            GroupElement pk = gen.pow(k.sk, gp);
            Bytes msg = rng.bytes(rng.u64_below(64));
            SchnorrSignature sig = schnorr_sign(gp, k.sk, gen, msg, rng);
            CHECK(schnorr_verify(gp, pk, gen, msg, sig));
        }
    }
}

TEST_CASE("verification fails on wrong generator, wrong key, or flipped bit") {
    GroupParams gp = GroupParams::preset("test16");
    RandomSource rng(22);
    KeyPair k = keygen(gp, rng);
    GroupElement h = nontrivial_generator(gp, rng);
    GroupElement pk_h = h.pow(k.sk, gp);
    Bytes msg = to_bytes("quest|ans|pseudonym");
    SchnorrSignature sig = schnorr_sign(gp, k.sk, h, msg, rng);
    REQUIRE(schnorr_verify(gp, pk_h, h, msg, sig));

    // g instead of h
    CHECK_FALSE(schnorr_verify(gp, k.pk, generator(gp), msg, sig));
    // pk replaced by pk*g
    CHECK_FALSE(schnorr_verify(gp, pk_h.mul(generator(gp), gp), h, msg, sig));
    // flipped message bit
    Bytes tampered = msg;
    tampered[0] ^= 0x01;
    CHECK_FALSE(schnorr_verify(gp, pk_h, h, tampered, sig));
    // tampered response
    SchnorrSignature bad = sig;
    bad.response = bad.response.add(Scalar::reduced(1, gp), gp);
    CHECK_FALSE(schnorr_verify(gp, pk_h, h, msg, bad));
}

TEST_CASE("empty message signs and verifies") {
    GroupParams gp = GroupParams::preset("micro11");
    RandomSource rng(23);
    KeyPair k = keygen(gp, rng);
    SchnorrSignature sig = schnorr_sign(gp, k.sk, generator(gp), {}, rng);
    CHECK(schnorr_verify(gp, k.pk, generator(gp), {}, sig));
}

TEST_CASE("degenerate generator is rejected at signing and proving") {
    GroupParams gp = GroupParams::preset("micro11");
    RandomSource rng(24);
    KeyPair k = keygen(gp, rng);
    GroupElement one = GroupElement::checked(1, gp);
    CHECK_THROWS_AS(schnorr_sign(gp, k.sk, one, to_bytes("m"), rng), Error);
    CHECK_THROWS_AS(dlog_prove(gp, k.sk, one, to_bytes("ctx"), rng), Error);
}

TEST_CASE("dlog proof roundtrip and negative paths") {
    GroupParams gp = GroupParams::preset("test16");
    RandomSource rng(25);
    Bytes ctx = to_bytes("session-1|C");
    for (int i = 0; i < 50; ++i) {
        KeyPair k = keygen(gp, rng);
        DlogProof proof = dlog_prove(gp, k.sk, generator(gp), ctx, rng);
        CHECK(dlog_verify(gp, k.pk, generator(gp), ctx, proof));

        // wrong statement: pk' = pk * g = g^(sk+1)
        CHECK_FALSE(dlog_verify(gp, k.pk.mul(generator(gp), gp), generator(gp), ctx, proof));
        // replay under a different context
        CHECK_FALSE(dlog_verify(gp, k.pk, generator(gp), to_bytes("session-2|C"), proof));
        // tampered commitment
        DlogProof bad = proof;
        bad.commitment = bad.commitment.mul(generator(gp), gp);
        CHECK_FALSE(dlog_verify(gp, k.pk, generator(gp), ctx, bad));
    }
}

TEST_CASE("random forgeries pass at rate ~1/q in the micro group") {
    GroupParams gp = GroupParams::preset("micro11");
    RandomSource rng(26);
    KeyPair k = keygen(gp, rng);
    Bytes ctx = to_bytes("forge-ctx");
    int accepted = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        DlogProof forged{generator(gp).pow(Scalar::random(gp, rng), gp),
                         Scalar::random(gp, rng)};
        if (dlog_verify(gp, k.pk, generator(gp), ctx, forged))
            ++accepted;
    }
    // Expect trials/q ~ 909, sigma ~ 28.7; 3 sigma window.
    double expect = double(trials) / 11.0;
    double sigma = std::sqrt(trials * (1.0 / 11.0) * (10.0 / 11.0));
    CHECK(accepted > expect - 3 * sigma);
    CHECK(accepted < expect + 3 * sigma);
}

TEST_CASE("signature and proof encodings roundtrip") {
    GroupParams gp = GroupParams::preset("test16");
    RandomSource rng(27);
    KeyPair k = keygen(gp, rng);
    SchnorrSignature sig = schnorr_sign(gp, k.sk, generator(gp), to_bytes("m"), rng);
    CHECK(SchnorrSignature::decode(gp, sig.encode(gp)) == sig);
    DlogProof proof = dlog_prove(gp, k.sk, generator(gp), to_bytes("c"), rng);
    CHECK(DlogProof::decode(gp, proof.encode(gp)) == proof);
    CHECK_THROWS_AS(SchnorrSignature::decode(gp, Bytes{1, 2, 3}), ParseError);
}
