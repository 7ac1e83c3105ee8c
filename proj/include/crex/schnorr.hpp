#pragma once

#include "crex/group.hpp"

namespace crex {

// Schnorr signature under an arbitrary generator. Long-term keys sign under
// g; pseudonym keys PK = h^sk sign under the mixnet output generator h with
// the same sk. Non-interactive via Fiat-Shamir, key-prefixed challenge.
struct SchnorrSignature {
    GroupElement generator;
    GroupElement commitment;
    Scalar response;

    Bytes encode(const GroupParams& gp) const;
    static SchnorrSignature decode(const GroupParams& gp, BytesView in);

    bool operator==(const SchnorrSignature&) const = default;
};

// Non-interactive proof of knowledge of log_gen(pk), bound to a context
// string (session id, role label) so proofs cannot be replayed across
// batches.
struct DlogProof {
    GroupElement commitment;
    Scalar response;

    Bytes encode(const GroupParams& gp) const;
    static DlogProof decode(const GroupParams& gp, BytesView in);

    bool operator==(const DlogProof&) const = default;
};

// Throws Error on gen = 1 (a degenerate generator would collapse all
// pseudonyms).
SchnorrSignature schnorr_sign(const GroupParams& gp, const Scalar& sk, const GroupElement& gen,
                              BytesView msg, RandomSource& rng);

bool schnorr_verify(const GroupParams& gp, const GroupElement& pk, const GroupElement& gen,
                    BytesView msg, const SchnorrSignature& sig);

DlogProof dlog_prove(const GroupParams& gp, const Scalar& sk, const GroupElement& gen,
                     BytesView context, RandomSource& rng);

bool dlog_verify(const GroupParams& gp, const GroupElement& pk, const GroupElement& gen,
                 BytesView context, const DlogProof& proof);

}  // namespace crex
