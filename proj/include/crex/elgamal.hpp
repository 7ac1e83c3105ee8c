#pragma once

#include "crex/group.hpp"

namespace crex {

// Hashed-ElGamal KEM + AES-256-GCM body. The key algebra is plain ElGamal
// (shared secret pk^ephemeral), so a pseudonym key PK = h^sk decrypts with
// the same sk that owns g^sk; the DEM carries arbitrary byte payloads.
struct Ciphertext {
    GroupElement ephemeral;  // gen^r
    Bytes body;
    Bytes tag;  // 16-byte GCM tag

    Bytes encode(const GroupParams& gp) const;
    static Ciphertext decode(const GroupParams& gp, BytesView in);

    bool operator==(const Ciphertext&) const = default;
};

Ciphertext encrypt(const GroupParams& gp, const GroupElement& pk, const GroupElement& gen,
                   BytesView msg, RandomSource& rng);

// Throws AuthFailure when the key does not match or the ciphertext was
// tampered with.
Bytes decrypt(const GroupParams& gp, const Scalar& sk, const GroupElement& gen,
              const Ciphertext& ct);

}  // namespace crex
