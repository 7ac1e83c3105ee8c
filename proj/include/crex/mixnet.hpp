#pragma once

#include <optional>
#include <utility>

#include "crex/kernels.hpp"

namespace crex {

// One server of the exponentiation mixnet chain: raises every element of
// its input column to a secret exponent and permutes the result.
struct MixServer {
    std::size_t index = 0;
    Scalar exponent;                        // r_k in [1, q)
    std::vector<std::size_t> permutation;   // pi_k: input slot -> output slot
};

MixServer make_server(std::size_t index, std::size_t batch_size, const GroupParams& gp,
                      RandomSource& rng);

struct MixEntry {
    GroupElement pk;
    std::optional<DlogProof> proof;
};

struct MixInput {
    std::vector<MixEntry> entries;
    Bytes session_id;
};

struct MixOutput {
    std::vector<GroupElement> pseudonyms;              // h^sk_i, order hidden
    GroupElement h;                                    // g^(r_1 ... r_m)
    std::vector<GroupElement> per_server_generators;   // g^r_1, g^(r_1 r_2), ...
};

// output[pi(i)] = batch[i]^r_k; returns the permuted column and gen_in^r_k.
// Rejects non-member elements (ValidationFailure) and empty batches.
std::pair<std::vector<GroupElement>, GroupElement> mix_step(
    const MixServer& server, std::span<const GroupElement> batch, const GroupElement& gen_in,
    const GroupParams& gp, ExecPolicy policy = ExecPolicy::Auto);

// Plain chain: proofs in the input are ignored.
MixOutput run_chain(std::span<const MixServer> servers, const MixInput& input,
                    const GroupParams& gp, ExecPolicy policy = ExecPolicy::Auto);

// IRemix gate: every entry must carry a valid proof of knowledge of its
// private key, bound to the session id, or the whole batch is rejected —
// no partial output is ever emitted. Returns the bare key list.
std::vector<GroupElement> iremix_validate(const MixInput& input, const GroupParams& gp,
                                          ExecPolicy policy = ExecPolicy::Auto);

// Validation followed by the chain.
MixOutput run_iremix(std::span<const MixServer> servers, const MixInput& input,
                     const GroupParams& gp, ExecPolicy policy = ExecPolicy::Auto);

// Index j with pseudonyms[j] = h^sk; throws NotFound if the key was not in
// the batch.
std::size_t find_own_pseudonym(const GroupParams& gp, const Scalar& sk, const MixOutput& out);
std::optional<std::size_t> try_find_own_pseudonym(const GroupParams& gp, const Scalar& sk,
                                                  const MixOutput& out);

// Notification-time reveal; consumers recompute r = prod r_k mod q.
std::vector<Scalar> reveal_exponents(std::span<const MixServer> servers);
Scalar composite_exponent(std::span<const Scalar> exponents, const GroupParams& gp);

// Total bijection input index -> output index with pseudonym = pk^r_bar;
// throws InconsistentReveal if any pk^r_bar is absent from the output.
std::vector<std::size_t> deanonymize(const GroupParams& gp, std::span<const GroupElement> pks,
                                     const MixOutput& out, const Scalar& r_bar,
                                     ExecPolicy policy = ExecPolicy::Auto);

}  // namespace crex
