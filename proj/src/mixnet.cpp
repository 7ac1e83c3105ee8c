#include "crex/mixnet.hpp"

#include <map>
#include <set>

#include "crex/errors.hpp"

namespace crex {

MixServer make_server(std::size_t index, std::size_t batch_size, const GroupParams& gp,
                      RandomSource& rng) {
    MixServer s;
    s.index = index;
    s.exponent = Scalar::random_nonzero(gp, rng);
    s.permutation = rng.permutation(batch_size);
    return s;
}

std::pair<std::vector<GroupElement>, GroupElement> mix_step(
    const MixServer& server, std::span<const GroupElement> batch, const GroupElement& gen_in,
    const GroupParams& gp, ExecPolicy policy) {
    if (batch.empty())
        throw Error("mix step on empty batch");
    if (server.permutation.size() != batch.size())
        throw Error("server permutation does not match batch size");
    if (auto bad = first_non_member(batch, gp, policy))
        throw ValidationFailure(*bad, "mix input is not a member of G_q");

    std::vector<GroupElement> powered = pow_batch(batch, server.exponent, gp, policy);
    std::vector<GroupElement> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        out[server.permutation[i]] = powered[i];
    return {std::move(out), gen_in.pow(server.exponent, gp)};
}

MixOutput run_chain(std::span<const MixServer> servers, const MixInput& input,
                    const GroupParams& gp, ExecPolicy policy) {
    if (servers.empty())
        throw Error("mixnet chain needs at least one server");
    std::vector<GroupElement> column;
    column.reserve(input.entries.size());
    for (const MixEntry& e : input.entries)
        column.push_back(e.pk);

    MixOutput out;
    GroupElement gen = generator(gp);
    for (const MixServer& server : servers) {
        auto [next, next_gen] = mix_step(server, column, gen, gp, policy);
        column = std::move(next);
        gen = next_gen;
        out.per_server_generators.push_back(gen);
    }
    out.pseudonyms = std::move(column);
    out.h = gen;
    return out;
}

std::vector<GroupElement> iremix_validate(const MixInput& input, const GroupParams& gp,
                                          ExecPolicy policy) {
    std::set<mpz_class> seen;
    for (std::size_t i = 0; i < input.entries.size(); ++i) {
        if (!seen.insert(input.entries[i].pk.value()).second)
            throw ValidationFailure(i, "duplicate public key in batch");
        if (!input.entries[i].proof)
            throw MissingProof(i);
    }
    std::vector<GroupElement> keys;
    std::vector<DlogProof> proofs;
    keys.reserve(input.entries.size());
    proofs.reserve(input.entries.size());
    for (const MixEntry& e : input.entries) {
        keys.push_back(e.pk);
        proofs.push_back(*e.proof);
    }
    std::vector<std::uint8_t> ok =
        verify_dlog_batch(keys, proofs, generator(gp), input.session_id, gp, policy);
    for (std::size_t i = 0; i < ok.size(); ++i)
        if (!ok[i])
            throw ValidationFailure(i, "key proof does not verify; batch aborted");
    return keys;
}

MixOutput run_iremix(std::span<const MixServer> servers, const MixInput& input,
                     const GroupParams& gp, ExecPolicy policy) {
    iremix_validate(input, gp, policy);
    return run_chain(servers, input, gp, policy);
}

std::optional<std::size_t> try_find_own_pseudonym(const GroupParams& gp, const Scalar& sk,
                                                  const MixOutput& out) {
    GroupElement mine = out.h.pow(sk, gp);
    for (std::size_t j = 0; j < out.pseudonyms.size(); ++j)
        if (out.pseudonyms[j] == mine)
            return j;
    return std::nullopt;
}

std::size_t find_own_pseudonym(const GroupParams& gp, const Scalar& sk, const MixOutput& out) {
    if (auto j = try_find_own_pseudonym(gp, sk, out))
        return *j;
    throw NotFound("no pseudonym matches this key");
}

std::vector<Scalar> reveal_exponents(std::span<const MixServer> servers) {
    std::vector<Scalar> out;
    out.reserve(servers.size());
    for (const MixServer& s : servers)
        out.push_back(s.exponent);
    return out;
}

Scalar composite_exponent(std::span<const Scalar> exponents, const GroupParams& gp) {
    Scalar r = Scalar::reduced(1, gp);
    for (const Scalar& e : exponents)
        r = r.mul(e, gp);
    return r;
}

std::vector<std::size_t> deanonymize(const GroupParams& gp, std::span<const GroupElement> pks,
                                     const MixOutput& out, const Scalar& r_bar,
                                     ExecPolicy policy) {
    std::map<mpz_class, std::vector<std::size_t>> slots;
    for (std::size_t j = 0; j < out.pseudonyms.size(); ++j)
        slots[out.pseudonyms[j].value()].push_back(j);

    std::vector<GroupElement> powered = pow_batch(pks, r_bar, gp, policy);
    std::vector<std::size_t> links(pks.size());
    for (std::size_t i = 0; i < powered.size(); ++i) {
        auto it = slots.find(powered[i].value());
        if (it == slots.end() || it->second.empty())
            throw InconsistentReveal("pk^r does not appear among the pseudonyms");
        links[i] = it->second.back();
        it->second.pop_back();
    }
    return links;
}

}  // namespace crex
