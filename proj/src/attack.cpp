#include "crex/attack.hpp"

#include <map>
#include <optional>
#include <set>

#include "crex/errors.hpp"

namespace crex {

namespace {

struct OpCounter {
    std::uint64_t* sink;
    void exp(std::uint64_t n = 1) {
        if (sink) *sink += n;
    }
    void mul(std::uint64_t n = 1) {
        if (sink) *sink += n;
    }
};

InjectionPlan forge_avoiding(const GroupParams& gp, const GroupElement& target_pk,
                             std::size_t target, const std::set<mpz_class>& avoid,
                             RandomSource& rng, OpCounter ops) {
    for (;;) {
        Scalar s = Scalar::random(gp, rng);
        if (s.is_zero())
            continue;  // degenerate: injected == target, search relation voids
        GroupElement offset = generator(gp).pow(s, gp);
        ops.exp();
        GroupElement injected = target_pk.mul(offset, gp);
        ops.mul();
        if (avoid.contains(injected.value()))
            continue;
        return InjectionPlan{target, s, injected};
    }
}

// Candidate (pseudonym slot, injected-partner slot) pairs satisfying the
// search relation for one target.
std::vector<std::pair<std::size_t, std::size_t>> relation_candidates(
    const GroupParams& gp, std::span<const GroupElement> L_prime,
    const std::map<mpz_class, std::size_t>& slot_of, const GroupElement& g_r, const Scalar& s,
    OpCounter ops) {
    GroupElement t = g_r.pow(s, gp);
    ops.exp();
    std::vector<std::pair<std::size_t, std::size_t>> found;
    for (std::size_t j = 0; j < L_prime.size(); ++j) {
        GroupElement v = t.mul(L_prime[j], gp);
        ops.mul();
        auto it = slot_of.find(v.value());
        if (it != slot_of.end())
            found.push_back({j, it->second});
    }
    return found;
}

std::map<mpz_class, std::size_t> index_output(std::span<const GroupElement> L_prime) {
    std::map<mpz_class, std::size_t> slot_of;
    for (std::size_t j = 0; j < L_prime.size(); ++j)
        slot_of[L_prime[j].value()] = j;
    return slot_of;
}

constexpr std::size_t kMaxSessions = 512;

}  // namespace

InjectionPlan forge_injection(const GroupParams& gp, std::span<const GroupElement> L,
                              std::size_t target, RandomSource& rng, std::uint64_t* group_ops) {
    if (target >= L.size())
        throw Error("injection target out of range");
    std::set<mpz_class> avoid;
    for (const GroupElement& e : L)
        avoid.insert(e.value());
    return forge_avoiding(gp, L[target], target, avoid, rng, OpCounter{group_ops});
}

std::size_t locate_target(const GroupParams& gp, std::span<const GroupElement> L_prime,
                          const GroupElement& g_r, const InjectionPlan& plan,
                          std::uint64_t* group_ops) {
    auto slot_of = index_output(L_prime);
    auto found =
        relation_candidates(gp, L_prime, slot_of, g_r, plan.s, OpCounter{group_ops});
    if (found.empty())
        throw NotFound("no output element satisfies the search relation");
    if (found.size() > 1)
        throw Ambiguous("the search relation holds for " + std::to_string(found.size()) +
                        " output pairs");
    return found[0].first;
}

LinkageResult full_linkage(const GroupParams& gp, std::span<const GroupElement> L,
                           const MixOracle& oracle, RandomSource& rng, LinkageMode mode) {
    const std::size_t n = L.size();
    LinkageResult result;
    result.links.assign(n, 0);
    OpCounter ops{&result.group_ops};

    if (mode == LinkageMode::PerTarget) {
        for (std::size_t i = 0; i < n; ++i) {
            for (;;) {
                if (result.sessions >= kMaxSessions)
                    throw Error("linkage did not converge");
                InjectionPlan plan = forge_injection(gp, L, i, rng, &result.group_ops);
                std::vector<GroupElement> batch(L.begin(), L.end());
                batch.push_back(plan.injected);
                MixOutput out = oracle(batch);
                ++result.sessions;
                try {
                    result.links[i] =
                        locate_target(gp, out.pseudonyms, out.h, plan, &result.group_ops);
                    break;
                } catch (const Ambiguous&) {
                    // fresh s, fresh session
                }
            }
        }
        return result;
    }

    // Single session: inject one offset element per target, then resolve all
    // relations against one output list. The links form a bijection, so a
    // resolved target claims both its pseudonym slot and its injected
    // partner slot; candidates touching claimed slots are discarded. If the
    // constraint propagation stalls, the whole session is retried with
    // fresh offsets.
    for (;;) {
        if (result.sessions >= kMaxSessions)
            throw Error("linkage did not converge");
        std::set<mpz_class> avoid;
        for (const GroupElement& e : L)
            avoid.insert(e.value());
        std::vector<InjectionPlan> plans;
        std::vector<GroupElement> batch(L.begin(), L.end());
        plans.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            InjectionPlan plan = forge_avoiding(gp, L[i], i, avoid, rng, ops);
            avoid.insert(plan.injected.value());
            batch.push_back(plan.injected);
            plans.push_back(std::move(plan));
        }
        MixOutput out = oracle(batch);
        ++result.sessions;

        auto slot_of = index_output(out.pseudonyms);
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> candidates(n);
        for (std::size_t i = 0; i < n; ++i)
            candidates[i] =
                relation_candidates(gp, out.pseudonyms, slot_of, out.h, plans[i].s, ops);

        std::vector<std::optional<std::size_t>> resolved(n);
        std::vector<bool> claimed(out.pseudonyms.size(), false);
        bool dead_end = false;
        for (bool progress = true; progress;) {
            progress = false;
            for (std::size_t i = 0; i < n && !dead_end; ++i) {
                if (resolved[i])
                    continue;
                auto& cs = candidates[i];
                std::erase_if(cs, [&](const auto& c) {
                    return claimed[c.first] || claimed[c.second];
                });
                if (cs.empty()) {
                    dead_end = true;  // sound propagation never strands a target
                } else if (cs.size() == 1) {
                    resolved[i] = cs[0].first;
                    claimed[cs[0].first] = true;
                    claimed[cs[0].second] = true;
                    progress = true;
                }
            }
        }
        bool complete = !dead_end;
        for (std::size_t i = 0; i < n && complete; ++i)
            complete = resolved[i].has_value();
        if (complete) {
            for (std::size_t i = 0; i < n; ++i)
                result.links[i] = *resolved[i];
            return result;
        }
    }
}

IremixAttackOutcome attack_iremix(const GroupParams& gp, const MixInput& honest_batch,
                                  std::size_t target, RandomSource& rng) {
    std::vector<GroupElement> keys;
    keys.reserve(honest_batch.entries.size());
    for (const MixEntry& e : honest_batch.entries)
        keys.push_back(e.pk);
    InjectionPlan plan = forge_injection(gp, keys, target, rng);

    // Try the statements the adversary can actually prove: knowledge of s
    // alone, then a blind forgery. Neither speaks for log_g(L[t] * g^s).
    std::vector<std::pair<const char*, DlogProof>> attempts;
    attempts.emplace_back(
        "proof of s only",
        dlog_prove(gp, plan.s, generator(gp), honest_batch.session_id, rng));
    attempts.emplace_back("random forgery",
                          DlogProof{generator(gp).pow(Scalar::random_nonzero(gp, rng), gp),
                                    Scalar::random(gp, rng)});

    for (auto& [name, proof] : attempts) {
        MixInput tainted = honest_batch;
        tainted.entries.push_back({plan.injected, proof});
        try {
            iremix_validate(tainted, gp);
            return {false, std::string("validation accepted a ") + name};
        } catch (const ValidationFailure&) {
            // rejected: no output batch is emitted for this attempt
        } catch (const MissingProof&) {
        }
    }
    return {true, "all injection attempts rejected; no output emitted"};
}

}  // namespace crex
