#pragma once

#include <functional>

#include "crex/mixnet.hpp"

namespace crex {

// Injection adversary against the plain exponentiation mixnet: submits
// L[target] * g^s alongside the honest batch, then searches the output for
// the pair related by (g^r)^s. group_ops counts the adversary's modular
// exponentiations and multiplications only.

struct InjectionPlan {
    std::size_t target_index = 0;
    Scalar s;               // retained privately by the adversary
    GroupElement injected;  // L[target] * g^s
};

struct LinkageResult {
    std::vector<std::size_t> links;  // input index -> output index
    std::uint64_t group_ops = 0;
    std::size_t sessions = 0;  // mix runs consumed (ambiguity retries included)
};

enum class LinkageMode {
    SingleSession,  // inject all n offsets into one mix run
    PerTarget,      // one mix run per target
};

// Runs the plain (non-IRemix) chain on a supplied batch. Each call is a
// fresh mix session with fresh server secrets.
using MixOracle = std::function<MixOutput(const std::vector<GroupElement>&)>;

// Draws s until the injected element is distinct from every element of
// `avoid` (degenerate s = 0 and collisions void the search relation).
// Knowing the single element L[target] suffices; the external-attacker
// variant passes a one-element avoid list.
InjectionPlan forge_injection(const GroupParams& gp, std::span<const GroupElement> L,
                              std::size_t target, RandomSource& rng,
                              std::uint64_t* group_ops = nullptr);

// Searches L' for the j with (g_r)^s * L'[j] also in L'; that L'[j] is the
// target's pseudonym. Throws Ambiguous when several j qualify and NotFound
// when none does.
std::size_t locate_target(const GroupParams& gp, std::span<const GroupElement> L_prime,
                          const GroupElement& g_r, const InjectionPlan& plan,
                          std::uint64_t* group_ops = nullptr);

// Complete linkage of L to the final session's output; links form a
// bijection. Ambiguous sessions are retried with fresh s; all attempts'
// group operations are counted and all sessions are reported.
LinkageResult full_linkage(const GroupParams& gp, std::span<const GroupElement> L,
                           const MixOracle& oracle, RandomSource& rng,
                           LinkageMode mode = LinkageMode::SingleSession);

struct IremixAttackOutcome {
    bool blocked = false;
    std::string detail;
};

// The same injection attempted against the validated mixnet. The adversary
// cannot prove knowledge of log_g(L[target] * g^s), so the gate rejects the
// whole batch; Blocked is the expected outcome.
IremixAttackOutcome attack_iremix(const GroupParams& gp, const MixInput& honest_batch,
                                  std::size_t target, RandomSource& rng);

}  // namespace crex
