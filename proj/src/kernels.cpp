#include "crex/kernels.hpp"

namespace crex {

namespace {

// Below this batch size the omp fork/join overhead exceeds the work.
constexpr std::size_t kParallelThreshold = 32;

bool go_parallel(std::size_t n, ExecPolicy policy) {
    switch (policy) {
        case ExecPolicy::Serial: return false;
        case ExecPolicy::Parallel: return true;
        case ExecPolicy::Auto: return n >= kParallelThreshold;
    }
    return false;
}

}  // namespace

namespace serial {

std::vector<GroupElement> pow_batch(std::span<const GroupElement> bases, const Scalar& exponent,
                                    const GroupParams& gp) {
    std::vector<GroupElement> out(bases.size());
    for (std::size_t i = 0; i < bases.size(); ++i)
        out[i] = bases[i].pow(exponent, gp);
    return out;
}

std::vector<GroupElement> pow_scalars(const GroupElement& base, std::span<const Scalar> exponents,
                                      const GroupParams& gp) {
    std::vector<GroupElement> out(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i)
        out[i] = base.pow(exponents[i], gp);
    return out;
}

std::optional<std::size_t> first_non_member(std::span<const GroupElement> batch,
                                            const GroupParams& gp) {
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (!GroupElement::is_member(batch[i].value(), gp))
            return i;
    return std::nullopt;
}

std::vector<std::uint8_t> verify_dlog_batch(std::span<const GroupElement> keys,
                                            std::span<const DlogProof> proofs,
                                            const GroupElement& gen, BytesView context,
                                            const GroupParams& gp) {
    std::vector<std::uint8_t> ok(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        ok[i] = dlog_verify(gp, keys[i], gen, context, proofs[i]) ? 1 : 0;
    return ok;
}

}  // namespace serial

namespace parallel {

std::vector<GroupElement> pow_batch(std::span<const GroupElement> bases, const Scalar& exponent,
                                    const GroupParams& gp) {
    std::vector<GroupElement> out(bases.size());
    const std::int64_t n = static_cast<std::int64_t>(bases.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = bases[i].pow(exponent, gp);
    return out;
}

std::vector<GroupElement> pow_scalars(const GroupElement& base, std::span<const Scalar> exponents,
                                      const GroupParams& gp) {
    std::vector<GroupElement> out(exponents.size());
    const std::int64_t n = static_cast<std::int64_t>(exponents.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = base.pow(exponents[i], gp);
    return out;
}

std::optional<std::size_t> first_non_member(std::span<const GroupElement> batch,
                                            const GroupParams& gp) {
    std::vector<std::uint8_t> member(batch.size());
    const std::int64_t n = static_cast<std::int64_t>(batch.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        member[i] = GroupElement::is_member(batch[i].value(), gp) ? 1 : 0;
    for (std::size_t i = 0; i < member.size(); ++i)
        if (!member[i])
            return i;
    return std::nullopt;
}

std::vector<std::uint8_t> verify_dlog_batch(std::span<const GroupElement> keys,
                                            std::span<const DlogProof> proofs,
                                            const GroupElement& gen, BytesView context,
                                            const GroupParams& gp) {
    std::vector<std::uint8_t> ok(keys.size());
    const std::int64_t n = static_cast<std::int64_t>(keys.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        ok[i] = dlog_verify(gp, keys[i], gen, context, proofs[i]) ? 1 : 0;
    return ok;
}

}  // namespace parallel

std::vector<GroupElement> pow_batch(std::span<const GroupElement> bases, const Scalar& exponent,
                                    const GroupParams& gp, ExecPolicy policy) {
    return go_parallel(bases.size(), policy) ? parallel::pow_batch(bases, exponent, gp)
                                             : serial::pow_batch(bases, exponent, gp);
}

std::vector<GroupElement> pow_scalars(const GroupElement& base, std::span<const Scalar> exponents,
                                      const GroupParams& gp, ExecPolicy policy) {
    return go_parallel(exponents.size(), policy) ? parallel::pow_scalars(base, exponents, gp)
                                                 : serial::pow_scalars(base, exponents, gp);
}

std::optional<std::size_t> first_non_member(std::span<const GroupElement> batch,
                                            const GroupParams& gp, ExecPolicy policy) {
    return go_parallel(batch.size(), policy) ? parallel::first_non_member(batch, gp)
                                             : serial::first_non_member(batch, gp);
}

std::vector<std::uint8_t> verify_dlog_batch(std::span<const GroupElement> keys,
                                            std::span<const DlogProof> proofs,
                                            const GroupElement& gen, BytesView context,
                                            const GroupParams& gp, ExecPolicy policy) {
    return go_parallel(keys.size(), policy)
               ? parallel::verify_dlog_batch(keys, proofs, gen, context, gp)
               : serial::verify_dlog_batch(keys, proofs, gen, context, gp);
}

}  // namespace crex
