#pragma once

#include <optional>
#include <span>
#include <vector>

#include "crex/schnorr.hpp"

namespace crex {

// Batch kernels for the data-parallel inner loops: raising a whole mix
// column to a server exponent, membership screening, and checking a batch
// of key proofs. Each kernel has a serial reference implementation and an
// OpenMP one producing bit-identical output (fixed output slots, no shared
// state); the serial path is the oracle in tests and the baseline in the
// benchmark.

enum class ExecPolicy { Serial, Parallel, Auto };

namespace serial {

std::vector<GroupElement> pow_batch(std::span<const GroupElement> bases, const Scalar& exponent,
                                    const GroupParams& gp);

std::vector<GroupElement> pow_scalars(const GroupElement& base, std::span<const Scalar> exponents,
                                      const GroupParams& gp);

// Index of the first non-member, if any.
std::optional<std::size_t> first_non_member(std::span<const GroupElement> batch,
                                            const GroupParams& gp);

// Per-entry verdicts for a batch of dlog proofs over a common generator and
// context.
std::vector<std::uint8_t> verify_dlog_batch(std::span<const GroupElement> keys,
                                            std::span<const DlogProof> proofs,
                                            const GroupElement& gen, BytesView context,
                                            const GroupParams& gp);

}  // namespace serial

namespace parallel {

std::vector<GroupElement> pow_batch(std::span<const GroupElement> bases, const Scalar& exponent,
                                    const GroupParams& gp);

std::vector<GroupElement> pow_scalars(const GroupElement& base, std::span<const Scalar> exponents,
                                      const GroupParams& gp);

std::optional<std::size_t> first_non_member(std::span<const GroupElement> batch,
                                            const GroupParams& gp);

std::vector<std::uint8_t> verify_dlog_batch(std::span<const GroupElement> keys,
                                            std::span<const DlogProof> proofs,
                                            const GroupElement& gen, BytesView context,
                                            const GroupParams& gp);

}  // namespace parallel

// Dispatching fronts; Auto picks the parallel path for batches past a size
// threshold.
std::vector<GroupElement> pow_batch(std::span<const GroupElement> bases, const Scalar& exponent,
                                    const GroupParams& gp, ExecPolicy policy = ExecPolicy::Auto);

std::vector<GroupElement> pow_scalars(const GroupElement& base, std::span<const Scalar> exponents,
                                      const GroupParams& gp, ExecPolicy policy = ExecPolicy::Auto);

std::optional<std::size_t> first_non_member(std::span<const GroupElement> batch,
                                            const GroupParams& gp,
                                            ExecPolicy policy = ExecPolicy::Auto);

std::vector<std::uint8_t> verify_dlog_batch(std::span<const GroupElement> keys,
                                            std::span<const DlogProof> proofs,
                                            const GroupElement& gen, BytesView context,
                                            const GroupParams& gp,
                                            ExecPolicy policy = ExecPolicy::Auto);

}  // namespace crex
