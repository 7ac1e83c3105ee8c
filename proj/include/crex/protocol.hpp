#pragma once

#include <optional>

#include "crex/transcript.hpp"

namespace crex {

// Misbehavior switches for fault-injection tests. Default: everyone honest.
struct FaultPlan {
    // EA sends this examiner a different partition scheme.
    std::optional<std::uint32_t> preassign_equivocate_examiner;
    // This candidate registers pk * g^s with a proof of s only.
    std::optional<std::uint32_t> biased_candidate_key;
    // This candidate replays its submission ciphertext.
    std::optional<std::uint32_t> candidate_double_submit;
    // An unregistered key also submits a test.
    bool outsider_submission = false;
    // This examiner also sends a mark vector for a column outside its subset.
    std::optional<std::uint32_t> examiner_marks_wrong_subset;
    // This examiner signs mark vectors under g instead of h_E.
    std::optional<std::uint32_t> examiner_signs_with_g;
    // This examiner never submits marks.
    std::optional<std::uint32_t> examiner_silent;
    // EA delivers these two candidates each other's notification package.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> swap_notification_packages;
    // EA tampers one examiner signature inside this candidate's package.
    std::optional<std::uint32_t> tamper_notification_row_sig;
};

struct ExamResult {
    ExamTranscript transcript;
    std::vector<CheckResult> verdicts;
    Phase reached = Phase::PreAssignment;
    bool all_passed = false;
};

// Runs the five phases with a deterministic schedule; every published byte,
// channel message, role secret, and verdict lands in the transcript.
ExamResult run_exam(const RunConfig& config, const FaultPlan& faults = {});

// Replays every signature/proof/receipt/consistency check over a stored
// transcript. Pure function of the transcript bytes.
std::vector<CheckResult> verify_transcript(const ExamTranscript& t);

// Random surjection of examiner slots onto d labels (every label covered).
// Throws UncoveredPartition when m < d.
std::vector<std::uint32_t> draw_label_assignment(std::size_t m, std::size_t d, RandomSource& rng);

// k independent row permutations of [0, n): perms[i][c] is the source
// column shown at shuffled position c of row i.
using RowPermutations = std::vector<std::vector<std::size_t>>;
RowPermutations draw_row_permutations(std::size_t k, std::size_t n, RandomSource& rng);

template <typename Cell>
std::vector<std::vector<Cell>> apply_row_permutations(const std::vector<std::vector<Cell>>& m,
                                                      const RowPermutations& perms) {
    std::vector<std::vector<Cell>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i].resize(m[i].size());
        for (std::size_t c = 0; c < m[i].size(); ++c)
            out[i][c] = m[i][perms[i][c]];
    }
    return out;
}

template <typename Cell>
std::vector<std::vector<Cell>> invert_row_permutations(const std::vector<std::vector<Cell>>& m,
                                                       const RowPermutations& perms) {
    std::vector<std::vector<Cell>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        out[i].resize(m[i].size());
        for (std::size_t c = 0; c < m[i].size(); ++c)
            out[i][perms[i][c]] = m[i][c];
    }
    return out;
}

}  // namespace crex
