#pragma once

#include "crex/protocol.hpp"
#include "crex/wire.hpp"

namespace crex {

// Scripted coercion games over stored transcripts. A coercer demands a
// party's real secrets, the party fabricates the rest from public data, and
// the coercer runs every check the bulletin board supports. Resistance
// means the fabricated evidence produces exactly the check vector the real
// evidence does.

// What a coercer can see: the bulletin board up to a phase cut (the games
// run before notification, so reveals are not yet visible).
struct PublicView {
    GroupParams gp;
    Bytes config_bytes;
    std::vector<GroupElement> reg_keys_c, reg_keys_e;  // published input lists
    std::vector<GroupElement> pseudonyms_c, pseudonyms_e;
    GroupElement h_c, h_e;
    wire::TpiPayload tpi;
    wire::Assignment assignment;
    std::vector<wire::AnswerLeak> leaks;  // present only in Remark!-style runs

    static PublicView from_transcript(const ExamTranscript& t,
                                      Phase cutoff = Phase::Notification);
};

struct CandidateEvidence {
    Scalar sk;  // the candidate's real private key
    std::vector<std::pair<Bytes, Bytes>> pairs;  // claimed test, one pair per row
};

struct ExaminerEvidence {
    Scalar sk;          // the examiner's real private key
    std::string label;  // claimed label
    std::vector<std::pair<std::uint32_t, std::vector<Bytes>>> vectors;  // per claimed column
};

// The coerced party hands over their genuine key at or before the given
// phase; at or after notification the game is void (PhaseError).
Scalar pre_notification_reveal(const ExamTranscript& t, std::string_view owner, Phase at_phase);

// Fabricates a test by picking one arbitrary pair from each row of the
// published shuffled matrix; honest = true reveals the real submission.
CandidateEvidence coerce_candidate(const ExamTranscript& t, std::size_t candidate,
                                   RandomSource& rng, bool honest = false);

// Grades a decoy subset locally from the public shuffled matrix and claims
// it as the assigned one; the decoy marks are never submitted to the
// authority. Rejects decoy_label equal to the real assignment. honest =
// true claims the real label with the really submitted vectors.
ExaminerEvidence coerce_examiner(const ExamTranscript& t, std::size_t examiner,
                                 const std::string& decoy_label, bool honest = false);

struct CheckVector {
    std::vector<CheckResult> checks;
    bool consistent() const { return all_passed(checks); }
    bool operator==(const CheckVector&) const = default;
};

// Every check the coercer can run against the public view.
CheckVector coercer_check(const PublicView& view, const CandidateEvidence& evidence);
CheckVector coercer_check(const PublicView& view, const ExaminerEvidence& evidence);

struct GameReport {
    CheckVector real;
    CheckVector fake;
    bool fake_consistent = false;
    bool indistinguishable = false;  // identical check vectors for real and fake
};

GameReport play_candidate_game(const ExamTranscript& t, std::size_t candidate,
                               RandomSource& rng);
GameReport play_examiner_game(const ExamTranscript& t, std::size_t examiner,
                              const std::string& decoy_label);

// Negative control: on a transcript whose authority leaked answers beside
// pseudonyms, the fabricated test (resampled to differ from the real one)
// must be caught while the real evidence passes.
GameReport play_candidate_game_against_leak(const ExamTranscript& t, std::size_t candidate,
                                            RandomSource& rng);

}  // namespace crex
