#include <doctest.h>

#include <set>

#include "crex/coercion.hpp"
#include "crex/errors.hpp"

using namespace crex;

namespace {

RunConfig game_config(std::uint64_t seed, std::uint32_t n = 3, std::uint32_t k = 2,
                      std::uint32_t m = 2, std::uint32_t d = 2, bool leak = false) {
    RunConfig cfg;
    cfg.candidates = n;
    cfg.examiners = m;
    cfg.questions = k;
    cfg.partitions = d;
    cfg.mix_servers = 2;
    cfg.seed = seed;
    cfg.remark_answer_leak = leak;
    return cfg;
}

ExamTranscript honest_transcript(std::uint64_t seed) {
    ExamResult res = run_exam(game_config(seed));
    REQUIRE(res.all_passed);
    return std::move(res.transcript);
}

}  // namespace

TEST_CASE("fabricated candidate evidence takes one pair from each shuffled row") {
    ExamTranscript t = honest_transcript(301);
    RandomSource rng(1);
    CandidateEvidence ev = coerce_candidate(t, 0, rng);
    PublicView view = PublicView::from_transcript(t);
    REQUIRE(ev.pairs.size() == view.tpi.rows);
    for (std::size_t i = 0; i < ev.pairs.size(); ++i) {
        bool found = false;
        for (std::uint32_t c = 0; c < view.tpi.cols; ++c)
            found = found || view.tpi.at(i, c) == ev.pairs[i];
        CHECK(found);
    }
    // the revealed key is the candidate's genuine one
    GroupParams gp = GroupParams::preset(t.group_id);
    CHECK(ev.sk == Scalar::decode(gp, t.secret("cand0", "sk")));
}

TEST_CASE("honest candidate evidence is the real submission, present in the matrix") {
    ExamTranscript t = honest_transcript(302);
    RandomSource rng(2);
    CandidateEvidence ev = coerce_candidate(t, 1, rng, /*honest=*/true);
    auto own = wire::decode_list(t.secret("cand1", "submission"));
    auto qs = wire::decode_list(own.at(0));
    auto as = wire::decode_list(own.at(1));
    REQUIRE(ev.pairs.size() == qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i)
        CHECK(ev.pairs[i] == std::pair<Bytes, Bytes>{qs[i], as[i]});
    CHECK(coercer_check(PublicView::from_transcript(t), ev).consistent());
}

TEST_CASE("candidate game: fabricated evidence is consistent and indistinguishable") {
    for (std::uint64_t seed : {311, 312, 313, 314, 315}) {
        ExamTranscript t = honest_transcript(seed);
        RandomSource rng(seed);
        GameReport r = play_candidate_game(t, seed % 3, rng);
        CHECK(r.fake_consistent);
        CHECK(r.indistinguishable);
        CHECK(r.real.consistent());
        CHECK(r.real.checks == r.fake.checks);
    }
}

TEST_CASE("fabricated test equals the real one with probability (1/n)^k") {
    // n = 3, k = 2: expect 1/9 of draws to coincide
    ExamTranscript t = honest_transcript(320);
    RandomSource rng(7);
    CandidateEvidence real = coerce_candidate(t, 0, rng, /*honest=*/true);
    int equal = 0;
    const int trials = 900;
    for (int i = 0; i < trials; ++i)
        if (coerce_candidate(t, 0, rng).pairs == real.pairs)
            ++equal;
    // expectation 100, sigma ~ 9.4; 4-sigma window
    CHECK(equal > 60);
    CHECK(equal < 140);
}

TEST_CASE("evidence citing a pair absent from the matrix is inconsistent") {
    ExamTranscript t = honest_transcript(321);
    RandomSource rng(3);
    CandidateEvidence ev = coerce_candidate(t, 0, rng);
    ev.pairs[0].second = to_bytes("a-never-submitted");
    CheckVector v = coercer_check(PublicView::from_transcript(t), ev);
    CHECK_FALSE(v.consistent());
    bool pair_check_failed = false;
    for (const CheckResult& c : v.checks)
        if (c.name == "pair.row0" && !c.pass)
            pair_check_failed = true;
    CHECK(pair_check_failed);
}

TEST_CASE("an outsider key is flagged by the coercer") {
    ExamTranscript t = honest_transcript(322);
    RandomSource rng(4);
    CandidateEvidence ev = coerce_candidate(t, 0, rng);
    GroupParams gp = GroupParams::preset(t.group_id);
    RandomSource krng(99);
    ev.sk = keygen(gp, krng).sk;  // not a registered key
    CheckVector v = coercer_check(PublicView::from_transcript(t), ev);
    CHECK_FALSE(v.consistent());
}

TEST_CASE("examiner game: decoy label evidence is consistent and indistinguishable") {
    for (std::uint64_t seed : {331, 332, 333}) {
        ExamTranscript t = honest_transcript(seed);
        std::size_t examiner = seed % 2;
        std::string real_label = to_string(t.secret("exam" + std::to_string(examiner), "label"));
        std::string decoy = real_label == "P1" ? "P2" : "P1";
        GameReport r = play_examiner_game(t, examiner, decoy);
        CHECK(r.fake_consistent);
        CHECK(r.indistinguishable);
    }
}

TEST_CASE("decoy evidence covers exactly the decoy subset") {
    ExamTranscript t = honest_transcript(334);
    std::string real_label = to_string(t.secret("exam0", "label"));
    std::string decoy = real_label == "P1" ? "P2" : "P1";
    ExaminerEvidence ev = coerce_examiner(t, 0, decoy);
    PublicView view = PublicView::from_transcript(t);
    const wire::AssignedLabel* l = view.assignment.find_label(decoy);
    REQUIRE(l);
    CHECK(ev.vectors.size() == l->subset.size());
    std::set<std::uint32_t> claimed;
    for (const auto& [col, marks] : ev.vectors) {
        claimed.insert(col);
        CHECK(marks.size() == view.tpi.rows);
    }
    CHECK(claimed == std::set<std::uint32_t>(l->subset.begin(), l->subset.end()));
}

TEST_CASE("claiming the real label as decoy is an error") {
    ExamTranscript t = honest_transcript(335);
    std::string real_label = to_string(t.secret("exam0", "label"));
    CHECK_THROWS_AS(coerce_examiner(t, 0, real_label), Error);
    CHECK_THROWS_AS(coerce_examiner(t, 0, "P9"), NotFound);
}

TEST_CASE("reveals are phase-gated") {
    ExamTranscript t = honest_transcript(336);
    GroupParams gp = GroupParams::preset(t.group_id);
    Scalar sk = pre_notification_reveal(t, "cand0", Phase::Marking);
    CHECK(sk == Scalar::decode(gp, t.secret("cand0", "sk")));
    CHECK_NOTHROW(pre_notification_reveal(t, "exam0", Phase::Testing));
    CHECK_THROWS_AS(pre_notification_reveal(t, "cand0", Phase::Notification), PhaseError);
    CHECK_THROWS_AS(pre_notification_reveal(t, "cand0", Phase::Done), PhaseError);
}

TEST_CASE("the coercer's view stops before notification") {
    ExamTranscript t = honest_transcript(337);
    PublicView v = PublicView::from_transcript(t);
    CHECK(v.leaks.empty());
    // reveals exist in the transcript but not in the pre-notification view
    CHECK(t.find_bb(wire::kRevealAlpha) != nullptr);
    CHECK(t.find_bb(wire::kRevealAlpha, Phase::Notification) == nullptr);
}

TEST_CASE("negative control: a Remark!-style answer leak lets the coercer distinguish") {
    for (std::uint64_t seed : {341, 342, 343}) {
        ExamResult res = run_exam(game_config(seed, 3, 2, 2, 2, /*leak=*/true));
        REQUIRE(res.reached == Phase::Done);
        RandomSource rng(seed);
        GameReport r = play_candidate_game_against_leak(res.transcript, 0, rng);
        CHECK(r.real.consistent());
        CHECK_FALSE(r.fake_consistent);
        CHECK_FALSE(r.indistinguishable);
    }
}

TEST_CASE("the leak check never fires on a C-Rex transcript") {
    ExamTranscript t = honest_transcript(344);
    RandomSource rng(5);
    CHECK_THROWS_AS(play_candidate_game_against_leak(t, 0, rng), Error);
    // and the check vector has no leak entry
    GameReport r = play_candidate_game(t, 0, rng);
    for (const CheckResult& c : r.fake.checks)
        CHECK(c.name != "published.answers.match");
}
