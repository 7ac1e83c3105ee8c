#include "crex/protocol.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "crex/errors.hpp"
#include "crex/mixnet.hpp"
#include "crex/rubric.hpp"
#include "crex/wire.hpp"

namespace crex {

std::vector<std::uint32_t> draw_label_assignment(std::size_t m, std::size_t d,
                                                 RandomSource& rng) {
    if (m < d)
        throw UncoveredPartition("fewer examiners (" + std::to_string(m) + ") than partitions (" +
                                 std::to_string(d) + ")");
    std::vector<std::uint32_t> label_of(m);
    std::vector<std::size_t> order = rng.permutation(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i < d)
            label_of[order[i]] = static_cast<std::uint32_t>(i);
        else
            label_of[order[i]] = static_cast<std::uint32_t>(rng.u64_below(d));
    }
    return label_of;
}

RowPermutations draw_row_permutations(std::size_t k, std::size_t n, RandomSource& rng) {
    RowPermutations perms(k);
    for (std::size_t i = 0; i < k; ++i)
        perms[i] = rng.permutation(n);
    return perms;
}

namespace {

using namespace wire;

// Raised after the verdict describing the failure has been recorded.
struct AbortRun {};

struct CandidateRole {
    KeyPair keys;
    RandomSource rng;
    std::size_t pseud_index = 0;
    GroupElement pseudonym;
    std::vector<Bytes> answers;
    Bytes answers_bytes;
    std::optional<ReceiptMsg> receipt;

    explicit CandidateRole(RandomSource r) : rng(std::move(r)) {}
};

struct ExaminerRole {
    KeyPair keys;
    RandomSource rng;
    std::size_t pseud_index = 0;
    GroupElement pseudonym;
    Bytes scheme_bytes;  // the copy this examiner received
    std::string label;
    std::vector<std::uint32_t> subset;

    explicit ExaminerRole(RandomSource r) : rng(std::move(r)) {}
};

struct MixServerRole {
    KeyPair keys;
    RandomSource rng;
    Scalar exp_c, exp_e;
    std::vector<std::size_t> perm_c, perm_e;

    explicit MixServerRole(RandomSource r) : rng(std::move(r)) {}
};

struct AcceptedVector {
    std::vector<Bytes> marks;
    std::string label;
    GroupElement examiner_pseudonym;
    Bytes body;
    Bytes sig;
};

class Simulator {
  public:
    Simulator(const RunConfig& cfg, const FaultPlan& faults)
        : cfg_(cfg), faults_(faults), gp_(GroupParams::preset(cfg.group_id)),
          rubric_(rubric_by_id(cfg.rubric_id)), master_(cfg.seed), ea_rng_(master_.fork("ea")) {
        cfg_.validate();
        if (mpz_class(cfg_.candidates) >= gp_.q || mpz_class(cfg_.examiners) >= gp_.q)
            throw ConfigError("group too small for this many distinct keys");
        t_.group_id = gp_.id;
        t_.hash_id = kHashId;
        t_.config_bytes = encode_record(cfg_.to_record());
    }

    ExamResult run() {
        setup();
        try {
            phase_preassignment();
            phase_registration();
            phase_testing();
            phase_marking();
            phase_notification();
            mark_phase(Phase::Done);
        } catch (const AbortRun&) {
            // failing verdict already recorded
        }
        ExamResult result;
        result.verdicts = verdicts_;
        result.reached = t_.last_phase();
        result.all_passed =
            all_passed(verdicts_) && t_.last_phase() == Phase::Done;
        result.transcript = std::move(t_);
        return result;
    }

  private:
    // ---- transcript plumbing ----

    void mark_phase(Phase p) { t_.items.push_back(PhaseMarker{p}); }

    void bb_post(const std::string& author, const Scalar& sk, Bytes payload, RandomSource& rng) {
        const BBEntry& e = bb_.append(author, std::move(payload), sk, gp_, rng);
        t_.items.push_back(e);
    }

    void send(const std::string& from, const std::string& to, const GroupElement& pk,
              const GroupElement& gen, BytesView plaintext, RandomSource& rng) {
        Ciphertext ct = encrypt(gp_, pk, gen, plaintext, rng);
        t_.items.push_back(ChannelMessage{from, to, ct.encode(gp_)});
    }

    void secret(const std::string& owner, const std::string& kind, Bytes value) {
        t_.items.push_back(SecretRecord{owner, kind, std::move(value)});
    }

    void verdict(const std::string& name, bool pass, const std::string& detail = "") {
        CheckResult c{name, pass, detail};
        verdicts_.push_back(c);
        t_.items.push_back(std::move(c));
    }

    [[noreturn]] void fail_and_abort(const std::string& name, const std::string& detail) {
        verdict(name, false, detail);
        throw AbortRun{};
    }

    // ---- setup ----

    KeyPair distinct_keygen(RandomSource& rng, std::set<mpz_class>& used) {
        for (;;) {
            KeyPair k = keygen(gp_, rng);
            if (used.insert(k.pk.value()).second)
                return k;
        }
    }

    void setup() {
        ea_keys_ = keygen(gp_, ea_rng_);
        alpha_ = Scalar::random_nonzero(gp_, ea_rng_);
        secret("ea", "sk", ea_keys_.sk.encode(gp_));
        secret("ea", "alpha", alpha_.encode(gp_));

        std::set<mpz_class> cand_keys, exam_keys;
        for (std::uint32_t i = 0; i < cfg_.candidates; ++i) {
            cands_.emplace_back(master_.fork("cand" + std::to_string(i)));
            cands_.back().keys = distinct_keygen(cands_.back().rng, cand_keys);
            secret("cand" + std::to_string(i), "sk", cands_.back().keys.sk.encode(gp_));
        }
        for (std::uint32_t j = 0; j < cfg_.examiners; ++j) {
            exams_.emplace_back(master_.fork("exam" + std::to_string(j)));
            exams_.back().keys = distinct_keygen(exams_.back().rng, exam_keys);
            secret("exam" + std::to_string(j), "sk", exams_.back().keys.sk.encode(gp_));
        }
        for (std::uint32_t k = 0; k < cfg_.mix_servers; ++k) {
            mixes_.emplace_back(master_.fork("mix" + std::to_string(k)));
            MixServerRole& m = mixes_.back();
            m.keys = keygen(gp_, m.rng);
            m.exp_c = Scalar::random_nonzero(gp_, m.rng);
            m.perm_c = m.rng.permutation(cfg_.candidates);
            m.exp_e = Scalar::random_nonzero(gp_, m.rng);
            m.perm_e = m.rng.permutation(cfg_.examiners);
            std::string owner = "mix" + std::to_string(k);
            secret(owner, "exponent.C", m.exp_c.encode(gp_));
            secret(owner, "perm.C", perm_bytes(m.perm_c));
            secret(owner, "exponent.E", m.exp_e.encode(gp_));
            secret(owner, "perm.E", perm_bytes(m.perm_e));
        }

        Roster roster;
        roster.ea_pk = ea_keys_.pk;
        for (const MixServerRole& m : mixes_)
            roster.mix_pks.push_back(m.keys.pk);
        bb_post("ea", ea_keys_.sk, encode_roster(roster, gp_), ea_rng_);
    }

    static Bytes perm_bytes(const std::vector<std::size_t>& perm) {
        std::vector<std::uint32_t> v(perm.begin(), perm.end());
        return encode_indices(v);
    }

    // ---- pre-assignment ----

    SchemeBody make_scheme() {
        SchemeBody s;
        s.columns = cfg_.candidates;
        std::vector<std::size_t> shuffled = ea_rng_.permutation(cfg_.candidates);
        std::size_t base = cfg_.candidates / cfg_.partitions;
        std::size_t extra = cfg_.candidates % cfg_.partitions;
        std::size_t at = 0;
        for (std::uint32_t l = 0; l < cfg_.partitions; ++l) {
            std::size_t take = base + (l < extra ? 1 : 0);
            std::vector<std::uint32_t> subset;
            for (std::size_t i = 0; i < take; ++i)
                subset.push_back(static_cast<std::uint32_t>(shuffled[at++]));
            std::sort(subset.begin(), subset.end());
            s.labels.push_back("P" + std::to_string(l + 1));
            s.subsets.push_back(std::move(subset));
        }
        return s;
    }

    void phase_preassignment() {
        mark_phase(Phase::PreAssignment);
        scheme_ = make_scheme();
        scheme_bytes_ = encode_scheme(scheme_);
        secret("ea", "partition.scheme", scheme_bytes_);

        // EA -> examiners over secure channels; the equivocation fault hands
        // one examiner a scheme with different labels
        for (std::uint32_t j = 0; j < cfg_.examiners; ++j) {
            Bytes bytes = scheme_bytes_;
            if (faults_.preassign_equivocate_examiner == j) {
                SchemeBody forged = scheme_;
                forged.labels[0] = "PX";
                bytes = encode_scheme(forged);
            }
            SchnorrSignature sig =
                schnorr_sign(gp_, ea_keys_.sk, generator(gp_), bytes, ea_rng_);
            SignedScheme msg{bytes, sig.encode(gp_)};
            send("ea", "exam" + std::to_string(j), exams_[j].keys.pk, generator(gp_),
                 encode_signed_scheme(msg), ea_rng_);
            exams_[j].scheme_bytes = bytes;
        }

        // examiners endorse the copy they received
        std::vector<SchemeEndorsement> endorsements;
        for (std::uint32_t j = 0; j < cfg_.examiners; ++j) {
            ExaminerRole& e = exams_[j];
            SchnorrSignature sig =
                schnorr_sign(gp_, e.keys.sk, generator(gp_), e.scheme_bytes, e.rng);
            SchemeEndorsement end{j, sig.encode(gp_)};
            send("exam" + std::to_string(j), "ea", ea_keys_.pk, generator(gp_),
                 encode_scheme_endorsement(end), e.rng);
            endorsements.push_back(std::move(end));
        }

        // EA redistributes the endorsements; every examiner checks all of
        // them against its own copy
        Bytes bundle = encode_endorsement_bundle(endorsements);
        std::vector<std::vector<std::uint32_t>> complaints(cfg_.examiners);
        for (std::uint32_t v = 0; v < cfg_.examiners; ++v) {
            send("ea", "exam" + std::to_string(v), exams_[v].keys.pk, generator(gp_), bundle,
                 ea_rng_);
            for (const SchemeEndorsement& end : endorsements) {
                SchnorrSignature sig = SchnorrSignature::decode(gp_, end.sig);
                if (!schnorr_verify(gp_, exams_[end.examiner].keys.pk, generator(gp_),
                                    exams_[v].scheme_bytes, sig))
                    complaints[v].push_back(end.examiner);
            }
        }

        // attribute divergence: group examiners by received-scheme digest,
        // the largest class (ties toward lower index) is canonical
        std::map<Bytes, std::vector<std::uint32_t>> classes;
        for (std::uint32_t j = 0; j < cfg_.examiners; ++j) {
            Digest d = sha256(exams_[j].scheme_bytes);
            classes[Bytes(d.begin(), d.end())].push_back(j);
        }
        if (classes.size() > 1) {
            const std::vector<std::uint32_t>* canonical = nullptr;
            for (const auto& [digest, members] : classes)
                if (!canonical || members.size() > canonical->size() ||
                    (members.size() == canonical->size() &&
                     members.front() < canonical->front()))
                    canonical = &members;
            for (const auto& [digest, members] : classes)
                if (&members != canonical)
                    fail_and_abort("preassign.crosscheck",
                                   "examiner " + std::to_string(members.front()) +
                                       " received a different scheme");
        }
        for (std::uint32_t v = 0; v < cfg_.examiners; ++v)
            if (!complaints[v].empty())
                fail_and_abort("preassign.crosscheck",
                               "examiner " + std::to_string(v) + " rejected an endorsement");
        verdict("preassign.crosscheck", true);
    }

    // ---- registration ----

    MixInput collect_keys(const std::string& role) {
        MixInput in;
        in.session_id = session_id(t_.config_bytes, role);
        if (role == "C") {
            for (std::uint32_t i = 0; i < cfg_.candidates; ++i) {
                CandidateRole& c = cands_[i];
                if (faults_.biased_candidate_key == i) {
                    Scalar s = Scalar::random_nonzero(gp_, c.rng);
                    GroupElement biased = c.keys.pk.mul(generator(gp_).pow(s, gp_), gp_);
                    in.entries.push_back(
                        {biased, dlog_prove(gp_, s, generator(gp_), in.session_id, c.rng)});
                } else {
                    in.entries.push_back(
                        {c.keys.pk,
                         dlog_prove(gp_, c.keys.sk, generator(gp_), in.session_id, c.rng)});
                }
            }
        } else {
            for (ExaminerRole& e : exams_)
                in.entries.push_back(
                    {e.keys.pk, dlog_prove(gp_, e.keys.sk, generator(gp_), in.session_id, e.rng)});
        }
        return in;
    }

    // runs validation and, when it passes, the chain, posting every column
    std::optional<MixOutput> mix_session(const std::string& role, const MixInput& in) {
        RegInput reg;
        reg.role = role;
        for (const MixEntry& e : in.entries) {
            reg.keys.push_back(e.pk);
            reg.proofs.push_back(*e.proof);
        }
        bb_post("ea", ea_keys_.sk, encode_reg_input(reg, gp_), ea_rng_);

        try {
            iremix_validate(in, gp_);
        } catch (const Error& err) {
            verdict("registration.validate." + role, false, err.what());
            return std::nullopt;
        }
        verdict("registration.validate." + role, true);

        std::vector<GroupElement> column = reg.keys;
        GroupElement gen = generator(gp_);
        MixOutput out;
        for (std::uint32_t k = 0; k < cfg_.mix_servers; ++k) {
            MixServerRole& m = mixes_[k];
            MixServer server{k, role == "C" ? m.exp_c : m.exp_e,
                             role == "C" ? m.perm_c : m.perm_e};
            auto [next, next_gen] = mix_step(server, column, gen, gp_);
            column = std::move(next);
            gen = next_gen;
            out.per_server_generators.push_back(gen);
            MixColumn payload{role, k, column, gen};
            bb_post("mix" + std::to_string(k), m.keys.sk, encode_mix_column(payload, gp_),
                    m.rng);
        }
        out.pseudonyms = column;
        out.h = gen;
        return out;
    }

    void phase_registration() {
        mark_phase(Phase::Registration);
        auto out_c = mix_session("C", collect_keys("C"));
        auto out_e = mix_session("E", collect_keys("E"));
        if (!out_c || !out_e)
            throw AbortRun{};
        out_c_ = *out_c;
        out_e_ = *out_e;

        for (std::uint32_t i = 0; i < cfg_.candidates; ++i) {
            CandidateRole& c = cands_[i];
            auto idx = try_find_own_pseudonym(gp_, c.keys.sk, out_c_);
            if (!idx)
                fail_and_abort("registration.locate.cand" + std::to_string(i), "no pseudonym");
            c.pseud_index = *idx;
            c.pseudonym = out_c_.pseudonyms[*idx];
            verdict("registration.locate.cand" + std::to_string(i), true);
        }
        for (std::uint32_t j = 0; j < cfg_.examiners; ++j) {
            ExaminerRole& e = exams_[j];
            auto idx = try_find_own_pseudonym(gp_, e.keys.sk, out_e_);
            if (!idx)
                fail_and_abort("registration.locate.exam" + std::to_string(j), "no pseudonym");
            e.pseud_index = *idx;
            e.pseudonym = out_e_.pseudonyms[*idx];
            verdict("registration.locate.exam" + std::to_string(j), true);
        }
    }

    // ---- testing ----

    void phase_testing() {
        mark_phase(Phase::Testing);
        std::vector<Bytes> qs;
        for (std::uint32_t i = 0; i < cfg_.questions; ++i)
            qs.push_back(to_bytes("q" + std::to_string(i + 1) + ":" + hex_encode(ea_rng_.bytes(3))));
        questions_ = qs;
        questions_bytes_ = encode_list(qs);

        SchnorrSignature qsig =
            schnorr_sign(gp_, ea_keys_.sk, generator(gp_), questions_bytes_, ea_rng_);
        QuestionsMsg qmsg{questions_bytes_, qsig.encode(gp_)};
        for (const GroupElement& pseud : out_c_.pseudonyms) {
            Ciphertext ct = encrypt(gp_, pseud, out_c_.h, encode_questions_msg(qmsg), ea_rng_);
            bb_post("ea", ea_keys_.sk,
                    encode_sealed(kQuestions, {pseud, ct.encode(gp_)}, gp_), ea_rng_);
        }

        // candidates pick up their questions and submit
        std::vector<Bytes> submit_cts(cfg_.candidates);
        for (std::uint32_t i = 0; i < cfg_.candidates; ++i) {
            CandidateRole& c = cands_[i];
            std::string name = "testing.distribute.cand" + std::to_string(i);
            const BBEntry* mine = nullptr;
            for (const BBEntry* e : t_.find_bb_all(kQuestions))
                if (decode_sealed(kQuestions, gp_, e->payload).pseudonym == c.pseudonym)
                    mine = e;
            if (!mine)
                fail_and_abort(name, "no bulletin entry for own pseudonym");
            QuestionsMsg got;
            try {
                SealedToPseudonym sealed = decode_sealed(kQuestions, gp_, mine->payload);
                Bytes plain =
                    decrypt(gp_, c.keys.sk, out_c_.h, Ciphertext::decode(gp_, sealed.ciphertext));
                got = decode_questions_msg(plain);
            } catch (const Error& err) {
                fail_and_abort(name, err.what());
            }
            if (!schnorr_verify(gp_, ea_keys_.pk, generator(gp_), got.questions,
                                SchnorrSignature::decode(gp_, got.ea_sig)))
                fail_and_abort(name, "authority signature on questions is invalid");
            verdict(name, true);

            c.answers.clear();
            for (std::uint32_t r = 0; r < cfg_.questions; ++r)
                c.answers.push_back(to_bytes("a-" + hex_encode(c.rng.bytes(3))));
            c.answers_bytes = encode_list(c.answers);
            secret("cand" + std::to_string(i), "submission",
                   encode_list({got.questions, c.answers_bytes}));

            SubmitBody body{got.questions, c.answers_bytes, c.pseudonym};
            Bytes body_bytes = encode_submit_body(body, gp_);
            SchnorrSignature sig = schnorr_sign(gp_, c.keys.sk, out_c_.h, body_bytes, c.rng);
            SubmitMsg msg{body_bytes, sig.encode(gp_)};
            Bytes plain = encode_submit_msg(msg);
            Ciphertext ct = encrypt(gp_, ea_keys_.pk, generator(gp_), plain, c.rng);
            submit_cts[i] = ct.encode(gp_);
            t_.items.push_back(ChannelMessage{"cand" + std::to_string(i), "ea", submit_cts[i]});
        }
        if (faults_.candidate_double_submit)
            t_.items.push_back(
                ChannelMessage{"cand" + std::to_string(*faults_.candidate_double_submit), "ea",
                               submit_cts[*faults_.candidate_double_submit]});
        if (faults_.outsider_submission) {
            RandomSource orng = master_.fork("outsider");
            KeyPair outsider = keygen(gp_, orng);
            GroupElement fake_pseud = out_c_.h.pow(outsider.sk, gp_);
            SubmitBody body{questions_bytes_, encode_list({to_bytes("a-ffffff")}), fake_pseud};
            Bytes body_bytes = encode_submit_body(body, gp_);
            SchnorrSignature sig = schnorr_sign(gp_, outsider.sk, out_c_.h, body_bytes, orng);
            Bytes plain = encode_submit_msg(SubmitMsg{body_bytes, sig.encode(gp_)});
            Ciphertext ct = encrypt(gp_, ea_keys_.pk, generator(gp_), plain, orng);
            t_.items.push_back(ChannelMessage{"outsider", "ea", ct.encode(gp_)});
        }

        // EA collects submissions in delivery order. Copy the inbox first:
        // recording verdicts appends to the transcript and would invalidate
        // pointers into it.
        std::vector<ChannelMessage> inbox;
        for (const ChannelMessage* m : t_.channel("", "ea"))
            inbox.push_back(*m);
        submissions_.assign(cfg_.candidates, std::nullopt);
        std::set<std::size_t> seen_pseuds;
        std::size_t msg_no = 0;
        for (const ChannelMessage& m : inbox) {
            Bytes plain;
            try {
                plain = decrypt(gp_, ea_keys_.sk, generator(gp_),
                                Ciphertext::decode(gp_, m.ciphertext));
            } catch (const Error&) {
                continue;  // not addressed to EA's long-term key
            }
            Record outer = decode_record(plain);
            if (outer.tag != "msg.submit")
                continue;
            ++msg_no;
            std::string name = "testing.submission." + m.from + "#" + std::to_string(msg_no);
            SubmitMsg msg = decode_submit_msg(plain);
            SubmitBody body = decode_submit_body(gp_, msg.body);
            auto slot = std::find_if(out_c_.pseudonyms.begin(), out_c_.pseudonyms.end(),
                                     [&](const GroupElement& p) { return p == body.pseudonym; });
            if (slot == out_c_.pseudonyms.end()) {
                verdict(name, false, "rejected: pseudonym is not a registered candidate");
                continue;
            }
            std::size_t j = static_cast<std::size_t>(slot - out_c_.pseudonyms.begin());
            if (body.questions != questions_bytes_) {
                verdict(name, false, "rejected: question list mismatch");
                continue;
            }
            if (!schnorr_verify(gp_, body.pseudonym, out_c_.h, msg.body,
                                SchnorrSignature::decode(gp_, msg.sig))) {
                verdict(name, false, "rejected: signature under h_C fails");
                continue;
            }
            if (seen_pseuds.contains(j)) {
                verdict(name, true, "duplicate submission ignored; first accepted wins");
                continue;
            }
            seen_pseuds.insert(j);
            submissions_[j] = body;
            verdict(name, true);
        }

        if (cfg_.remark_answer_leak) {
            for (std::size_t j = 0; j < out_c_.pseudonyms.size(); ++j)
                if (submissions_[j]) {
                    AnswerLeak leak{out_c_.pseudonyms[j], submissions_[j]->questions,
                                    submissions_[j]->answers};
                    bb_post("ea", ea_keys_.sk, encode_answer_leak(leak, gp_), ea_rng_);
                }
        }

        for (std::size_t j = 0; j < out_c_.pseudonyms.size(); ++j)
            if (!submissions_[j])
                fail_and_abort("testing.complete",
                               "no submission for pseudonym slot " + std::to_string(j));
        verdict("testing.complete", true);

        // receipts, encrypted to the pseudonym
        for (std::size_t j = 0; j < out_c_.pseudonyms.size(); ++j) {
            Scalar digest = receipt_digest(gp_, submissions_[j]->questions,
                                           submissions_[j]->answers, out_c_.pseudonyms[j], alpha_);
            SchnorrSignature rsig =
                schnorr_sign(gp_, ea_keys_.sk, generator(gp_), digest.encode(gp_), ea_rng_);
            ReceiptMsg receipt{digest, rsig.encode(gp_)};
            std::size_t owner = owner_of_pseudonym(j);
            send("ea", "cand" + std::to_string(owner), out_c_.pseudonyms[j], out_c_.h,
                 encode_receipt_msg(receipt, gp_), ea_rng_);
        }
        for (std::uint32_t i = 0; i < cfg_.candidates; ++i) {
            CandidateRole& c = cands_[i];
            std::string name = "testing.receipt.cand" + std::to_string(i);
            auto msgs = t_.channel("ea", "cand" + std::to_string(i));
            ReceiptMsg receipt;
            bool got = false;
            for (auto it = msgs.rbegin(); it != msgs.rend() && !got; ++it) {
                try {
                    Bytes plain = decrypt(gp_, c.keys.sk, out_c_.h,
                                          Ciphertext::decode(gp_, (*it)->ciphertext));
                    Record r = decode_record(plain);
                    if (r.tag != "msg.receipt")
                        continue;
                    receipt = decode_receipt_msg(gp_, plain);
                    got = true;
                } catch (const Error&) {
                }
            }
            if (!got)
                fail_and_abort(name, "no receipt received");
            if (!schnorr_verify(gp_, ea_keys_.pk, generator(gp_), receipt.digest.encode(gp_),
                                SchnorrSignature::decode(gp_, receipt.ea_sig)))
                fail_and_abort(name, "authority signature on receipt is invalid");
            c.receipt = receipt;
            secret("cand" + std::to_string(i), "receipt", encode_receipt_msg(receipt, gp_));
            verdict(name, true);
        }
    }

    std::size_t owner_of_pseudonym(std::size_t j) const {
        for (std::size_t i = 0; i < cands_.size(); ++i)
            if (cands_[i].pseud_index == j)
                return i;
        throw NotFound("pseudonym slot has no owner");
    }

    // ---- marking ----

    void phase_marking() {
        mark_phase(Phase::Marking);
        const std::size_t n = cfg_.candidates, k = cfg_.questions;

        // T: column j is the test of pseudonym slot j
        std::vector<std::vector<std::pair<Bytes, Bytes>>> T(k);
        for (std::size_t i = 0; i < k; ++i) {
            T[i].resize(n);
            for (std::size_t j = 0; j < n; ++j)
                T[i][j] = {questions_[i], decode_list(submissions_[j]->answers)[i]};
        }
        pi_ = draw_row_permutations(k, n, ea_rng_);
        {
            Record pr("perm.set");
            for (const auto& row : pi_)
                pr.add(perm_bytes(row));
            secret("ea", "pi", encode_record(pr));
        }
        auto tpi_cells = apply_row_permutations(T, pi_);

        tpi_.rows = static_cast<std::uint32_t>(k);
        tpi_.cols = static_cast<std::uint32_t>(n);
        tpi_.pairs.clear();
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < n; ++c)
                tpi_.pairs.push_back(tpi_cells[i][c]);
        SchnorrSignature tsig =
            schnorr_sign(gp_, ea_keys_.sk, generator(gp_), tpi_signable(tpi_), ea_rng_);
        tpi_.signature = tsig.encode(gp_);
        bb_post("ea", ea_keys_.sk, encode_tpi(tpi_), ea_rng_);
        verdict("marking.tpi.published", true);

        // assignment: a surjection examiner-pseudonym -> label
        std::vector<std::uint32_t> label_of_slot =
            draw_label_assignment(cfg_.examiners, cfg_.partitions, ea_rng_);
        assignment_.labels.clear();
        for (std::uint32_t l = 0; l < cfg_.partitions; ++l) {
            AssignedLabel al;
            al.label = scheme_.labels[l];
            al.subset = scheme_.subsets[l];
            for (std::size_t slot = 0; slot < label_of_slot.size(); ++slot)
                if (label_of_slot[slot] == l)
                    al.examiner_pseudonyms.push_back(out_e_.pseudonyms[slot]);
            assignment_.labels.push_back(std::move(al));
        }
        bb_post("ea", ea_keys_.sk, encode_assignment(assignment_, gp_), ea_rng_);
        bool covered = true;
        for (const AssignedLabel& al : assignment_.labels)
            covered = covered && !al.examiner_pseudonyms.empty();
        verdict("marking.assign.coverage", covered);

        // examiners read their label and grade their subset
        for (std::uint32_t j = 0; j < cfg_.examiners; ++j) {
            ExaminerRole& e = exams_[j];
            const AssignedLabel* mine = assignment_.label_of(e.pseudonym);
            std::string name = "marking.assignment.exam" + std::to_string(j);
            if (!mine)
                fail_and_abort(name, "own pseudonym not assigned a label");
            e.label = mine->label;
            e.subset = mine->subset;
            secret("exam" + std::to_string(j), "label", to_bytes(e.label));
            verdict(name, true);

            if (faults_.examiner_silent == j)
                continue;
            std::vector<std::uint32_t> to_mark = e.subset;
            if (faults_.examiner_marks_wrong_subset == j) {
                for (std::uint32_t c = 0; c < cfg_.candidates; ++c)
                    if (std::find(e.subset.begin(), e.subset.end(), c) == e.subset.end()) {
                        to_mark.push_back(c);
                        break;
                    }
            }
            Record submitted("exam.marks");
            for (std::uint32_t c : to_mark) {
                std::vector<Bytes> marks;
                for (std::size_t i = 0; i < k; ++i) {
                    const auto& [q, a] = tpi_.at(i, c);
                    marks.push_back(rubric_(q, a));
                }
                MarkBody body{encode_list(marks), encode_indices(e.subset)};
                Bytes body_bytes = encode_mark_body(body);
                const GroupElement& gen =
                    faults_.examiner_signs_with_g == j ? generator(gp_) : out_e_.h;
                SchnorrSignature sig = schnorr_sign(gp_, e.keys.sk, gen, body_bytes, e.rng);
                MarkMsg msg{c, e.pseudonym, body_bytes, sig.encode(gp_)};
                Bytes plain = encode_mark_msg(msg, gp_);
                Ciphertext ct = encrypt(gp_, ea_keys_.pk, generator(gp_), plain, e.rng);
                t_.items.push_back(
                    ChannelMessage{"exam" + std::to_string(j), "ea", ct.encode(gp_)});
                Record colrec("col.marks");
                colrec.add_u32(c).add(encode_list(marks));
                submitted.add(encode_record(colrec));
            }
            secret("exam" + std::to_string(j), "marks.submitted", encode_record(submitted));
        }

        // EA validates mark vectors; first accepted wins per column. Copy
        // the inbox: verdicts append to the transcript.
        std::vector<ChannelMessage> inbox;
        for (const ChannelMessage* m : t_.channel("", "ea"))
            inbox.push_back(*m);
        accepted_.assign(n, std::nullopt);
        std::size_t msg_no = 0;
        for (const ChannelMessage& m : inbox) {
            Bytes plain;
            try {
                plain = decrypt(gp_, ea_keys_.sk, generator(gp_),
                                Ciphertext::decode(gp_, m.ciphertext));
            } catch (const Error&) {
                continue;
            }
            Record outer = decode_record(plain);
            if (outer.tag != "msg.mark")
                continue;
            ++msg_no;
            MarkMsg msg = decode_mark_msg(gp_, plain);
            std::string name = "marking.vector." + m.from + ".col" + std::to_string(msg.column) +
                               "#" + std::to_string(msg_no);
            if (!std::count(out_e_.pseudonyms.begin(), out_e_.pseudonyms.end(),
                            msg.examiner_pseudonym)) {
                verdict(name, false, "rejected: pseudonym is not an authenticated examiner");
                continue;
            }
            const AssignedLabel* al = assignment_.label_of(msg.examiner_pseudonym);
            if (!al) {
                verdict(name, false, "rejected: examiner has no assigned label");
                continue;
            }
            MarkBody body = decode_mark_body(msg.body);
            if (decode_indices(body.subset) != al->subset) {
                verdict(name, false, "rejected: claimed subset differs from the assignment");
                continue;
            }
            if (!std::count(al->subset.begin(), al->subset.end(), msg.column)) {
                verdict(name, false, "rejected: column outside the assigned subset");
                continue;
            }
            if (!schnorr_verify(gp_, msg.examiner_pseudonym, out_e_.h, msg.body,
                                SchnorrSignature::decode(gp_, msg.sig))) {
                verdict(name, false, "rejected: signature under h_E fails");
                continue;
            }
            std::vector<Bytes> marks = decode_list(body.marks);
            if (marks.size() != k) {
                verdict(name, false, "rejected: wrong number of marks");
                continue;
            }
            if (accepted_[msg.column]) {
                verdict(name, true, "duplicate vector ignored; first accepted wins");
                continue;
            }
            accepted_[msg.column] =
                AcceptedVector{marks, al->label, msg.examiner_pseudonym, msg.body, msg.sig};
            verdict(name, true);
        }
    }

    // ---- notification ----

    void phase_notification() {
        mark_phase(Phase::Notification);
        const std::size_t n = cfg_.candidates, k = cfg_.questions;
        for (std::size_t c = 0; c < n; ++c)
            if (!accepted_[c])
                fail_and_abort("notify.coverage",
                               "no accepted mark vector for shuffled column " + std::to_string(c));
        verdict("notify.coverage", true);

        // build each pseudonym's package: row i of slot j came from shuffled
        // column c with pi[i][c] = j
        std::vector<std::vector<std::size_t>> inv(k, std::vector<std::size_t>(n));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < n; ++c)
                inv[i][pi_[i][c]] = c;

        std::vector<Bytes> cores(n);
        for (std::size_t j = 0; j < n; ++j) {
            NotifCore core;
            core.pseudonym = out_c_.pseudonyms[j];
            for (std::size_t i = 0; i < k; ++i) {
                std::size_t c = inv[i][j];
                const AcceptedVector& av = *accepted_[c];
                NotifRow row{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(c),
                             av.marks[i], av.label, av.examiner_pseudonym, av.body, av.sig};
                core.rows.push_back(encode_notif_row(row, gp_));
            }
            cores[j] = encode_notif_core(core, gp_);
        }
        if (faults_.tamper_notification_row_sig) {
            std::size_t j = cands_[*faults_.tamper_notification_row_sig].pseud_index;
            NotifCore core = decode_notif_core(gp_, cores[j]);
            NotifRow row = decode_notif_row(gp_, core.rows[0]);
            SchnorrSignature sig = SchnorrSignature::decode(gp_, row.sig);
            sig.response = sig.response.add(Scalar::reduced(1, gp_), gp_);
            row.sig = sig.encode(gp_);
            core.rows[0] = encode_notif_row(row, gp_);
            cores[j] = encode_notif_core(core, gp_);
        }
        if (faults_.swap_notification_packages) {
            auto [a, b] = *faults_.swap_notification_packages;
            std::swap(cores[cands_[a].pseud_index], cores[cands_[b].pseud_index]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            SchnorrSignature sig =
                schnorr_sign(gp_, ea_keys_.sk, generator(gp_), cores[j], ea_rng_);
            NotifPackage pkg{cores[j], sig.encode(gp_)};
            Ciphertext ct =
                encrypt(gp_, out_c_.pseudonyms[j], out_c_.h, encode_notif_package(pkg), ea_rng_);
            bb_post("ea", ea_keys_.sk, encode_sealed(kNotif, {out_c_.pseudonyms[j], ct.encode(gp_)}, gp_),
                    ea_rng_);
        }

        // candidate-side mix servers reveal their secret exponents; alpha
        // is revealed by the authority
        for (std::uint32_t s = 0; s < cfg_.mix_servers; ++s)
            bb_post("mix" + std::to_string(s), mixes_[s].keys.sk,
                    encode_reveal_exponent({"C", s, mixes_[s].exp_c}, gp_), mixes_[s].rng);
        bb_post("ea", ea_keys_.sk, encode_reveal_alpha(alpha_, gp_), ea_rng_);

        // anonymity of the candidates is revoked; EA registers the marks
        {
            std::vector<Scalar> exps;
            for (const MixServerRole& m : mixes_)
                exps.push_back(m.exp_c);
            Scalar r_bar = composite_exponent(exps, gp_);
            std::vector<GroupElement> input_keys;
            for (const CandidateRole& c : cands_)
                input_keys.push_back(c.keys.pk);
            try {
                std::vector<std::size_t> links = deanonymize(gp_, input_keys, out_c_, r_bar);
                Record reg("registered.marks");
                for (std::size_t i = 0; i < cands_.size(); ++i) {
                    std::vector<Bytes> marks;
                    for (std::size_t row = 0; row < k; ++row)
                        marks.push_back(accepted_[inv[row][links[i]]]->marks[row]);
                    Record cm("cand.marks");
                    cm.add_u32(static_cast<std::uint32_t>(i)).add(encode_list(marks));
                    reg.add(encode_record(cm));
                }
                secret("ea", "registered.marks", encode_record(reg));
                verdict("notify.registered.marks", true);
            } catch (const Error& err) {
                fail_and_abort("notify.registered.marks", err.what());
            }
        }

        // candidates verify their notification and their receipt
        for (std::uint32_t i = 0; i < cfg_.candidates; ++i)
            candidate_verify(i);
    }

    void candidate_verify(std::uint32_t i) {
        CandidateRole& c = cands_[i];
        std::string name = "notify.candidate_verify.cand" + std::to_string(i);
        auto fail = [&](const std::string& why) { verdict(name, false, why); };

        const BBEntry* mine = nullptr;
        for (const BBEntry* e : t_.find_bb_all(kNotif))
            if (decode_sealed(kNotif, gp_, e->payload).pseudonym == c.pseudonym)
                mine = e;
        if (!mine)
            return fail("no notification entry for own pseudonym");
        NotifCore core;
        NotifPackage pkg;
        try {
            SealedToPseudonym sealed = decode_sealed(kNotif, gp_, mine->payload);
            Bytes plain =
                decrypt(gp_, c.keys.sk, out_c_.h, Ciphertext::decode(gp_, sealed.ciphertext));
            pkg = decode_notif_package(plain);
            core = decode_notif_core(gp_, pkg.core);
        } catch (const Error& err) {
            return fail(err.what());
        }
        if (!schnorr_verify(gp_, ea_keys_.pk, generator(gp_), pkg.core,
                            SchnorrSignature::decode(gp_, pkg.ea_sig)))
            return fail("authority signature on package is invalid");
        if (!(core.pseudonym == c.pseudonym))
            return fail("package names a different pseudonym");
        if (core.rows.size() != cfg_.questions)
            return fail("package has the wrong number of rows");

        for (std::size_t r = 0; r < core.rows.size(); ++r) {
            NotifRow row;
            SchnorrSignature row_sig;
            try {
                row = decode_notif_row(gp_, core.rows[r]);
                row_sig = SchnorrSignature::decode(gp_, row.sig);
            } catch (const Error& err) {
                return fail("examiner signature evidence is malformed: " +
                            std::string(err.what()));
            }
            if (row.row != r)
                return fail("row index mismatch");
            if (!std::count(out_e_.pseudonyms.begin(), out_e_.pseudonyms.end(),
                            row.examiner_pseudonym))
                return fail("marking pseudonym is not an authenticated examiner");
            const AssignedLabel* al = assignment_.find_label(row.label);
            if (!al)
                return fail("row cites an unknown label");
            if (!std::count(al->examiner_pseudonyms.begin(), al->examiner_pseudonyms.end(),
                            row.examiner_pseudonym))
                return fail("examiner is not assigned the cited label");
            MarkBody body = decode_mark_body(row.body);
            if (decode_indices(body.subset) != al->subset)
                return fail("signed subset differs from the assignment");
            if (!std::count(al->subset.begin(), al->subset.end(), row.column))
                return fail("cited column is outside the label's subset");
            if (!schnorr_verify(gp_, row.examiner_pseudonym, out_e_.h, row.body, row_sig))
                return fail("examiner signature on the mark vector is invalid");
            const auto& [q, a] = tpi_.at(r, row.column);
            if (q != questions_[r] || a != c.answers[r])
                return fail("cited shuffled cell does not hold this candidate's pair");
            std::vector<Bytes> colmarks = decode_list(body.marks);
            if (colmarks.size() != cfg_.questions)
                return fail("signed column vector has the wrong number of marks");
            if (row.mark != colmarks[r])
                return fail("row mark differs from the signed column vector");
        }

        // receipt check with the revealed alpha
        const BBEntry* alpha_entry = t_.find_bb(kRevealAlpha);
        if (!alpha_entry)
            return fail("alpha was never revealed");
        Scalar alpha = decode_reveal_alpha(gp_, alpha_entry->payload);
        if (!c.receipt)
            return fail("no receipt held");
        Scalar digest =
            receipt_digest(gp_, questions_bytes_, c.answers_bytes, c.pseudonym, alpha);
        if (!(digest == c.receipt->digest))
            return fail("receipt digest does not match the submitted test");
        if (!schnorr_verify(gp_, ea_keys_.pk, generator(gp_), c.receipt->digest.encode(gp_),
                            SchnorrSignature::decode(gp_, c.receipt->ea_sig)))
            return fail("authority signature on receipt is invalid");
        verdict(name, true);
    }

    // ---- state ----

    RunConfig cfg_;
    FaultPlan faults_;
    GroupParams gp_;
    RubricFn rubric_;
    RandomSource master_;
    RandomSource ea_rng_;

    ExamTranscript t_;
    BulletinBoard bb_;
    std::vector<CheckResult> verdicts_;

    KeyPair ea_keys_;
    Scalar alpha_;
    std::vector<CandidateRole> cands_;
    std::vector<ExaminerRole> exams_;
    std::vector<MixServerRole> mixes_;

    MixOutput out_c_, out_e_;
    SchemeBody scheme_;
    Bytes scheme_bytes_;
    std::vector<Bytes> questions_;
    Bytes questions_bytes_;
    std::vector<std::optional<SubmitBody>> submissions_;  // by pseudonym slot
    RowPermutations pi_;
    TpiPayload tpi_;
    Assignment assignment_;
    std::vector<std::optional<AcceptedVector>> accepted_;  // by shuffled column
};

}  // namespace

ExamResult run_exam(const RunConfig& config, const FaultPlan& faults) {
    Simulator sim(config, faults);
    return sim.run();
}

}  // namespace crex
