#include <algorithm>
#include <map>
#include <set>

#include "crex/errors.hpp"
#include "crex/mixnet.hpp"
#include "crex/protocol.hpp"
#include "crex/wire.hpp"

// Replay verification: re-runs every signature, proof, receipt, and
// consistency check a stored transcript supports. Works purely off the
// transcript bytes, so running it twice yields identical verdicts.

namespace crex {

namespace {

using namespace wire;

class Verifier {
  public:
    explicit Verifier(const ExamTranscript& t) : t_(t) {}

    std::vector<CheckResult> run() {
        if (!guarded("header.config", [&] { load_header(); }))
            return checks_;
        guarded("bb.appendonly", [&] { check_append_only(); });
        guarded("bb.roster", [&] { load_roster(); });
        check_bb_signatures();
        for (const char* role : {"C", "E"})
            guarded(std::string("reg.proofs.") + role, [&, role] { check_reg_proofs(role); });
        for (const char* role : {"C", "E"})
            guarded(std::string("mix.chain.") + role, [&, role] { check_mix_chain(role); });
        guarded("reveal.exponents", [&] { check_reveal(); });
        guarded("alpha.reveal", [&] { check_alpha_revealed(); });
        guarded("submissions", [&] { check_submissions(); });
        guarded("tpi.sig", [&] { check_tpi_sig(); });
        guarded("tpi.rows", [&] { check_tpi_rows(); });
        guarded("tpi.matches.permutation", [&] { check_tpi_permutation(); });
        guarded("assign.coverage", [&] { check_assignment(); });
        guarded("marks.signatures", [&] { check_marks(); });
        for (std::uint32_t i = 0; i < cfg_.candidates; ++i)
            guarded("notif.package.cand" + std::to_string(i), [&, i] { check_package(i); });
        guarded("registered.marks", [&] { check_registered_marks(); });
        return checks_;
    }

  private:
    struct CheckFailed {
        std::string why;
    };

    template <typename Fn>
    bool guarded(const std::string& name, Fn fn) {
        try {
            fn();
            checks_.push_back({name, true, ""});
            return true;
        } catch (const CheckFailed& f) {
            checks_.push_back({name, false, f.why});
        } catch (const Error& e) {
            checks_.push_back({name, false, e.what()});
        }
        return false;
    }

    [[noreturn]] static void fail(const std::string& why) { throw CheckFailed{why}; }

    void load_header() {
        cfg_ = t_.config();
        cfg_.validate();
        gp_ = GroupParams::preset(cfg_.group_id);
        if (gp_.id != t_.group_id)
            fail("header group id does not match the config");
        if (t_.hash_id != kHashId)
            fail("unsupported hash id '" + t_.hash_id + "'");
        gp_.validate();
    }

    void check_append_only() {
        std::uint64_t next = 0;
        for (const BBEntry* e : t_.bb())
            if (e->seq != next++)
                fail("bulletin sequence jumps at " + std::to_string(e->seq));
    }

    void load_roster() {
        const BBEntry* e = t_.find_bb(kRoster);
        if (!e)
            fail("no roster entry");
        roster_ = decode_roster(gp_, e->payload);
        if (roster_.mix_pks.size() != cfg_.mix_servers)
            fail("roster lists the wrong number of mix servers");
    }

    const GroupElement* author_key(const std::string& author) const {
        if (author == "ea")
            return &roster_.ea_pk;
        if (author.rfind("mix", 0) == 0) {
            std::size_t idx = std::stoul(author.substr(3));
            if (idx < roster_.mix_pks.size())
                return &roster_.mix_pks[idx];
        }
        return nullptr;
    }

    void check_bb_signatures() {
        for (const BBEntry* e : t_.bb()) {
            guarded("bb.sig." + std::to_string(e->seq), [&] {
                const GroupElement* pk = author_key(e->author);
                if (!pk)
                    fail("unknown author '" + e->author + "'");
                SchnorrSignature sig = SchnorrSignature::decode(gp_, e->signature);
                if (!schnorr_verify(gp_, *pk, generator(gp_),
                                    BulletinBoard::signable(e->seq, e->author, e->payload), sig))
                    fail("author signature does not verify");
            });
        }
    }

    RegInput reg_input(const std::string& role) const {
        for (const BBEntry* e : t_.find_bb_all(kRegInput)) {
            RegInput in = decode_reg_input(gp_, e->payload);
            if (in.role == role)
                return in;
        }
        throw CheckFailed{"no registration input for role " + role};
    }

    void check_reg_proofs(const std::string& role) {
        RegInput in = reg_input(role);
        Bytes sid = session_id(t_.config_bytes, role);
        for (std::size_t i = 0; i < in.keys.size(); ++i)
            if (!dlog_verify(gp_, in.keys[i], generator(gp_), sid, in.proofs[i]))
                fail("entry " + std::to_string(i) + " has an invalid key proof");
    }

    std::vector<MixColumn> columns_of(const std::string& role) const {
        std::vector<MixColumn> out;
        for (const BBEntry* e : t_.find_bb_all(kMixColumn)) {
            MixColumn c = decode_mix_column(gp_, e->payload);
            if (c.role == role)
                out.push_back(std::move(c));
        }
        return out;
    }

    // recompute the chain from the servers' recorded session secrets
    void check_mix_chain(const std::string& role) {
        RegInput in = reg_input(role);
        std::vector<MixColumn> columns = columns_of(role);
        if (columns.size() != cfg_.mix_servers)
            fail("expected " + std::to_string(cfg_.mix_servers) + " columns, found " +
                 std::to_string(columns.size()));
        std::vector<GroupElement> column = in.keys;
        GroupElement gen = generator(gp_);
        Scalar r_bar = Scalar::reduced(1, gp_);
        for (std::uint32_t k = 0; k < cfg_.mix_servers; ++k) {
            std::string owner = "mix" + std::to_string(k);
            Scalar r = Scalar::decode(gp_, t_.secret(owner, "exponent." + role));
            std::vector<std::uint32_t> perm32 =
                decode_indices(t_.secret(owner, "perm." + role));
            MixServer server{k, r, std::vector<std::size_t>(perm32.begin(), perm32.end())};
            auto [next, next_gen] = mix_step(server, column, gen, gp_);
            column = std::move(next);
            gen = next_gen;
            r_bar = r_bar.mul(r, gp_);
            if (columns[k].server != k)
                fail("column " + std::to_string(k) + " published out of order");
            if (!(columns[k].column == column) || !(columns[k].gen == gen))
                fail("published column " + std::to_string(k) +
                     " does not match the recorded server secrets");
        }
        // pseudonym multiset equals {pk^r}
        std::multiset<mpz_class> expect, got;
        for (const GroupElement& pk : in.keys)
            expect.insert(pk.pow(r_bar, gp_).value());
        for (const GroupElement& p : column)
            got.insert(p.value());
        if (expect != got)
            fail("pseudonym multiset does not equal the powered input keys");
    }

    void check_reveal() {
        auto reveals = t_.find_bb_all(kRevealExponent);
        if (reveals.size() != cfg_.mix_servers)
            fail("expected " + std::to_string(cfg_.mix_servers) + " exponent reveals");
        GroupElement gen = generator(gp_);
        for (const BBEntry* e : reveals) {
            RevealExponent r = decode_reveal_exponent(gp_, e->payload);
            if (r.role != "C")
                fail("unexpected reveal role " + r.role);
            Scalar recorded =
                Scalar::decode(gp_, t_.secret("mix" + std::to_string(r.server), "exponent.C"));
            if (!(recorded == r.exponent))
                fail("revealed exponent differs from the server's session secret");
            gen = gen.pow(r.exponent, gp_);
        }
        std::vector<MixColumn> columns = columns_of("C");
        if (columns.empty() || !(columns.back().gen == gen))
            fail("g^(prod r) does not reproduce the published h_C");
    }

    void check_alpha_revealed() {
        if (!t_.find_bb(kRevealAlpha))
            fail("alpha was never revealed");
    }

    GroupElement h_of(const std::string& role) const {
        std::vector<MixColumn> columns = columns_of(role);
        if (columns.empty())
            throw CheckFailed{"no mix columns for role " + role};
        return columns.back().gen;
    }

    std::vector<GroupElement> pseudonyms_of(const std::string& role) const {
        std::vector<MixColumn> columns = columns_of(role);
        if (columns.empty())
            throw CheckFailed{"no mix columns for role " + role};
        return columns.back().column;
    }

    Scalar ea_sk() const { return Scalar::decode(gp_, t_.secret("ea", "sk")); }

    // EA-side acceptance rules replayed over the recorded channel traffic
    void check_submissions() {
        GroupElement h_c = h_of("C");
        std::vector<GroupElement> pseuds = pseudonyms_of("C");
        submissions_.assign(pseuds.size(), std::nullopt);
        Scalar sk = ea_sk();
        Bytes issued_questions;
        if (const BBEntry* q = t_.find_bb(kQuestions)) {
            SealedToPseudonym sealed = decode_sealed(kQuestions, gp_, q->payload);
            // the question list itself is sealed; recover it below from any
            // accepted submission instead
            (void)sealed;
        }
        std::size_t accepted = 0;
        for (const ChannelMessage* m : t_.channel("", "ea")) {
            Bytes plain;
            try {
                plain = decrypt(gp_, sk, generator(gp_), Ciphertext::decode(gp_, m->ciphertext));
            } catch (const Error&) {
                continue;
            }
            Record outer = decode_record(plain);
            if (outer.tag != "msg.submit")
                continue;
            SubmitMsg msg = decode_submit_msg(plain);
            SubmitBody body = decode_submit_body(gp_, msg.body);
            auto slot = std::find(pseuds.begin(), pseuds.end(), body.pseudonym);
            if (slot == pseuds.end())
                continue;
            if (!schnorr_verify(gp_, body.pseudonym, h_c, msg.body,
                                SchnorrSignature::decode(gp_, msg.sig)))
                fail("a stored submission signature does not verify");
            std::size_t j = static_cast<std::size_t>(slot - pseuds.begin());
            if (!submissions_[j]) {
                submissions_[j] = body;
                ++accepted;
            }
        }
        if (accepted != pseuds.size())
            fail("only " + std::to_string(accepted) + " of " + std::to_string(pseuds.size()) +
                 " submissions verify");
    }

    TpiPayload tpi() const {
        const BBEntry* e = t_.find_bb(kTpi);
        if (!e)
            throw CheckFailed{"no shuffled matrix on the bulletin board"};
        return decode_tpi(e->payload);
    }

    void check_tpi_sig() {
        TpiPayload p = tpi();
        if (!schnorr_verify(gp_, roster_.ea_pk, generator(gp_), tpi_signable(p),
                            SchnorrSignature::decode(gp_, p.signature)))
            fail("authority signature on the shuffled matrix does not verify");
    }

    void check_tpi_rows() {
        TpiPayload p = tpi();
        if (submissions_.empty())
            fail("no verified submissions to compare against");
        for (std::uint32_t i = 0; i < p.rows; ++i) {
            std::multiset<std::pair<Bytes, Bytes>> expect, got;
            for (std::size_t j = 0; j < submissions_.size(); ++j) {
                if (!submissions_[j])
                    fail("submission missing for slot " + std::to_string(j));
                auto qs = decode_list(submissions_[j]->questions);
                auto as = decode_list(submissions_[j]->answers);
                expect.insert({qs.at(i), as.at(i)});
            }
            for (std::uint32_t c = 0; c < p.cols; ++c)
                got.insert(p.at(i, c));
            if (expect != got)
                fail("row " + std::to_string(i) + " is not a permutation of the submitted pairs");
        }
    }

    RowPermutations recorded_pi() const {
        Record pr = decode_record(t_.secret("ea", "pi"));
        if (pr.tag != "perm.set")
            throw CheckFailed{"bad permutation secret"};
        RowPermutations pi;
        for (const Bytes& row : pr.fields) {
            std::vector<std::uint32_t> p32 = decode_indices(row);
            pi.emplace_back(p32.begin(), p32.end());
        }
        return pi;
    }

    void check_tpi_permutation() {
        TpiPayload p = tpi();
        RowPermutations pi = recorded_pi();
        if (pi.size() != p.rows)
            fail("permutation row count mismatch");
        for (std::uint32_t i = 0; i < p.rows; ++i)
            for (std::uint32_t c = 0; c < p.cols; ++c) {
                const SubmitBody& body = *submissions_.at(pi[i][c]);
                auto qs = decode_list(body.questions);
                auto as = decode_list(body.answers);
                if (p.at(i, c) != std::pair<Bytes, Bytes>{qs.at(i), as.at(i)})
                    fail("shuffled cell (" + std::to_string(i) + "," + std::to_string(c) +
                         ") does not equal the permuted source column");
            }
    }

    Assignment assignment() const {
        const BBEntry* e = t_.find_bb(kAssign);
        if (!e)
            throw CheckFailed{"no assignment on the bulletin board"};
        return decode_assignment(gp_, e->payload);
    }

    void check_assignment() {
        Assignment a = assignment();
        if (a.labels.size() != cfg_.partitions)
            fail("wrong number of labels");
        std::set<std::uint32_t> covered;
        for (const AssignedLabel& l : a.labels) {
            if (l.examiner_pseudonyms.empty())
                fail("label " + l.label + " has no examiner");
            for (std::uint32_t c : l.subset)
                if (!covered.insert(c).second)
                    fail("column " + std::to_string(c) + " appears in two subsets");
        }
        if (covered.size() != cfg_.candidates)
            fail("subsets do not cover every shuffled column");
    }

    void check_marks() {
        GroupElement h_e = h_of("E");
        std::vector<GroupElement> pseuds = pseudonyms_of("E");
        Assignment a = assignment();
        Scalar sk = ea_sk();
        accepted_.assign(cfg_.candidates, std::nullopt);
        for (const ChannelMessage* m : t_.channel("", "ea")) {
            Bytes plain;
            try {
                plain = decrypt(gp_, sk, generator(gp_), Ciphertext::decode(gp_, m->ciphertext));
            } catch (const Error&) {
                continue;
            }
            Record outer = decode_record(plain);
            if (outer.tag != "msg.mark")
                continue;
            MarkMsg msg = decode_mark_msg(gp_, plain);
            if (!std::count(pseuds.begin(), pseuds.end(), msg.examiner_pseudonym))
                continue;
            const AssignedLabel* al = a.label_of(msg.examiner_pseudonym);
            if (!al)
                continue;
            MarkBody body = decode_mark_body(msg.body);
            if (decode_indices(body.subset) != al->subset)
                continue;
            if (!std::count(al->subset.begin(), al->subset.end(), msg.column))
                continue;
            if (!schnorr_verify(gp_, msg.examiner_pseudonym, h_e, msg.body,
                                SchnorrSignature::decode(gp_, msg.sig)))
                fail("a stored mark vector signature does not verify");
            if (!accepted_[msg.column])
                accepted_[msg.column] = msg;
        }
        for (std::size_t c = 0; c < accepted_.size(); ++c)
            if (!accepted_[c])
                fail("no acceptable mark vector for column " + std::to_string(c));
    }

    void check_package(std::uint32_t i) {
        GroupElement h_c = h_of("C");
        std::vector<GroupElement> pseuds_c = pseudonyms_of("C");
        std::vector<GroupElement> pseuds_e = pseudonyms_of("E");
        Assignment a = assignment();
        TpiPayload p = tpi();
        Scalar sk = Scalar::decode(gp_, t_.secret("cand" + std::to_string(i), "sk"));
        GroupElement pseudonym = h_c.pow(sk, gp_);

        const BBEntry* mine = nullptr;
        for (const BBEntry* e : t_.find_bb_all(kNotif))
            if (decode_sealed(kNotif, gp_, e->payload).pseudonym == pseudonym)
                mine = e;
        if (!mine)
            fail("no notification entry for this candidate's pseudonym");
        SealedToPseudonym sealed = decode_sealed(kNotif, gp_, mine->payload);
        Bytes plain = decrypt(gp_, sk, h_c, Ciphertext::decode(gp_, sealed.ciphertext));
        NotifPackage pkg = decode_notif_package(plain);
        if (!schnorr_verify(gp_, roster_.ea_pk, generator(gp_), pkg.core,
                            SchnorrSignature::decode(gp_, pkg.ea_sig)))
            fail("authority signature on the package does not verify");
        NotifCore core = decode_notif_core(gp_, pkg.core);
        if (!(core.pseudonym == pseudonym))
            fail("package names a different pseudonym");
        if (core.rows.size() != cfg_.questions)
            fail("package has the wrong number of rows");

        std::vector<Bytes> own = decode_list(t_.secret("cand" + std::to_string(i), "submission"));
        std::vector<Bytes> own_questions = decode_list(own.at(0));
        std::vector<Bytes> own_answers = decode_list(own.at(1));

        for (std::size_t r = 0; r < core.rows.size(); ++r) {
            NotifRow row = decode_notif_row(gp_, core.rows[r]);
            if (row.row != r)
                fail("row index mismatch");
            if (!std::count(pseuds_e.begin(), pseuds_e.end(), row.examiner_pseudonym))
                fail("marking pseudonym is not an authenticated examiner");
            const AssignedLabel* al = a.find_label(row.label);
            if (!al || !std::count(al->examiner_pseudonyms.begin(), al->examiner_pseudonyms.end(),
                                   row.examiner_pseudonym))
                fail("examiner is not assigned the cited label");
            MarkBody body = decode_mark_body(row.body);
            if (decode_indices(body.subset) != al->subset ||
                !std::count(al->subset.begin(), al->subset.end(), row.column))
                fail("cited column is outside the signed subset");
            if (!schnorr_verify(gp_, row.examiner_pseudonym, h_of("E"), row.body,
                                SchnorrSignature::decode(gp_, row.sig)))
                fail("examiner signature on the mark vector does not verify");
            if (p.at(r, row.column) !=
                std::pair<Bytes, Bytes>{own_questions.at(r), own_answers.at(r)})
                fail("cited shuffled cell does not hold this candidate's pair");
            std::vector<Bytes> colmarks = decode_list(body.marks);
            if (colmarks.size() != cfg_.questions || row.mark != colmarks[r])
                fail("row mark differs from the signed column vector");
        }

        const BBEntry* alpha_entry = t_.find_bb(kRevealAlpha);
        if (!alpha_entry)
            fail("alpha was never revealed");
        Scalar alpha = decode_reveal_alpha(gp_, alpha_entry->payload);
        ReceiptMsg receipt =
            decode_receipt_msg(gp_, t_.secret("cand" + std::to_string(i), "receipt"));
        Scalar digest = receipt_digest(gp_, own.at(0), own.at(1), pseudonym, alpha);
        if (!(digest == receipt.digest))
            fail("receipt digest does not match the submitted test");
        if (!schnorr_verify(gp_, roster_.ea_pk, generator(gp_), receipt.digest.encode(gp_),
                            SchnorrSignature::decode(gp_, receipt.ea_sig)))
            fail("authority signature on the receipt does not verify");
    }

    void check_registered_marks() {
        RegInput in = reg_input("C");
        std::vector<GroupElement> pseuds = pseudonyms_of("C");
        Scalar r_bar = Scalar::reduced(1, gp_);
        for (const BBEntry* e : t_.find_bb_all(kRevealExponent))
            r_bar = r_bar.mul(decode_reveal_exponent(gp_, e->payload).exponent, gp_);
        MixOutput out;
        out.pseudonyms = pseuds;
        out.h = h_of("C");
        std::vector<std::size_t> links = deanonymize(gp_, in.keys, out, r_bar);

        RowPermutations pi = recorded_pi();
        std::vector<std::vector<std::size_t>> inv(pi.size(),
                                                  std::vector<std::size_t>(cfg_.candidates));
        for (std::size_t i = 0; i < pi.size(); ++i)
            for (std::size_t c = 0; c < pi[i].size(); ++c)
                inv[i][pi[i][c]] = c;

        Record reg = decode_record(t_.secret("ea", "registered.marks"));
        if (reg.fields.size() != cfg_.candidates)
            fail("registered marks count mismatch");
        for (const Bytes& b : reg.fields) {
            Record cm = decode_record(b);
            std::uint32_t cand = cm.u32(0);
            std::vector<Bytes> marks = decode_list(cm.field(1));
            std::size_t j = links.at(cand);
            for (std::size_t row = 0; row < marks.size(); ++row) {
                const MarkMsg& msg = *accepted_.at(inv[row][j]);
                std::vector<Bytes> colmarks = decode_list(decode_mark_body(msg.body).marks);
                if (marks[row] != colmarks.at(row))
                    fail("registered mark differs from the accepted shuffled vector");
            }
        }
    }

    const ExamTranscript& t_;
    RunConfig cfg_;
    GroupParams gp_;
    Roster roster_;
    std::vector<CheckResult> checks_;
    std::vector<std::optional<SubmitBody>> submissions_;
    std::vector<std::optional<MarkMsg>> accepted_;
};

}  // namespace

std::vector<CheckResult> verify_transcript(const ExamTranscript& t) {
    return Verifier(t).run();
}

}  // namespace crex
