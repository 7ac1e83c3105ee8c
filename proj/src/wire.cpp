#include "crex/wire.hpp"

#include "crex/codec.hpp"
#include "crex/errors.hpp"
#include "crex/hash.hpp"

namespace crex::wire {

namespace {

Record expect(BytesView in, std::string_view tag) {
    Record r = decode_record(in);
    if (r.tag != tag)
        throw ParseError(0, "expected record '" + std::string(tag) + "', got '" + r.tag + "'");
    return r;
}

Bytes owned(BytesView v) {
    return Bytes(v.begin(), v.end());
}

}  // namespace

Bytes encode_list(const std::vector<Bytes>& items) {
    Record r("list");
    for (const Bytes& b : items)
        r.add(b);
    return encode_record(r);
}

std::vector<Bytes> decode_list(BytesView in) {
    Record r = expect(in, "list");
    return r.fields;
}

Bytes encode_indices(const std::vector<std::uint32_t>& items) {
    Record r("indices");
    for (std::uint32_t v : items)
        r.add_u32(v);
    return encode_record(r);
}

std::vector<std::uint32_t> decode_indices(BytesView in) {
    Record r = expect(in, "indices");
    std::vector<std::uint32_t> out;
    out.reserve(r.fields.size());
    for (std::size_t i = 0; i < r.fields.size(); ++i)
        out.push_back(r.u32(i));
    return out;
}

Bytes encode_elements(const std::vector<GroupElement>& items, const GroupParams& gp) {
    Record r("elements");
    for (const GroupElement& e : items)
        r.add(e.encode(gp));
    return encode_record(r);
}

std::vector<GroupElement> decode_elements(const GroupParams& gp, BytesView in) {
    Record r = expect(in, "elements");
    std::vector<GroupElement> out;
    out.reserve(r.fields.size());
    for (std::size_t i = 0; i < r.fields.size(); ++i)
        out.push_back(GroupElement::decode(gp, r.field(i)));
    return out;
}

Bytes session_id(BytesView config_bytes, std::string_view role) {
    Digest d = sha256_parts("crex.session", {config_bytes, to_bytes(role)});
    return Bytes(d.begin(), d.end());
}

Bytes encode_roster(const Roster& r, const GroupParams& gp) {
    Record rec(kRoster);
    rec.add(r.ea_pk.encode(gp));
    rec.add(encode_elements(r.mix_pks, gp));
    return encode_record(rec);
}

Roster decode_roster(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kRoster);
    return Roster{GroupElement::decode(gp, r.field(0)), decode_elements(gp, r.field(1))};
}

Bytes encode_reg_input(const RegInput& r, const GroupParams& gp) {
    Record rec(kRegInput);
    rec.add_str(r.role);
    rec.add(encode_elements(r.keys, gp));
    std::vector<Bytes> proofs;
    proofs.reserve(r.proofs.size());
    for (const DlogProof& p : r.proofs)
        proofs.push_back(p.encode(gp));
    rec.add(encode_list(proofs));
    return encode_record(rec);
}

RegInput decode_reg_input(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kRegInput);
    RegInput out;
    out.role = r.str(0);
    out.keys = decode_elements(gp, r.field(1));
    for (const Bytes& b : decode_list(r.field(2)))
        out.proofs.push_back(DlogProof::decode(gp, b));
    if (out.keys.size() != out.proofs.size())
        throw ParseError(0, "key/proof count mismatch");
    return out;
}

Bytes encode_mix_column(const MixColumn& c, const GroupParams& gp) {
    Record rec(kMixColumn);
    rec.add_str(c.role).add_u32(c.server);
    rec.add(encode_elements(c.column, gp));
    rec.add(c.gen.encode(gp));
    return encode_record(rec);
}

MixColumn decode_mix_column(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kMixColumn);
    return MixColumn{r.str(0), r.u32(1), decode_elements(gp, r.field(2)),
                     GroupElement::decode(gp, r.field(3))};
}

Bytes encode_sealed(std::string_view tag, const SealedToPseudonym& s, const GroupParams& gp) {
    Record rec{std::string(tag)};
    rec.add(s.pseudonym.encode(gp)).add(s.ciphertext);
    return encode_record(rec);
}

SealedToPseudonym decode_sealed(std::string_view tag, const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, tag);
    return SealedToPseudonym{GroupElement::decode(gp, r.field(0)), owned(r.field(1))};
}

const std::pair<Bytes, Bytes>& TpiPayload::at(std::size_t row, std::size_t col) const {
    if (row >= rows || col >= cols)
        throw Error("shuffled matrix index out of range");
    return pairs[row * cols + col];
}

static Record tpi_body_record(const char* tag, const TpiPayload& t) {
    Record rec(tag);
    rec.add_u32(t.rows).add_u32(t.cols);
    for (const auto& [q, a] : t.pairs)
        rec.add(q).add(a);
    return rec;
}

Bytes tpi_signable(const TpiPayload& t) {
    return encode_record(tpi_body_record("tpi.body", t));
}

Bytes encode_tpi(const TpiPayload& t) {
    Record rec = tpi_body_record(kTpi, t);
    rec.add(t.signature);
    return encode_record(rec);
}

TpiPayload decode_tpi(BytesView payload) {
    Record r = expect(payload, kTpi);
    TpiPayload t;
    t.rows = r.u32(0);
    t.cols = r.u32(1);
    std::size_t npairs = std::size_t(t.rows) * t.cols;
    if (r.fields.size() != 2 + 2 * npairs + 1)
        throw ParseError(0, "shuffled matrix field count mismatch");
    for (std::size_t i = 0; i < npairs; ++i)
        t.pairs.emplace_back(owned(r.field(2 + 2 * i)), owned(r.field(3 + 2 * i)));
    t.signature = owned(r.field(2 + 2 * npairs));
    return t;
}

const AssignedLabel* Assignment::find_label(std::string_view label) const {
    for (const AssignedLabel& l : labels)
        if (l.label == label)
            return &l;
    return nullptr;
}

const AssignedLabel* Assignment::label_of(const GroupElement& examiner_pseudonym) const {
    for (const AssignedLabel& l : labels)
        for (const GroupElement& p : l.examiner_pseudonyms)
            if (p == examiner_pseudonym)
                return &l;
    return nullptr;
}

Bytes encode_assignment(const Assignment& a, const GroupParams& gp) {
    Record rec(kAssign);
    for (const AssignedLabel& l : a.labels) {
        Record lr("assign.label");
        lr.add_str(l.label);
        lr.add(encode_indices(l.subset));
        lr.add(encode_elements(l.examiner_pseudonyms, gp));
        rec.add(encode_record(lr));
    }
    return encode_record(rec);
}

Assignment decode_assignment(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kAssign);
    Assignment a;
    for (const Bytes& b : r.fields) {
        Record lr = decode_record(b);
        if (lr.tag != "assign.label")
            throw ParseError(0, "bad assignment entry");
        a.labels.push_back(AssignedLabel{lr.str(0), decode_indices(lr.field(1)),
                                         decode_elements(gp, lr.field(2))});
    }
    return a;
}

Bytes encode_reveal_exponent(const RevealExponent& r, const GroupParams& gp) {
    Record rec(kRevealExponent);
    rec.add_str(r.role).add_u32(r.server).add(r.exponent.encode(gp));
    return encode_record(rec);
}

RevealExponent decode_reveal_exponent(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kRevealExponent);
    return RevealExponent{r.str(0), r.u32(1), Scalar::decode(gp, r.field(2))};
}

Bytes encode_reveal_alpha(const Scalar& alpha, const GroupParams& gp) {
    Record rec(kRevealAlpha);
    rec.add(alpha.encode(gp));
    return encode_record(rec);
}

Scalar decode_reveal_alpha(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kRevealAlpha);
    return Scalar::decode(gp, r.field(0));
}

Bytes encode_answer_leak(const AnswerLeak& l, const GroupParams& gp) {
    Record rec(kAnswerLeak);
    rec.add(l.pseudonym.encode(gp)).add(l.questions).add(l.answers);
    return encode_record(rec);
}

AnswerLeak decode_answer_leak(const GroupParams& gp, BytesView payload) {
    Record r = expect(payload, kAnswerLeak);
    return AnswerLeak{GroupElement::decode(gp, r.field(0)), owned(r.field(1)),
                      owned(r.field(2))};
}

Bytes encode_scheme(const SchemeBody& s) {
    Record rec("preassign.scheme");
    rec.add_u32(s.columns);
    rec.add_u32(static_cast<std::uint32_t>(s.labels.size()));
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
        rec.add_str(s.labels[i]);
        rec.add(encode_indices(s.subsets[i]));
    }
    return encode_record(rec);
}

SchemeBody decode_scheme(BytesView in) {
    Record r = expect(in, "preassign.scheme");
    SchemeBody s;
    s.columns = r.u32(0);
    std::uint32_t d = r.u32(1);
    for (std::uint32_t i = 0; i < d; ++i) {
        s.labels.push_back(r.str(2 + 2 * i));
        s.subsets.push_back(decode_indices(r.field(3 + 2 * i)));
    }
    return s;
}

Bytes encode_signed_scheme(const SignedScheme& s) {
    Record rec("msg.preassign.scheme");
    rec.add(s.scheme).add(s.ea_sig);
    return encode_record(rec);
}

SignedScheme decode_signed_scheme(BytesView in) {
    Record r = expect(in, "msg.preassign.scheme");
    return SignedScheme{owned(r.field(0)), owned(r.field(1))};
}

Bytes encode_scheme_endorsement(const SchemeEndorsement& e) {
    Record rec("msg.preassign.sig");
    rec.add_u32(e.examiner).add(e.sig);
    return encode_record(rec);
}

SchemeEndorsement decode_scheme_endorsement(BytesView in) {
    Record r = expect(in, "msg.preassign.sig");
    return SchemeEndorsement{r.u32(0), owned(r.field(1))};
}

Bytes encode_endorsement_bundle(const std::vector<SchemeEndorsement>& v) {
    Record rec("msg.preassign.bundle");
    for (const SchemeEndorsement& e : v)
        rec.add(encode_scheme_endorsement(e));
    return encode_record(rec);
}

std::vector<SchemeEndorsement> decode_endorsement_bundle(BytesView in) {
    Record r = expect(in, "msg.preassign.bundle");
    std::vector<SchemeEndorsement> out;
    for (const Bytes& b : r.fields)
        out.push_back(decode_scheme_endorsement(b));
    return out;
}

Bytes encode_questions_msg(const QuestionsMsg& m) {
    Record rec("msg.questions");
    rec.add(m.questions).add(m.ea_sig);
    return encode_record(rec);
}

QuestionsMsg decode_questions_msg(BytesView in) {
    Record r = expect(in, "msg.questions");
    return QuestionsMsg{owned(r.field(0)), owned(r.field(1))};
}

Bytes encode_submit_body(const SubmitBody& b, const GroupParams& gp) {
    Record rec("submit.body");
    rec.add(b.questions).add(b.answers).add(b.pseudonym.encode(gp));
    return encode_record(rec);
}

SubmitBody decode_submit_body(const GroupParams& gp, BytesView in) {
    Record r = decode_record(in);
    if (r.tag != "submit.body")
        throw ParseError(0, "not a submission body");
    return SubmitBody{owned(r.field(0)), owned(r.field(1)),
                      GroupElement::decode(gp, r.field(2))};
}

Bytes encode_submit_msg(const SubmitMsg& m) {
    Record rec("msg.submit");
    rec.add(m.body).add(m.sig);
    return encode_record(rec);
}

SubmitMsg decode_submit_msg(BytesView in) {
    Record r = expect(in, "msg.submit");
    return SubmitMsg{owned(r.field(0)), owned(r.field(1))};
}

Bytes encode_receipt_msg(const ReceiptMsg& m, const GroupParams& gp) {
    Record rec("msg.receipt");
    rec.add(m.digest.encode(gp)).add(m.ea_sig);
    return encode_record(rec);
}

ReceiptMsg decode_receipt_msg(const GroupParams& gp, BytesView in) {
    Record r = expect(in, "msg.receipt");
    return ReceiptMsg{Scalar::decode(gp, r.field(0)), owned(r.field(1))};
}

Scalar receipt_digest(const GroupParams& gp, BytesView questions, BytesView answers,
                      const GroupElement& pseudonym, const Scalar& alpha) {
    Bytes pe = pseudonym.encode(gp);
    Bytes ae = alpha.encode(gp);
    return hash_to_scalar(gp, "crex.receipt", {questions, answers, pe, ae});
}

Bytes encode_mark_body(const MarkBody& b) {
    Record rec("mark.body");
    rec.add(b.marks).add(b.subset);
    return encode_record(rec);
}

MarkBody decode_mark_body(BytesView in) {
    Record r = decode_record(in);
    if (r.tag != "mark.body")
        throw ParseError(0, "not a mark body");
    return MarkBody{owned(r.field(0)), owned(r.field(1))};
}

Bytes encode_mark_msg(const MarkMsg& m, const GroupParams& gp) {
    Record rec("msg.mark");
    rec.add_u32(m.column).add(m.examiner_pseudonym.encode(gp)).add(m.body).add(m.sig);
    return encode_record(rec);
}

MarkMsg decode_mark_msg(const GroupParams& gp, BytesView in) {
    Record r = expect(in, "msg.mark");
    return MarkMsg{r.u32(0), GroupElement::decode(gp, r.field(1)), owned(r.field(2)),
                   owned(r.field(3))};
}

Bytes encode_notif_row(const NotifRow& r, const GroupParams& gp) {
    Record rec("notif.row");
    rec.add_u32(r.row)
        .add_u32(r.column)
        .add(r.mark)
        .add_str(r.label)
        .add(r.examiner_pseudonym.encode(gp))
        .add(r.body)
        .add(r.sig);
    return encode_record(rec);
}

NotifRow decode_notif_row(const GroupParams& gp, BytesView in) {
    Record r = decode_record(in);
    if (r.tag != "notif.row")
        throw ParseError(0, "not a notification row");
    return NotifRow{r.u32(0),          r.u32(1),        owned(r.field(2)), r.str(3),
                    GroupElement::decode(gp, r.field(4)), owned(r.field(5)), owned(r.field(6))};
}

Bytes encode_notif_core(const NotifCore& c, const GroupParams& gp) {
    Record rec("notif.core");
    rec.add(c.pseudonym.encode(gp));
    for (const Bytes& b : c.rows)
        rec.add(b);
    return encode_record(rec);
}

NotifCore decode_notif_core(const GroupParams& gp, BytesView in) {
    Record r = decode_record(in);
    if (r.tag != "notif.core")
        throw ParseError(0, "not a notification core");
    NotifCore c;
    c.pseudonym = GroupElement::decode(gp, r.field(0));
    for (std::size_t i = 1; i < r.fields.size(); ++i)
        c.rows.push_back(owned(r.field(i)));
    return c;
}

Bytes encode_notif_package(const NotifPackage& p) {
    Record rec("notif.package");
    rec.add(p.core).add(p.ea_sig);
    return encode_record(rec);
}

NotifPackage decode_notif_package(BytesView in) {
    Record r = expect(in, "notif.package");
    return NotifPackage{owned(r.field(0)), owned(r.field(1))};
}

}  // namespace crex::wire
