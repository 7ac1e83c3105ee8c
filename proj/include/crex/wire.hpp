#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crex/elgamal.hpp"
#include "crex/schnorr.hpp"

// Payload record layouts shared by the simulator, the transcript verifier,
// the coercion harness, and the CLI. Every structure here rides the
// canonical record encoding; the byte form is the contract.

namespace crex::wire {

Bytes encode_list(const std::vector<Bytes>& items);
std::vector<Bytes> decode_list(BytesView in);

Bytes encode_indices(const std::vector<std::uint32_t>& items);
std::vector<std::uint32_t> decode_indices(BytesView in);

Bytes encode_elements(const std::vector<GroupElement>& items, const GroupParams& gp);
std::vector<GroupElement> decode_elements(const GroupParams& gp, BytesView in);

// Registration proof context: binds the exam (config digest), the batch
// role ("C" or "E"), and nothing else.
Bytes session_id(BytesView config_bytes, std::string_view role);

// ---- bulletin-board payloads ----

struct Roster {
    GroupElement ea_pk;
    std::vector<GroupElement> mix_pks;
};
Bytes encode_roster(const Roster& r, const GroupParams& gp);
Roster decode_roster(const GroupParams& gp, BytesView payload);

struct RegInput {
    std::string role;  // "C" or "E"
    std::vector<GroupElement> keys;
    std::vector<DlogProof> proofs;
};
Bytes encode_reg_input(const RegInput& r, const GroupParams& gp);
RegInput decode_reg_input(const GroupParams& gp, BytesView payload);

struct MixColumn {
    std::string role;
    std::uint32_t server = 0;
    std::vector<GroupElement> column;
    GroupElement gen;
};
Bytes encode_mix_column(const MixColumn& c, const GroupParams& gp);
MixColumn decode_mix_column(const GroupParams& gp, BytesView payload);

struct SealedToPseudonym {  // bb.questions and bb.notif entries
    GroupElement pseudonym;
    Bytes ciphertext;
};
Bytes encode_sealed(std::string_view tag, const SealedToPseudonym& s, const GroupParams& gp);
SealedToPseudonym decode_sealed(std::string_view tag, const GroupParams& gp, BytesView payload);

struct TpiPayload {
    std::uint32_t rows = 0;  // k
    std::uint32_t cols = 0;  // n
    // row-major (question, answer) pairs
    std::vector<std::pair<Bytes, Bytes>> pairs;
    Bytes signature;  // EA Schnorr over signable()
    const std::pair<Bytes, Bytes>& at(std::size_t row, std::size_t col) const;
};
Bytes tpi_signable(const TpiPayload& t);
Bytes encode_tpi(const TpiPayload& t);
TpiPayload decode_tpi(BytesView payload);

struct AssignedLabel {
    std::string label;
    std::vector<std::uint32_t> subset;  // shuffled-column indices
    std::vector<GroupElement> examiner_pseudonyms;
};
struct Assignment {
    std::vector<AssignedLabel> labels;
    const AssignedLabel* find_label(std::string_view label) const;
    const AssignedLabel* label_of(const GroupElement& examiner_pseudonym) const;
};
Bytes encode_assignment(const Assignment& a, const GroupParams& gp);
Assignment decode_assignment(const GroupParams& gp, BytesView payload);

struct RevealExponent {
    std::string role;
    std::uint32_t server = 0;
    Scalar exponent;
};
Bytes encode_reveal_exponent(const RevealExponent& r, const GroupParams& gp);
RevealExponent decode_reveal_exponent(const GroupParams& gp, BytesView payload);

Bytes encode_reveal_alpha(const Scalar& alpha, const GroupParams& gp);
Scalar decode_reveal_alpha(const GroupParams& gp, BytesView payload);

struct AnswerLeak {  // Remark!-style publication, negative control only
    GroupElement pseudonym;
    Bytes questions;  // encoded list
    Bytes answers;    // encoded list
};
Bytes encode_answer_leak(const AnswerLeak& l, const GroupParams& gp);
AnswerLeak decode_answer_leak(const GroupParams& gp, BytesView payload);

// ---- channel message plaintexts ----

struct SchemeBody {
    std::uint32_t columns = 0;  // n
    std::vector<std::string> labels;
    std::vector<std::vector<std::uint32_t>> subsets;
};
Bytes encode_scheme(const SchemeBody& s);
SchemeBody decode_scheme(BytesView in);

struct SignedScheme {  // msg.preassign.scheme
    Bytes scheme;
    Bytes ea_sig;
};
Bytes encode_signed_scheme(const SignedScheme& s);
SignedScheme decode_signed_scheme(BytesView in);

struct SchemeEndorsement {  // msg.preassign.sig
    std::uint32_t examiner = 0;
    Bytes sig;
};
Bytes encode_scheme_endorsement(const SchemeEndorsement& e);
SchemeEndorsement decode_scheme_endorsement(BytesView in);

Bytes encode_endorsement_bundle(const std::vector<SchemeEndorsement>& v);
std::vector<SchemeEndorsement> decode_endorsement_bundle(BytesView in);

struct QuestionsMsg {
    Bytes questions;  // encoded list
    Bytes ea_sig;
};
Bytes encode_questions_msg(const QuestionsMsg& m);
QuestionsMsg decode_questions_msg(BytesView in);

struct SubmitBody {
    Bytes questions;  // encoded list
    Bytes answers;    // encoded list
    GroupElement pseudonym;
};
Bytes encode_submit_body(const SubmitBody& b, const GroupParams& gp);
SubmitBody decode_submit_body(const GroupParams& gp, BytesView in);

struct SubmitMsg {
    Bytes body;  // encoded SubmitBody; the signed bytes
    Bytes sig;
};
Bytes encode_submit_msg(const SubmitMsg& m);
SubmitMsg decode_submit_msg(BytesView in);

struct ReceiptMsg {
    Scalar digest;
    Bytes ea_sig;
};
Bytes encode_receipt_msg(const ReceiptMsg& m, const GroupParams& gp);
ReceiptMsg decode_receipt_msg(const GroupParams& gp, BytesView in);

Scalar receipt_digest(const GroupParams& gp, BytesView questions, BytesView answers,
                      const GroupElement& pseudonym, const Scalar& alpha);

struct MarkBody {  // the signed message: (M_j^pi, A_P)
    Bytes marks;   // encoded list, one mark per row
    Bytes subset;  // encoded indices
};
Bytes encode_mark_body(const MarkBody& b);
MarkBody decode_mark_body(BytesView in);

struct MarkMsg {
    std::uint32_t column = 0;
    GroupElement examiner_pseudonym;
    Bytes body;  // encoded MarkBody
    Bytes sig;
};
Bytes encode_mark_msg(const MarkMsg& m, const GroupParams& gp);
MarkMsg decode_mark_msg(const GroupParams& gp, BytesView in);

// One row of a candidate's notification package: which shuffled column the
// row came from, the mark, and the examiner-signed column package backing it.
struct NotifRow {
    std::uint32_t row = 0;
    std::uint32_t column = 0;
    Bytes mark;
    std::string label;
    GroupElement examiner_pseudonym;
    Bytes body;  // encoded MarkBody the examiner signed
    Bytes sig;
};
Bytes encode_notif_row(const NotifRow& r, const GroupParams& gp);
NotifRow decode_notif_row(const GroupParams& gp, BytesView in);

struct NotifCore {
    GroupElement pseudonym;
    std::vector<Bytes> rows;  // encoded NotifRow per question row
};
Bytes encode_notif_core(const NotifCore& c, const GroupParams& gp);
NotifCore decode_notif_core(const GroupParams& gp, BytesView in);

struct NotifPackage {
    Bytes core;  // encoded NotifCore; the EA-signed bytes
    Bytes ea_sig;
};
Bytes encode_notif_package(const NotifPackage& p);
NotifPackage decode_notif_package(BytesView in);

// ---- payload tags ----
inline constexpr const char* kRoster = "bb.roster";
inline constexpr const char* kRegInput = "bb.reg.input";
inline constexpr const char* kMixColumn = "bb.mix.column";
inline constexpr const char* kQuestions = "bb.questions";
inline constexpr const char* kTpi = "bb.tpi";
inline constexpr const char* kAssign = "bb.assign";
inline constexpr const char* kNotif = "bb.notif";
inline constexpr const char* kRevealExponent = "bb.reveal.exponent";
inline constexpr const char* kRevealAlpha = "bb.reveal.alpha";
inline constexpr const char* kAnswerLeak = "bb.remark.leak";

}  // namespace crex::wire
