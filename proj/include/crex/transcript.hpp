#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "crex/config.hpp"
#include "crex/group.hpp"

namespace crex {

enum class Phase : int {
    PreAssignment = 0,
    Registration = 1,
    Testing = 2,
    Marking = 3,
    Notification = 4,
    Done = 5,
};

const char* phase_name(Phase p);
Phase phase_from_name(std::string_view name);

struct PhaseMarker {
    Phase phase;
    bool operator==(const PhaseMarker&) const = default;
};

struct BBEntry {
    std::uint64_t seq = 0;
    std::string author;
    Bytes payload;    // a record; its tag identifies the entry type
    Bytes signature;  // author's Schnorr signature over (seq, author, payload)
    bool operator==(const BBEntry&) const = default;
};

struct ChannelMessage {
    std::string from;
    std::string to;
    Bytes ciphertext;
    bool operator==(const ChannelMessage&) const = default;
};

// Simulator-held role secrets: the part of the transcript that is not
// public. The coercion harness draws revealed keys from here; replay
// verification uses it to open channel messages.
struct SecretRecord {
    std::string owner;
    std::string kind;
    Bytes value;
    bool operator==(const SecretRecord&) const = default;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    bool operator==(const CheckResult&) const = default;
};

bool all_passed(const std::vector<CheckResult>& checks);

using TranscriptItem =
    std::variant<PhaseMarker, BBEntry, ChannelMessage, SecretRecord, CheckResult>;

// Machine-readable record of a whole exam run: every bulletin-board entry,
// every point-to-point ciphertext, phase markers, role secrets, and the
// verdicts recorded as the run went. The file form is line-delimited hex,
// one canonical record per line; re-running verification over it
// reproduces every accept/reject verdict.
struct ExamTranscript {
    std::string group_id;
    std::string hash_id;
    Bytes config_bytes;
    std::vector<TranscriptItem> items;

    RunConfig config() const;

    // Bulletin-board views. `before` excludes entries appended at or after
    // the marker of that phase.
    std::vector<const BBEntry*> bb(std::optional<Phase> before = std::nullopt) const;
    const BBEntry* find_bb(std::string_view payload_tag,
                           std::optional<Phase> before = std::nullopt) const;
    std::vector<const BBEntry*> find_bb_all(std::string_view payload_tag,
                                            std::optional<Phase> before = std::nullopt) const;

    const SecretRecord* find_secret(std::string_view owner, std::string_view kind) const;
    Bytes secret(std::string_view owner, std::string_view kind) const;  // throws NotFound

    std::vector<const ChannelMessage*> channel(std::string_view from, std::string_view to) const;
    std::vector<CheckResult> verdicts() const;
    Phase last_phase() const;

    Bytes serialize() const;
    static ExamTranscript parse(BytesView file);  // ParseError with byte offset
    void save(const std::string& path) const;
    static ExamTranscript load(const std::string& path);
};

// Append-only public log. Appends are signed by the author; seq is strictly
// increasing. Entries are handed out by const reference only.
class BulletinBoard {
  public:
    const BBEntry& append(std::string author, Bytes payload, const Scalar& author_sk,
                          const GroupParams& gp, RandomSource& rng);
    const std::vector<BBEntry>& entries() const { return entries_; }

    // Bytes covered by the entry signature.
    static Bytes signable(std::uint64_t seq, std::string_view author, BytesView payload);

  private:
    std::vector<BBEntry> entries_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace crex
