#include "crex/transcript.hpp"

#include <fstream>
#include <sstream>

#include "crex/errors.hpp"
#include "crex/schnorr.hpp"

namespace crex {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::PreAssignment: return "pre-assignment";
        case Phase::Registration: return "registration";
        case Phase::Testing: return "testing";
        case Phase::Marking: return "marking";
        case Phase::Notification: return "notification";
        case Phase::Done: return "done";
    }
    return "unknown";
}

Phase phase_from_name(std::string_view name) {
    for (Phase p : {Phase::PreAssignment, Phase::Registration, Phase::Testing, Phase::Marking,
                    Phase::Notification, Phase::Done})
        if (name == phase_name(p))
            return p;
    throw ParseError(0, "unknown phase '" + std::string(name) + "'");
}

bool all_passed(const std::vector<CheckResult>& checks) {
    for (const CheckResult& c : checks)
        if (!c.pass)
            return false;
    return true;
}

RunConfig ExamTranscript::config() const {
    return RunConfig::from_record(decode_record(config_bytes));
}

std::vector<const BBEntry*> ExamTranscript::bb(std::optional<Phase> before) const {
    std::vector<const BBEntry*> out;
    for (const TranscriptItem& item : items) {
        if (before) {
            if (const auto* marker = std::get_if<PhaseMarker>(&item))
                if (marker->phase >= *before)
                    break;
        }
        if (const auto* e = std::get_if<BBEntry>(&item))
            out.push_back(e);
    }
    return out;
}

const BBEntry* ExamTranscript::find_bb(std::string_view payload_tag,
                                       std::optional<Phase> before) const {
    for (const BBEntry* e : bb(before)) {
        std::size_t pos = 0;
        Record r = decode_record(e->payload, pos);
        if (r.tag == payload_tag)
            return e;
    }
    return nullptr;
}

std::vector<const BBEntry*> ExamTranscript::find_bb_all(std::string_view payload_tag,
                                                        std::optional<Phase> before) const {
    std::vector<const BBEntry*> out;
    for (const BBEntry* e : bb(before)) {
        std::size_t pos = 0;
        Record r = decode_record(e->payload, pos);
        if (r.tag == payload_tag)
            out.push_back(e);
    }
    return out;
}

const SecretRecord* ExamTranscript::find_secret(std::string_view owner,
                                                std::string_view kind) const {
    for (const TranscriptItem& item : items)
        if (const auto* s = std::get_if<SecretRecord>(&item))
            if (s->owner == owner && s->kind == kind)
                return s;
    return nullptr;
}

Bytes ExamTranscript::secret(std::string_view owner, std::string_view kind) const {
    if (const SecretRecord* s = find_secret(owner, kind))
        return s->value;
    throw NotFound("no secret '" + std::string(kind) + "' for '" + std::string(owner) + "'");
}

std::vector<const ChannelMessage*> ExamTranscript::channel(std::string_view from,
                                                           std::string_view to) const {
    std::vector<const ChannelMessage*> out;
    for (const TranscriptItem& item : items)
        if (const auto* m = std::get_if<ChannelMessage>(&item))
            if ((from.empty() || m->from == from) && (to.empty() || m->to == to))
                out.push_back(m);
    return out;
}

std::vector<CheckResult> ExamTranscript::verdicts() const {
    std::vector<CheckResult> out;
    for (const TranscriptItem& item : items)
        if (const auto* c = std::get_if<CheckResult>(&item))
            out.push_back(*c);
    return out;
}

Phase ExamTranscript::last_phase() const {
    Phase last = Phase::PreAssignment;
    for (const TranscriptItem& item : items)
        if (const auto* marker = std::get_if<PhaseMarker>(&item))
            last = marker->phase;
    return last;
}

namespace {

Record item_to_record(const TranscriptItem& item) {
    if (const auto* marker = std::get_if<PhaseMarker>(&item)) {
        Record r("crex.phase");
        r.add_str(phase_name(marker->phase));
        return r;
    }
    if (const auto* e = std::get_if<BBEntry>(&item)) {
        Record r("crex.bb");
        r.add_u64(e->seq).add_str(e->author).add(e->payload).add(e->signature);
        return r;
    }
    if (const auto* m = std::get_if<ChannelMessage>(&item)) {
        Record r("crex.chan");
        r.add_str(m->from).add_str(m->to).add(m->ciphertext);
        return r;
    }
    if (const auto* s = std::get_if<SecretRecord>(&item)) {
        Record r("crex.secret");
        r.add_str(s->owner).add_str(s->kind).add(s->value);
        return r;
    }
    const auto& c = std::get<CheckResult>(item);
    Record r("crex.check");
    Bytes pass = {static_cast<std::uint8_t>(c.pass ? 1 : 0)};
    r.add_str(c.name).add(pass).add_str(c.detail);
    return r;
}

TranscriptItem record_to_item(const Record& r, std::size_t offset) {
    if (r.tag == "crex.phase")
        return PhaseMarker{phase_from_name(r.str(0))};
    if (r.tag == "crex.bb")
        return BBEntry{r.u64(0), r.str(1), Bytes(r.field(2).begin(), r.field(2).end()),
                       Bytes(r.field(3).begin(), r.field(3).end())};
    if (r.tag == "crex.chan")
        return ChannelMessage{r.str(0), r.str(1), Bytes(r.field(2).begin(), r.field(2).end())};
    if (r.tag == "crex.secret")
        return SecretRecord{r.str(0), r.str(1), Bytes(r.field(2).begin(), r.field(2).end())};
    if (r.tag == "crex.check") {
        if (r.field(1).size() != 1)
            throw ParseError(offset, "check verdict flag must be one byte");
        return CheckResult{r.str(0), r.field(1)[0] != 0, r.str(2)};
    }
    throw ParseError(offset, "unknown transcript record '" + r.tag + "'");
}

}  // namespace

Bytes ExamTranscript::serialize() const {
    std::string out;
    Record header("crex.header");
    header.add_u32(1).add_str(group_id).add_str(hash_id).add(config_bytes);
    out += hex_encode(encode_record(header));
    out += '\n';
    for (const TranscriptItem& item : items) {
        out += hex_encode(encode_record(item_to_record(item)));
        out += '\n';
    }
    return to_bytes(out);
}

ExamTranscript ExamTranscript::parse(BytesView file) {
    if (file.empty())
        throw ParseError(0, "empty transcript");
    ExamTranscript t;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos < file.size()) {
        std::size_t line_start = pos;
        std::size_t end = pos;
        while (end < file.size() && file[end] != '\n')
            ++end;
        std::string_view line(reinterpret_cast<const char*>(file.data()) + pos, end - pos);
        pos = end < file.size() ? end + 1 : end;
        if (line.empty())
            continue;
        Bytes raw;
        try {
            raw = hex_decode(line);
        } catch (const ParseError& e) {
            throw ParseError(line_start + e.offset, "transcript line is not hex");
        }
        Record r;
        try {
            r = decode_record(raw);
        } catch (const ParseError& e) {
            throw ParseError(line_start + 2 * e.offset, "bad transcript record");
        }
        if (!have_header) {
            if (r.tag != "crex.header")
                throw ParseError(line_start, "transcript does not start with a header");
            if (r.u32(0) != 1)
                throw ParseError(line_start, "unsupported transcript version");
            t.group_id = r.str(1);
            t.hash_id = r.str(2);
            t.config_bytes = Bytes(r.field(3).begin(), r.field(3).end());
            have_header = true;
            continue;
        }
        t.items.push_back(record_to_item(r, line_start));
    }
    if (!have_header)
        throw ParseError(0, "transcript has no header");
    return t;
}

void ExamTranscript::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write transcript '" + path + "'");
    Bytes data = serialize();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

ExamTranscript ExamTranscript::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open transcript '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string s = buf.str();
    return parse(BytesView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

Bytes BulletinBoard::signable(std::uint64_t seq, std::string_view author, BytesView payload) {
    Record r("bb.entry");
    r.add_u64(seq).add_str(author).add(payload);
    return encode_record(r);
}

const BBEntry& BulletinBoard::append(std::string author, Bytes payload, const Scalar& author_sk,
                                     const GroupParams& gp, RandomSource& rng) {
    BBEntry e;
    e.seq = next_seq_++;
    e.author = std::move(author);
    e.payload = std::move(payload);
    SchnorrSignature sig =
        schnorr_sign(gp, author_sk, generator(gp), signable(e.seq, e.author, e.payload), rng);
    e.signature = sig.encode(gp);
    entries_.push_back(std::move(e));
    return entries_.back();
}

}  // namespace crex
