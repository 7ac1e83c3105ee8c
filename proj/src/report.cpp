#include "crex/report.hpp"

#include <fstream>
#include <sstream>

#include "crex/errors.hpp"

namespace crex {

const std::map<std::string, std::vector<FieldSpec>>& report_schema() {
    static const std::map<std::string, std::vector<FieldSpec>> schema = {
        {"report.exam.run",
         {{"group", FieldKind::Str},
          {"seed", FieldKind::U64},
          {"candidates", FieldKind::U32},
          {"examiners", FieldKind::U32},
          {"questions", FieldKind::U32},
          {"partitions", FieldKind::U32},
          {"phase_reached", FieldKind::Str},
          {"checks", FieldKind::U32},
          {"failures", FieldKind::U32},
          {"transcript_sha256", FieldKind::Bytes}}},
        {"report.exam.verify",
         {{"checks", FieldKind::U32}, {"failures", FieldKind::U32}}},
        {"report.attack.demo",
         {{"group", FieldKind::Str},
          {"seed", FieldKind::U64},
          {"n", FieldKind::U32},
          {"servers", FieldKind::U32},
          {"target", FieldKind::U32},
          {"external", FieldKind::U8},
          {"success", FieldKind::U8},
          {"verified", FieldKind::U8},
          {"sessions", FieldKind::U64},
          {"group_ops", FieldKind::U64},
          {"pseudonym_index", FieldKind::U32}}},
        {"report.attack.linkage",
         {{"group", FieldKind::Str},
          {"seed", FieldKind::U64},
          {"n", FieldKind::U32},
          {"mode", FieldKind::Str},
          {"sessions", FieldKind::U64},
          {"group_ops", FieldKind::U64},
          {"links_correct", FieldKind::U8}}},
        {"report.attack.iremix",
         {{"group", FieldKind::Str},
          {"seed", FieldKind::U64},
          {"n", FieldKind::U32},
          {"blocked", FieldKind::U8},
          {"detail", FieldKind::Str}}},
        {"report.coerce.candidate",
         {{"candidate", FieldKind::U32},
          {"real_consistent", FieldKind::U8},
          {"fake_consistent", FieldKind::U8},
          {"indistinguishable", FieldKind::U8},
          {"checks", FieldKind::U32}}},
        {"report.coerce.examiner",
         {{"examiner", FieldKind::U32},
          {"decoy", FieldKind::Str},
          {"real_consistent", FieldKind::U8},
          {"fake_consistent", FieldKind::U8},
          {"indistinguishable", FieldKind::U8},
          {"checks", FieldKind::U32}}},
        {"report.mixnet.demo",
         {{"group", FieldKind::Str},
          {"seed", FieldKind::U64},
          {"n", FieldKind::U32},
          {"servers", FieldKind::U32},
          {"iremix", FieldKind::U8},
          {"owners_located", FieldKind::U32}}},
        {"report.check",
         {{"name", FieldKind::Str}, {"pass", FieldKind::U8}, {"detail", FieldKind::Str}}},
    };
    return schema;
}

void validate_report_record(const Record& r) {
    auto it = report_schema().find(r.tag);
    if (it == report_schema().end())
        throw Error("unknown report record '" + r.tag + "'");
    const auto& spec = it->second;
    if (r.fields.size() != spec.size())
        throw Error("report record '" + r.tag + "' has " + std::to_string(r.fields.size()) +
                    " fields, schema wants " + std::to_string(spec.size()));
    for (std::size_t i = 0; i < spec.size(); ++i) {
        std::size_t len = r.fields[i].size();
        bool ok = true;
        switch (spec[i].kind) {
            case FieldKind::U8: ok = len == 1; break;
            case FieldKind::U32: ok = len == 4; break;
            case FieldKind::U64: ok = len == 8; break;
            case FieldKind::Str:
            case FieldKind::Bytes: break;
        }
        if (!ok)
            throw Error("report record '" + r.tag + "' field '" + spec[i].name +
                        "' has the wrong width");
    }
}

Bytes Report::serialize() const {
    std::string out;
    for (const Record& r : records) {
        out += hex_encode(encode_record(r));
        out += '\n';
    }
    return to_bytes(out);
}

Report Report::parse(BytesView file) {
    Report rep;
    std::size_t pos = 0;
    while (pos < file.size()) {
        std::size_t end = pos;
        while (end < file.size() && file[end] != '\n')
            ++end;
        std::string_view line(reinterpret_cast<const char*>(file.data()) + pos, end - pos);
        pos = end < file.size() ? end + 1 : end;
        if (line.empty())
            continue;
        Record r = decode_record(hex_decode(line));
        validate_report_record(r);
        rep.records.push_back(std::move(r));
    }
    return rep;
}

void Report::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write report '" + path + "'");
    Bytes data = serialize();
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

}  // namespace crex
