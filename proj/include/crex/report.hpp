#pragma once

#include <map>
#include <string>
#include <vector>

#include "crex/codec.hpp"

namespace crex {

// Machine-readable reports: line-delimited records in the same canonical
// encoding as transcripts, one parser for both. Field layouts per tag are
// fixed by the schema below and documented in docs/formats.md.

enum class FieldKind { U8, U32, U64, Str, Bytes };

struct FieldSpec {
    std::string name;
    FieldKind kind;
};

// tag -> ordered field layout
const std::map<std::string, std::vector<FieldSpec>>& report_schema();

// Throws Error when the record's tag is unknown or its fields do not match
// the schema.
void validate_report_record(const Record& r);

struct Report {
    std::vector<Record> records;

    Bytes serialize() const;              // hex lines
    static Report parse(BytesView file);  // validates every record
    void save(const std::string& path) const;
};

}  // namespace crex
