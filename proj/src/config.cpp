#include "crex/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "crex/errors.hpp"
#include "crex/group.hpp"
#include "crex/rubric.hpp"

namespace crex {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string_view::npos)
        return "";
    return std::string(s.substr(a, b - a + 1));
}

std::uint64_t parse_number(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ConfigError("config key '" + key + "' wants a number, got '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigError("config key '" + key + "' wants true/false, got '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
    GroupParams::preset(group_id);  // throws on unknown preset
    rubric_by_id(rubric_id);
    if (candidates < 1)
        throw ConfigError("candidates must be at least 1");
    if (partitions < 1)
        throw ConfigError("partitions must be at least 1");
    if (examiners < partitions)
        throw ConfigError("examiners must be at least the number of partitions");
    if (questions < 2)
        throw ConfigError("each test consists of at least two questions");
    if (mix_servers < 1)
        throw ConfigError("mix_servers must be at least 1");
    if (partitions > candidates)
        throw ConfigError("partitions cannot exceed candidates (subsets must be non-empty)");
}

Record RunConfig::to_record() const {
    Record r("crex.config");
    r.add_str(group_id)
        .add_u32(candidates)
        .add_u32(examiners)
        .add_u32(questions)
        .add_u32(partitions)
        .add_u32(mix_servers)
        .add_u64(seed)
        .add_str(rubric_id)
        .add_u32(remark_answer_leak ? 1 : 0);
    return r;
}

RunConfig RunConfig::from_record(const Record& r) {
    if (r.tag != "crex.config")
        throw ParseError(0, "not a config record");
    RunConfig c;
    c.group_id = r.str(0);
    c.candidates = r.u32(1);
    c.examiners = r.u32(2);
    c.questions = r.u32(3);
    c.partitions = r.u32(4);
    c.mix_servers = r.u32(5);
    c.seed = r.u64(6);
    c.rubric_id = r.str(7);
    c.remark_answer_leak = r.u32(8) != 0;
    return c;
}

std::string RunConfig::to_text() const {
    std::ostringstream os;
    os << "group = " << group_id << "\n"
       << "candidates = " << candidates << "\n"
       << "examiners = " << examiners << "\n"
       << "questions = " << questions << "\n"
       << "partitions = " << partitions << "\n"
       << "mix_servers = " << mix_servers << "\n"
       << "seed = " << seed << "\n"
       << "rubric = " << rubric_id << "\n"
       << "remark_answer_leak = " << (remark_answer_leak ? "true" : "false") << "\n";
    return os.str();
}

RunConfig RunConfig::parse_text(std::string_view text) {
    RunConfig c;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        std::string_view line_view =
            text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        std::string line = trim(line_view);
        if (line.empty() || line[0] == '#')
            continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " is not 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "group")
            c.group_id = value;
        else if (key == "candidates")
            c.candidates = static_cast<std::uint32_t>(parse_number(key, value));
        else if (key == "examiners")
            c.examiners = static_cast<std::uint32_t>(parse_number(key, value));
        else if (key == "questions")
            c.questions = static_cast<std::uint32_t>(parse_number(key, value));
        else if (key == "partitions")
            c.partitions = static_cast<std::uint32_t>(parse_number(key, value));
        else if (key == "mix_servers")
            c.mix_servers = static_cast<std::uint32_t>(parse_number(key, value));
        else if (key == "seed")
            c.seed = parse_number(key, value);
        else if (key == "rubric")
            c.rubric_id = value;
        else if (key == "remark_answer_leak")
            c.remark_answer_leak = parse_bool(key, value);
        else
            throw ConfigError("unknown config key '" + key + "'");
    }
    return c;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

}  // namespace crex
