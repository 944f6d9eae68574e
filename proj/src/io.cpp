#include "cxnprobe/io.hpp"

#include <fstream>
#include <sstream>

#include "cxnprobe/errors.hpp"

namespace cxnprobe::io {

namespace {

// RFC 4180-ish record parser; handles quoted fields with embedded
// delimiters, doubled quotes and newlines. For '\t' no quoting applies.
std::vector<std::vector<std::string>> parse_records(const std::string& content,
                                                    char delim) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    const bool quoting = (delim == ',');

    std::size_t i = 0;
    while (i < content.size()) {
        char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (quoting && c == '"' && field.empty()) {
            quoted = true;
            any = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                fields.push_back(std::move(field));
                field.clear();
                records.push_back(std::move(fields));
                fields.clear();
                any = false;
            }
        } else {
            field.push_back(c);
            any = true;
        }
        ++i;
    }
    if (any || !field.empty()) {
        fields.push_back(std::move(field));
        records.push_back(std::move(fields));
    }
    return records;
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ResourceError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ResourceError("write failed: " + path.string());
}

Table parse_table(const std::string& content) {
    Table t;
    // Delimiter declared by the header row.
    std::size_t eol = content.find_first_of("\r\n");
    std::string head = content.substr(0, eol == std::string::npos ? content.size() : eol);
    t.delimiter = head.find('\t') != std::string::npos ? '\t' : ',';

    auto records = parse_records(content, t.delimiter);
    if (records.empty()) throw SchemaError("empty table: no header row");
    t.header = records.front();
    t.rows.assign(records.begin() + 1, records.end());
    return t;
}

Table read_table(const std::filesystem::path& path) {
    return parse_table(read_file(path));
}

std::string format_table(const Table& table) {
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(table.delimiter);
            out += table.delimiter == ',' ? quote_csv(row[i]) : row[i];
        }
        out.push_back('\n');
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    return out;
}

void write_table(const std::filesystem::path& path, const Table& table) {
    write_file(path, format_table(table));
}

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
    std::vector<nlohmann::json> out;
    std::string content = read_file(path);
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        ++line_no;
        std::string line = content.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            try {
                out.push_back(nlohmann::json::parse(line));
            } catch (const nlohmann::json::exception& e) {
                throw SchemaError(path.string() + ":" + std::to_string(line_no) +
                                  ": invalid record line: " + e.what());
            }
        }
        pos = eol + 1;
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += rec.dump();
        out.push_back('\n');
    }
    write_file(path, out);
}

nlohmann::json read_json(const std::filesystem::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
    write_file(path, value.dump(2) + "\n");
}

}  // namespace cxnprobe::io
