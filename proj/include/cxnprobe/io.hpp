#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace cxnprobe::io {

// A parsed delimited table. The delimiter (tab or comma) is declared by the
// header row: tab wins if the header contains one. Comma-delimited files use
// RFC 4180 quoting; tab-delimited fields are raw.
struct Table {
    char delimiter = '\t';
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 if absent
};

Table read_table(const std::filesystem::path& path);
Table parse_table(const std::string& content);
void write_table(const std::filesystem::path& path, const Table& table);
std::string format_table(const Table& table);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Record-lines: one JSON object per line.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path,
                 const std::vector<nlohmann::json>& records);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace cxnprobe::io
