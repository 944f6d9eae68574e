#include "cxnprobe/results_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/io.hpp"

namespace cxnprobe {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

void write_cells_jsonl(const std::filesystem::path& path,
                       const std::vector<EvalCell>& cells) {
    std::vector<nlohmann::json> records;
    records.reserve(cells.size());
    for (const auto& c : cells) {
        nlohmann::json j{{"config", c.config},
                         {"model_id", c.model_id},
                         {"mode", to_string(c.mode)},
                         {"layer", nullptr},
                         {"split_index", c.split_index},
                         {"train_size", c.train_size},
                         {"accuracy", c.accuracy},
                         {"classes", c.classes},
                         {"confusion", c.confusion}};
        if (c.layer) j["layer"] = *c.layer;
        records.push_back(std::move(j));
    }
    io::write_jsonl(path, records);
}

std::vector<EvalCell> read_cells_jsonl(const std::filesystem::path& path) {
    std::vector<EvalCell> out;
    for (const auto& j : io::read_jsonl(path)) {
        EvalCell c;
        c.config = j.at("config").get<std::string>();
        c.model_id = j.at("model_id").get<std::string>();
        c.mode = cell_mode_from_string(j.at("mode").get<std::string>());
        if (!j.at("layer").is_null()) c.layer = j.at("layer").get<int>();
        c.split_index = j.at("split_index").get<int>();
        c.train_size = j.at("train_size").get<int>();
        c.accuracy = j.at("accuracy").get<double>();
        c.classes = j.at("classes").get<std::vector<std::string>>();
        c.confusion = j.at("confusion").get<std::vector<long long>>();
        out.push_back(std::move(c));
    }
    return out;
}

void write_summary_jsonl(const std::filesystem::path& path,
                         const std::vector<SummaryRow>& rows) {
    std::vector<nlohmann::json> records;
    records.reserve(rows.size());
    for (const auto& r : rows) {
        nlohmann::json j{{"config", r.config},
                         {"model_id", r.model_id},
                         {"mode", to_string(r.mode)},
                         {"layer", nullptr},
                         {"train_size", r.train_size},
                         {"n_splits", r.n_splits},
                         {"mean_accuracy", r.mean_accuracy},
                         {"stdev_accuracy", r.stdev_accuracy},
                         {"classes", r.classes},
                         {"confusion_sum", r.confusion_sum}};
        if (r.layer) j["layer"] = *r.layer;
        records.push_back(std::move(j));
    }
    io::write_jsonl(path, records);
}

std::vector<SummaryRow> read_summary_jsonl(const std::filesystem::path& path) {
    std::vector<SummaryRow> out;
    for (const auto& j : io::read_jsonl(path)) {
        SummaryRow r;
        r.config = j.at("config").get<std::string>();
        r.model_id = j.at("model_id").get<std::string>();
        r.mode = cell_mode_from_string(j.at("mode").get<std::string>());
        if (!j.at("layer").is_null()) r.layer = j.at("layer").get<int>();
        r.train_size = j.at("train_size").get<int>();
        r.n_splits = j.at("n_splits").get<int>();
        r.mean_accuracy = j.at("mean_accuracy").get<double>();
        r.stdev_accuracy = j.at("stdev_accuracy").get<double>();
        r.classes = j.at("classes").get<std::vector<std::string>>();
        r.confusion_sum = j.at("confusion_sum").get<std::vector<long long>>();
        out.push_back(std::move(r));
    }
    return out;
}

void write_summary_table(const std::filesystem::path& path,
                         const std::vector<SummaryRow>& rows) {
    io::Table t;
    t.delimiter = path.extension() == ".csv" ? ',' : '\t';
    t.header = {"config",       "model_id",      "mode",    "layer",
                "train_size",   "n_splits",      "mean_accuracy",
                "stdev_accuracy", "classes",     "confusion_sum"};
    for (const auto& r : rows) {
        std::vector<std::string> conf;
        conf.reserve(r.confusion_sum.size());
        for (long long v : r.confusion_sum) conf.push_back(std::to_string(v));
        t.rows.push_back({r.config, r.model_id, to_string(r.mode),
                          r.layer ? std::to_string(*r.layer) : "",
                          std::to_string(r.train_size), std::to_string(r.n_splits),
                          format_double(r.mean_accuracy),
                          format_double(r.stdev_accuracy), join(r.classes, '|'),
                          join(conf, ' ')});
    }
    io::write_table(path, t);
}

std::vector<SummaryRow> read_summary_table(const std::filesystem::path& path) {
    io::Table t = io::read_table(path);
    const std::vector<std::string> expected = {
        "config",       "model_id",      "mode",    "layer",
        "train_size",   "n_splits",      "mean_accuracy",
        "stdev_accuracy", "classes",     "confusion_sum"};
    if (t.header != expected) {
        throw SchemaError("unexpected summary table header in " + path.string());
    }
    std::vector<SummaryRow> out;
    for (const auto& row : t.rows) {
        if (row.size() != expected.size()) {
            throw SchemaError("short summary row in " + path.string());
        }
        SummaryRow r;
        r.config = row[0];
        r.model_id = row[1];
        r.mode = cell_mode_from_string(row[2]);
        if (!row[3].empty()) r.layer = std::stoi(row[3]);
        r.train_size = std::stoi(row[4]);
        r.n_splits = std::stoi(row[5]);
        r.mean_accuracy = std::stod(row[6]);
        r.stdev_accuracy = std::stod(row[7]);
        r.classes = split_on(row[8], '|');
        for (const auto& v : split_on(row[9], ' ')) {
            r.confusion_sum.push_back(std::stoll(v));
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace cxnprobe
