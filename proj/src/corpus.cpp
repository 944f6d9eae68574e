#include "cxnprobe/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/rng.hpp"
#include "cxnprobe/text.hpp"

namespace cxnprobe {

namespace {

const std::vector<std::string> kCorpusColumns = {
    "id",     "sentence",   "span_start",     "span_end",
    "prep",   "noun_lemma", "noun_form",      "number",
    "cls",    "semantic_label", "distractor_type", "language",
};

std::size_t parse_offset(const std::string& s, const char* what) {
    if (s.empty()) throw SchemaError(std::string(what) + " is empty");
    std::size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw SchemaError(std::string(what) + " is not an integer: '" + s + "'");
    return static_cast<std::size_t>(v);
}

ConstructionInstance instance_from_fields(
    const std::vector<std::string>& fields,
    const std::vector<int>& col) {
    ConstructionInstance inst;
    auto at = [&](std::size_t i) -> const std::string& {
        static const std::string empty;
        int c = col[i];
        if (c < 0 || static_cast<std::size_t>(c) >= fields.size()) return empty;
        return fields[static_cast<std::size_t>(c)];
    };
    inst.id = at(0);
    inst.sentence = at(1);
    inst.span_start = parse_offset(at(2), "span_start");
    inst.span_end = parse_offset(at(3), "span_end");
    inst.prep = at(4);
    inst.noun_lemma = at(5);
    inst.noun_form = at(6);
    inst.number = number_from_string(at(7));
    inst.cls = instance_class_from_string(at(8));
    inst.semantic_label = semantic_label_from_string(at(9));
    inst.distractor_type = distractor_type_from_string(at(10));
    inst.language = at(11);
    if (inst.id.empty()) throw SchemaError("id is empty");
    if (inst.sentence.empty()) throw SchemaError("sentence is empty");
    if (inst.prep.empty()) throw SchemaError("prep is empty");
    return inst;
}

ConstructionInstance instance_from_json(const nlohmann::json& j) {
    ConstructionInstance inst;
    inst.id = j.at("id").get<std::string>();
    inst.sentence = j.at("sentence").get<std::string>();
    inst.span_start = j.at("span_start").get<std::size_t>();
    inst.span_end = j.at("span_end").get<std::size_t>();
    inst.prep = j.at("prep").get<std::string>();
    inst.noun_lemma = j.at("noun_lemma").get<std::string>();
    inst.noun_form = j.at("noun_form").get<std::string>();
    inst.number = number_from_string(j.at("number").get<std::string>());
    inst.cls = instance_class_from_string(j.at("cls").get<std::string>());
    inst.semantic_label = semantic_label_from_string(j.at("semantic_label").get<std::string>());
    inst.distractor_type = distractor_type_from_string(j.at("distractor_type").get<std::string>());
    inst.language = j.at("language").get<std::string>();
    if (inst.id.empty()) throw SchemaError("id is empty");
    return inst;
}

nlohmann::json instance_to_json(const ConstructionInstance& inst) {
    return nlohmann::json{
        {"id", inst.id},
        {"sentence", inst.sentence},
        {"span_start", inst.span_start},
        {"span_end", inst.span_end},
        {"prep", inst.prep},
        {"noun_lemma", inst.noun_lemma},
        {"noun_form", inst.noun_form},
        {"number", to_string(inst.number)},
        {"cls", to_string(inst.cls)},
        {"semantic_label", to_string(inst.semantic_label)},
        {"distractor_type", to_string(inst.distractor_type)},
        {"language", inst.language},
    };
}

}  // namespace

MorphLookup MorphLookup::from_file(const std::filesystem::path& path) {
    MorphLookup m;
    io::Table t = io::read_table(path);
    int form_col = t.column("form");
    int num_col = t.column("number");
    if (form_col < 0 || num_col < 0) {
        throw SchemaError("morph lookup needs columns form, number: " + path.string());
    }
    for (const auto& row : t.rows) {
        if (row.size() <= static_cast<std::size_t>(std::max(form_col, num_col))) continue;
        m.add(row[static_cast<std::size_t>(form_col)],
              number_from_string(row[static_cast<std::size_t>(num_col)]));
    }
    return m;
}

void MorphLookup::add(const std::string& form, Number n) {
    form_number_[text::normalize_lemma(form)] = n;
}

std::optional<Number> MorphLookup::number_of(const std::string& form) const {
    auto it = form_number_.find(text::normalize_lemma(form));
    if (it == form_number_.end()) return std::nullopt;
    return it->second;
}

ValidationReport validate_instance(const ConstructionInstance& inst,
                                   const MorphLookup* morph) {
    ValidationReport report;
    auto violate = [&](std::string code, std::string detail) {
        report.violations.push_back({std::move(code), std::move(detail)});
    };

    if (inst.cls == InstanceClass::Cxn) {
        if (inst.semantic_label == SemanticLabel::None) {
            violate("cxn_missing_semantic_label", "cls=CXN requires a semantic label");
        }
        if (inst.distractor_type != DistractorType::None) {
            violate("cxn_with_distractor_type",
                    "cls=CXN forbids distractor_type=" + to_string(inst.distractor_type));
        }
    } else {
        if (inst.distractor_type == DistractorType::None) {
            violate("distractor_missing_type", "cls=DISTRACTOR requires a distractor_type");
        }
    }

    const std::size_t sentence_cps = text::codepoint_count(inst.sentence);
    if (inst.span_start >= inst.span_end || inst.span_end > sentence_cps) {
        violate("span_out_of_range",
                "span [" + std::to_string(inst.span_start) + "," +
                    std::to_string(inst.span_end) + ") does not resolve in a " +
                    std::to_string(sentence_cps) + "-codepoint sentence");
        return report;  // span-dependent checks are meaningless now
    }

    const std::string span_text =
        text::substr_cp(inst.sentence, inst.span_start, inst.span_end);
    auto span_tokens = text::whitespace_tokens(span_text);

    bool prep_found = false;
    std::size_t prep_index = 0;
    for (std::size_t i = 0; i < span_tokens.size(); ++i) {
        if (text::matches_preposition(span_tokens[i].piece, inst.prep)) {
            prep_found = true;
            prep_index = i;
            break;
        }
    }
    if (!prep_found) {
        violate("prep_not_in_span",
                "prep '" + inst.prep + "' is not a standalone token of span '" + span_text + "'");
    }

    // Noun identity applies to constructions only; distractor patterns
    // (N-extended, PNPN, ...) legitimately break it.
    if (inst.cls == InstanceClass::Cxn && !span_tokens.empty()) {
        if (prep_found && (prep_index == 0 || prep_index + 1 == span_tokens.size())) {
            violate("prep_at_span_edge", "prep token has no noun on both sides");
        } else {
            const std::string first =
                text::normalize_lemma(text::strip_edge_punct(span_tokens.front().piece));
            const std::string last =
                text::normalize_lemma(text::strip_edge_punct(span_tokens.back().piece));
            if (first.empty() || last.empty() || first != last) {
                violate("noun_identity",
                        "span nouns differ: '" + span_tokens.front().piece + "' vs '" +
                            span_tokens.back().piece + "'");
            }
        }
    }

    if (morph != nullptr && !morph->empty()) {
        if (auto n = morph->number_of(inst.noun_form)) {
            if (*n != inst.number) {
                violate("number_mismatch",
                        "form '" + inst.noun_form + "' is " + to_string(*n) +
                            " per morphological lookup, instance says " +
                            to_string(inst.number));
            }
        } else {
            report.unverifiable.push_back("number: form '" + inst.noun_form +
                                          "' not in morphological lookup");
        }
    } else {
        report.unverifiable.push_back("number: no morphological lookup supplied");
    }

    return report;
}

LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                       const MorphLookup* morph) {
    LoadResult result;
    std::unordered_set<std::string> seen_ids;

    auto admit = [&](ConstructionInstance inst, std::size_t row) {
        if (!seen_ids.insert(inst.id).second) {
            throw IntegrityError("duplicate id '" + inst.id + "' at row " +
                                 std::to_string(row));
        }
        ValidationReport report = validate_instance(inst, morph);
        if (!report.ok()) {
            std::string reason;
            for (const auto& v : report.violations) {
                if (!reason.empty()) reason += "; ";
                reason += v.code + ": " + v.detail;
            }
            result.rejected.push_back({row, inst.id, reason});
            return;
        }
        result.instances.push_back(std::move(inst));
    };

    if (format == CorpusFormat::DelimitedTable) {
        io::Table t = io::read_table(path);
        std::vector<int> col;
        for (const auto& name : kCorpusColumns) {
            int c = t.column(name);
            if (c < 0) throw SchemaError("missing column '" + name + "' in " + path.string());
            col.push_back(c);
        }
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            try {
                admit(instance_from_fields(t.rows[r], col), r + 1);
            } catch (const IntegrityError&) {
                throw;
            } catch (const Error& e) {
                std::string id;
                if (col[0] >= 0 && static_cast<std::size_t>(col[0]) < t.rows[r].size()) {
                    id = t.rows[r][static_cast<std::size_t>(col[0])];
                }
                result.rejected.push_back({r + 1, id, e.what()});
            }
        }
    } else {
        auto records = io::read_jsonl(path);
        for (std::size_t r = 0; r < records.size(); ++r) {
            try {
                admit(instance_from_json(records[r]), r + 1);
            } catch (const IntegrityError&) {
                throw;
            } catch (const std::exception& e) {
                std::string id = records[r].value("id", "");
                result.rejected.push_back({r + 1, id, e.what()});
            }
        }
    }
    return result;
}

void write_corpus(const std::filesystem::path& path,
                  const std::vector<ConstructionInstance>& instances,
                  CorpusFormat format) {
    if (format == CorpusFormat::DelimitedTable) {
        io::Table t;
        t.delimiter = path.extension() == ".csv" ? ',' : '\t';
        t.header = kCorpusColumns;
        for (const auto& inst : instances) {
            t.rows.push_back({
                inst.id, inst.sentence, std::to_string(inst.span_start),
                std::to_string(inst.span_end), inst.prep, inst.noun_lemma,
                inst.noun_form, to_string(inst.number), to_string(inst.cls),
                to_string(inst.semantic_label), to_string(inst.distractor_type),
                inst.language,
            });
        }
        io::write_table(path, t);
    } else {
        std::vector<nlohmann::json> records;
        records.reserve(instances.size());
        for (const auto& inst : instances) records.push_back(instance_to_json(inst));
        io::write_jsonl(path, records);
    }
}

void write_rejection_report(const std::filesystem::path& path,
                            const std::vector<RowRejection>& rejected) {
    std::vector<nlohmann::json> records;
    records.reserve(rejected.size());
    for (const auto& r : rejected) {
        records.push_back({{"row", r.row}, {"id", r.id}, {"reason", r.reason}});
    }
    io::write_jsonl(path, records);
}

std::vector<ConstructionInstance> filter_corpus(
    const std::vector<ConstructionInstance>& instances, int min_tokens,
    int max_per_lemma_prep, std::uint64_t seed) {
    // Length filter first, then the per-(lemma, prep) cap.
    std::vector<std::size_t> long_enough;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (text::whitespace_token_count(instances[i].sentence) >=
            static_cast<std::size_t>(min_tokens)) {
            long_enough.push_back(i);
        }
    }

    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> buckets;
    for (std::size_t pos = 0; pos < long_enough.size(); ++pos) {
        const auto& inst = instances[long_enough[pos]];
        buckets[{text::normalize_lemma(inst.noun_lemma), inst.prep}].push_back(pos);
    }

    std::vector<bool> keep(long_enough.size(), true);
    for (const auto& [key, members] : buckets) {
        if (members.size() <= static_cast<std::size_t>(max_per_lemma_prep)) continue;
        SeededRng rng(SeededRng::derive(seed, "filter_cap",
                                        {fnv1a64(key.first), fnv1a64(key.second)}));
        auto chosen = rng.sample_indices(members.size(),
                                         static_cast<std::size_t>(max_per_lemma_prep));
        std::vector<bool> in_bucket_keep(members.size(), false);
        for (std::size_t c : chosen) in_bucket_keep[c] = true;
        for (std::size_t m = 0; m < members.size(); ++m) {
            if (!in_bucket_keep[m]) keep[members[m]] = false;
        }
    }

    std::vector<ConstructionInstance> out;
    out.reserve(long_enough.size());
    for (std::size_t pos = 0; pos < long_enough.size(); ++pos) {
        if (keep[pos]) out.push_back(instances[long_enough[pos]]);
    }
    return out;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    io::Table t = io::read_table(path);
    int id_col = t.column("id");
    int ann_col = t.column("annotator_id");
    int label_col = t.column("label");
    if (id_col < 0 || ann_col < 0 || label_col < 0) {
        throw SchemaError("annotation file needs columns id, annotator_id, label: " +
                          path.string());
    }
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<AnnotationRecord> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        auto field = [&](int c) {
            return static_cast<std::size_t>(c) < row.size() ? row[static_cast<std::size_t>(c)]
                                                            : std::string();
        };
        AnnotationRecord rec{field(id_col), field(ann_col), field(label_col)};
        if (rec.instance_id.empty() || rec.annotator_id.empty()) {
            throw SchemaError("annotation row " + std::to_string(r + 1) +
                              " missing id or annotator_id");
        }
        if (!seen.insert({rec.instance_id, rec.annotator_id}).second) {
            throw IntegrityError("duplicate (instance, annotator) pair: (" +
                                 rec.instance_id + ", " + rec.annotator_id + ")");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

void write_annotations(const std::filesystem::path& path,
                       const std::vector<AnnotationRecord>& records) {
    io::Table t;
    t.delimiter = path.extension() == ".csv" ? ',' : '\t';
    t.header = {"id", "annotator_id", "label"};
    for (const auto& r : records) {
        t.rows.push_back({r.instance_id, r.annotator_id, r.label});
    }
    io::write_table(path, t);
}

}  // namespace cxnprobe
