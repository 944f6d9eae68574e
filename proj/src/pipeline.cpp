#include "cxnprobe/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>

#include "cxnprobe/embed_cache.hpp"
#include "cxnprobe/encoder.hpp"
#include "cxnprobe/errors.hpp"
#include "cxnprobe/experiment.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/pca.hpp"
#include "cxnprobe/report.hpp"
#include "cxnprobe/results_io.hpp"
#include "cxnprobe/split_verify.hpp"
#include "cxnprobe/text.hpp"
#include "cxnprobe/version.hpp"

namespace cxnprobe {

namespace {

CorpusFormat corpus_format_from_string(const std::string& s) {
    if (s == "delimited-table") return CorpusFormat::DelimitedTable;
    if (s == "record-lines") return CorpusFormat::RecordLines;
    throw SchemaError("unknown corpus format '" + s + "'");
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

SplitConfiguration resolve_configuration(const ExperimentConfig& config,
                                         const std::string& name_or_path) {
    for (const auto& builtin : builtin_config_names()) {
        if (name_or_path == builtin) {
            SplitConfiguration c = config_by_name(builtin);
            c.seed = config.split_seed;
            return c;
        }
    }
    return config_from_json(io::read_json(name_or_path));
}

std::filesystem::path corpus_path(const ExperimentConfig& config) {
    if (config.replication) {
        const auto converted = config.output_dir / "converted_corpus.tsv";
        if (std::filesystem::exists(converted)) return converted;
    }
    return config.corpus;
}

struct LoadedCorpus {
    std::vector<ConstructionInstance> all;
    std::vector<ConstructionInstance> filtered;
    std::vector<RowRejection> rejected;
};

LoadedCorpus load_and_filter(const ExperimentConfig& config) {
    MorphLookup morph;
    if (config.morph_lookup) morph = MorphLookup::from_file(*config.morph_lookup);
    LoadResult loaded = load_corpus(corpus_path(config), config.corpus_format,
                                    config.morph_lookup ? &morph : nullptr);
    LoadedCorpus out;
    out.all = std::move(loaded.instances);
    out.rejected = std::move(loaded.rejected);
    out.filtered = filter_corpus(out.all, config.min_tokens,
                                 config.max_per_lemma_prep, config.filter_seed);
    return out;
}

std::filesystem::path split_file(const ExperimentConfig& config,
                                 const std::string& name, int split_index) {
    return config.splits_dir() /
           (sanitize_name(name) + "_split" + std::to_string(split_index) + ".jsonl");
}

std::vector<SplitAssignment> read_config_splits(const ExperimentConfig& config,
                                                const SplitConfiguration& sc) {
    std::vector<SplitAssignment> assignments;
    for (int k = 0; k < sc.n_splits; ++k) {
        const auto path = split_file(config, sc.name, k);
        if (!std::filesystem::exists(path)) {
            throw ResourceError("missing split file " + path.string() +
                                " (run the split stage first)");
        }
        auto loaded = read_assignments(path);
        if (loaded.size() != 1) {
            throw IntegrityError("split file " + path.string() +
                                 " holds " + std::to_string(loaded.size()) +
                                 " assignments, expected 1");
        }
        assignments.push_back(std::move(loaded.front()));
    }
    return assignments;
}

StaticVectorTable load_static_table(const StaticTableConfig& sc) {
    const OovPolicy policy = oov_policy_from_string(sc.oov_policy);
    if (sc.format == "text") {
        return StaticVectorTable::load_text(sc.path, policy, sc.id);
    }
    if (sc.format == "fasttext-bin") {
        return StaticVectorTable::load_fasttext_bin(sc.path, policy, sc.id);
    }
    throw SchemaError("unknown static table format '" + sc.format + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const nlohmann::json j = io::read_json(path);
    ExperimentConfig c;
    c.raw = j;
    c.corpus = j.at("corpus").get<std::string>();
    c.corpus_format =
        corpus_format_from_string(j.value("corpus_format", "delimited-table"));
    if (j.contains("annotations")) {
        c.annotations = j.at("annotations").get<std::string>();
    }
    if (j.contains("morph_lookup")) {
        c.morph_lookup = j.at("morph_lookup").get<std::string>();
    }
    c.configurations = j.at("configurations").get<std::vector<std::string>>();
    c.models = j.value("models", std::vector<std::string>{});
    c.helper = j.value("helper", "");
    if (j.contains("modes")) {
        c.modes.clear();
        for (const auto& m : j.at("modes")) {
            c.modes.push_back(target_mode_from_string(m.get<std::string>()));
        }
    }
    if (j.contains("static_tables")) {
        for (const auto& t : j.at("static_tables")) {
            StaticTableConfig sc;
            sc.id = t.at("id").get<std::string>();
            sc.path = t.at("path").get<std::string>();
            sc.format = t.value("format", "text");
            sc.oov_policy = t.value("oov_policy", "subword-compose");
            c.static_tables.push_back(std::move(sc));
        }
    }
    c.control = j.value("control", true);
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        c.filter_seed = s.value("filter", c.filter_seed);
        c.split_seed = s.value("split", c.split_seed);
        c.control_seed = s.value("control", c.control_seed);
    }
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        c.min_tokens = f.value("min_tokens", 6);
        c.max_per_lemma_prep = f.value("max_per_lemma_prep", 30);
    }
    c.decremental = j.value("decremental", true);
    if (j.contains("layers")) c.layers = j.at("layers").get<std::vector<int>>();
    if (j.contains("probe")) {
        const auto& p = j.at("probe");
        c.probe.l2 = p.value("l2", 1.0);
        c.probe.tol = p.value("tol", 1e-4);
        c.probe.max_iter = p.value("max_iter", 1000);
        c.probe.standardize = p.value("standardize", true);
        c.probe.seed = p.value("seed", static_cast<std::uint64_t>(0));
    }
    c.cache_dir = j.value("cache_dir", std::string("cache"));
    if (const char* env = std::getenv("CXNPROBE_CACHE_DIR")) {
        if (*env != '\0') c.cache_dir = env;
    }
    c.output_dir = j.value("output_dir", std::string("out"));
    if (j.contains("pca") && !j.at("pca").is_null()) {
        const auto& p = j.at("pca");
        c.pca.enabled = true;
        c.pca.subset = p.value("subset", 360);
        c.pca.seed = p.value("seed", static_cast<std::uint64_t>(17));
        c.pca.layer_step = p.value("layer_step", 1);
        c.pca.model = p.value("model", "");
        c.pca.mode = p.value("mode", "UNK");
    }
    c.replication = j.value("replication", false);
    if (j.contains("english_source")) {
        c.english_source = j.at("english_source").get<std::string>();
    }
    c.threads = j.value("threads", 0);

    if (c.replication && !c.english_source) {
        throw SchemaError("replication=true requires english_source");
    }
    return c;
}

std::filesystem::path convert_english_source(const ExperimentConfig& config) {
    if (!config.english_source) {
        throw SchemaError("no english_source configured");
    }
    io::Table t = io::read_table(*config.english_source);
    auto col = [&](const char* name) {
        const int c = t.column(name);
        if (c < 0) {
            throw SchemaError(std::string("english source misses column '") + name + "'");
        }
        return c;
    };
    const int c_sentence = col("sentence");
    const int c_target = col("target");
    const int c_cls = col("cls");
    const int c_label = col("semantic_label");
    const int c_lemma = col("lemma");
    const int c_prep = col("prep");
    const int c_form = t.column("form");      // optional
    const int c_number = t.column("number");  // optional
    const int c_dtype = t.column("distractor_type");  // optional

    std::vector<ConstructionInstance> corpus;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        auto field = [&](int c) {
            return c >= 0 && static_cast<std::size_t>(c) < row.size()
                       ? row[static_cast<std::size_t>(c)]
                       : std::string();
        };
        ConstructionInstance inst;
        inst.id = "en-" + std::to_string(r + 1);
        inst.sentence = field(c_sentence);
        const std::string target = field(c_target);
        // locate the target span (codepoints) as the first whole-token match
        const auto sentence_cps = text::decode_utf8(inst.sentence);
        const auto target_cps = text::decode_utf8(target);
        std::size_t found = sentence_cps.size();
        for (std::size_t i = 0; i + target_cps.size() <= sentence_cps.size(); ++i) {
            bool match = true;
            for (std::size_t k = 0; k < target_cps.size(); ++k) {
                if (sentence_cps[i + k] != target_cps[k]) {
                    match = false;
                    break;
                }
            }
            if (!match) continue;
            const bool left_ok = i == 0 || sentence_cps[i - 1] == U' ';
            const std::size_t after = i + target_cps.size();
            const bool right_ok = after == sentence_cps.size() ||
                                  sentence_cps[after] == U' ' ||
                                  sentence_cps[after] == U'.' ||
                                  sentence_cps[after] == U',';
            if (left_ok && right_ok) {
                found = i;
                break;
            }
        }
        if (found == sentence_cps.size()) {
            throw DataError("english source row " + std::to_string(r + 1) +
                            ": target '" + target + "' not found in sentence");
        }
        inst.span_start = found;
        inst.span_end = found + target_cps.size();
        inst.prep = field(c_prep);
        inst.noun_lemma = field(c_lemma);
        inst.noun_form = c_form >= 0 && !field(c_form).empty() ? field(c_form)
                                                               : field(c_lemma);
        inst.number = c_number >= 0 && !field(c_number).empty()
                          ? number_from_string(field(c_number))
                          : Number::Singular;
        inst.cls = instance_class_from_string(field(c_cls));
        inst.semantic_label = field(c_label).empty()
                                  ? SemanticLabel::None
                                  : semantic_label_from_string(field(c_label));
        inst.distractor_type = field(c_dtype).empty()
                                   ? (inst.cls == InstanceClass::Distractor
                                          ? DistractorType::ThematicTarget
                                          : DistractorType::None)
                                   : distractor_type_from_string(field(c_dtype));
        inst.language = "en";
        corpus.push_back(std::move(inst));
    }
    const auto out_path = config.output_dir / "converted_corpus.tsv";
    write_corpus(out_path, corpus, CorpusFormat::DelimitedTable);
    return out_path;
}

int cmd_validate(const ExperimentConfig& config) {
    if (config.replication) {
        const auto converted = convert_english_source(config);
        std::cout << "converted english source -> " << converted.string() << "\n";
    }
    LoadedCorpus corpus = load_and_filter(config);
    const auto report_path = config.output_dir / "validate" / "rejections.jsonl";
    write_rejection_report(report_path, corpus.rejected);

    std::cout << "corpus: " << corpus.all.size() << " valid instance(s), "
              << corpus.rejected.size() << " rejected, " << corpus.filtered.size()
              << " after filtering (>" << config.min_tokens - 1 << " tokens, <= "
              << config.max_per_lemma_prep << " per lemma-prep)\n";
    for (const auto& r : corpus.rejected) {
        std::cout << "  rejected row " << r.row << " id=" << r.id << ": " << r.reason
                  << "\n";
    }
    if (config.annotations) {
        const auto records = load_annotations(*config.annotations);
        std::cout << "annotations: " << records.size() << " record(s)\n";
    }
    return corpus.rejected.empty() ? 0 : 1;
}

int cmd_split(const ExperimentConfig& config, bool force) {
    LoadedCorpus corpus = load_and_filter(config);
    for (const auto& name : config.configurations) {
        SplitConfiguration sc = resolve_configuration(config, name);
        if (sc.declared_train_total &&
            *sc.declared_train_total != sc.partition_total(Partition::Train)) {
            std::cout << "note: configuration " << sc.name << " declares a train total of "
                      << *sc.declared_train_total << " but its cells sum to "
                      << sc.partition_total(Partition::Train)
                      << "; the cells are the operative contract\n";
        }
        for (int k = 0; k < sc.n_splits; ++k) {
            const auto path = split_file(config, sc.name, k);
            if (std::filesystem::exists(path) && !force) {
                throw ResourceError("refusing to overwrite " + path.string() +
                                    " (use --force)");
            }
        }
        auto assignments = generate_splits(corpus.filtered, sc);
        for (const auto& a : assignments) {
            ConstraintReport report = verify_split(corpus.filtered, a, sc);
            if (!report.ok()) {
                std::string detail;
                for (const auto& v : report.violations) {
                    detail += "\n  " + v.code + ": " + v.detail;
                }
                throw IntegrityError("generated split failed verification for '" +
                                     sc.name + "' split " +
                                     std::to_string(a.split_index) + detail);
            }
            write_assignments(split_file(config, sc.name, a.split_index), {a});
        }
        std::cout << "config " << sc.name << ": " << assignments.size()
                  << " split(s) written and verified\n";
    }
    return 0;
}

int cmd_extract(const ExperimentConfig& config) {
    LoadedCorpus corpus = load_and_filter(config);
    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus.filtered) by_id[inst.id] = &inst;

    // Everything any configured split touches needs an embedding.
    std::set<std::string> needed;
    for (const auto& name : config.configurations) {
        SplitConfiguration sc = resolve_configuration(config, name);
        for (const auto& a : read_config_splits(config, sc)) {
            needed.insert(a.train_ids.begin(), a.train_ids.end());
            needed.insert(a.test_ids.begin(), a.test_ids.end());
        }
        if (config.control) {
            // control splits are generated on the fly by the probe stage;
            // cover the whole eligible corpus so they cannot miss
            for (const auto& inst : corpus.filtered) needed.insert(inst.id);
        }
    }

    EmbeddingCache cache(config.cache_dir);
    for (const auto& model_id : config.models) {
        auto encoder = make_encoder(model_id, config.helper);
        for (TargetMode mode : config.modes) {
            std::size_t extracted = 0, reused = 0, failed = 0;
            for (const auto& id : needed) {
                auto it = by_id.find(id);
                if (it == by_id.end()) {
                    throw DataError("split id not in filtered corpus: " + id);
                }
                const auto& inst = *it->second;
                const std::uint64_t fp = extraction_fingerprint(
                    encoder->model_id(), encoder->tokenizer_version(), mode,
                    inst.sentence);
                if (cache.contains(id, mode, encoder->model_id(), fp)) {
                    ++reused;
                    continue;
                }
                if (cache.contains(id, mode, encoder->model_id())) {
                    std::cout << "warning: stale cache entry for " << id
                              << ", re-extracting\n";
                }
                try {
                    TargetSpec target = make_target(inst, mode);
                    cache.write(extract_embeddings(*encoder, inst, target),
                                encoder->tokenizer_version());
                    ++extracted;
                } catch (const DataError& e) {
                    // alignment failures exclude the instance, loudly
                    std::cout << "warning: skipping " << id << ": " << e.what() << "\n";
                    ++failed;
                }
            }
            std::cout << "model " << model_id << " mode " << to_string(mode) << ": "
                      << extracted << " extracted, " << reused << " cached, " << failed
                      << " skipped\n";
        }
    }
    return 0;
}

namespace {

ExperimentSpec build_spec(const ExperimentConfig& config,
                          const SplitConfiguration& sc,
                          std::vector<SplitAssignment> splits,
                          const std::vector<StaticVectorTable>& tables) {
    ExperimentSpec spec;
    spec.config = sc;
    spec.splits = std::move(splits);
    spec.model_ids = config.models;
    spec.modes = config.modes;
    for (const auto& t : tables) spec.static_tables.push_back(&t);
    spec.static_form_baseline = sc.label_kind == LabelKind::SemanticKind;
    spec.control = config.control;
    spec.layers = config.layers;
    if (!config.decremental) spec.train_sizes = {};  // full size only
    spec.probe = config.probe;
    spec.control_seed = config.control_seed;
    spec.threads = config.threads;
    if (!config.decremental) {
        spec.config.decremental_sizes.clear();
    }
    return spec;
}

}  // namespace

int cmd_probe(const ExperimentConfig& config) {
    LoadedCorpus corpus = load_and_filter(config);
    EmbeddingCache cache(config.cache_dir);

    std::vector<StaticVectorTable> tables;
    tables.reserve(config.static_tables.size());
    for (const auto& sc : config.static_tables) tables.push_back(load_static_table(sc));

    for (const auto& name : config.configurations) {
        SplitConfiguration sc = resolve_configuration(config, name);
        auto splits = read_config_splits(config, sc);
        ExperimentSpec spec = build_spec(config, sc, std::move(splits), tables);
        auto cells = run_experiment(corpus.filtered, spec, cache);
        auto summary = aggregate(cells);

        const std::string base = sanitize_name(sc.name);
        write_cells_jsonl(config.results_dir() / (base + "_cells.jsonl"), cells);
        write_summary_jsonl(config.results_dir() / (base + "_summary.jsonl"), summary);
        write_summary_table(config.results_dir() / (base + "_summary.tsv"), summary);
        std::cout << "config " << sc.name << ": " << cells.size() << " cells, "
                  << summary.size() << " summary rows\n";
    }
    return 0;
}

int cmd_report(const ExperimentConfig& config) {
    LoadedCorpus corpus = load_and_filter(config);
    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus.filtered) by_id[inst.id] = &inst;

    for (const auto& name : config.configurations) {
        SplitConfiguration sc = resolve_configuration(config, name);
        const std::string base = sanitize_name(sc.name);
        auto summary =
            read_summary_jsonl(config.results_dir() / (base + "_summary.jsonl"));

        CurveSpec curves;
        curves.config = sc.name;
        curves.title = sc.name;
        render_layer_curves(summary, curves, config.figures_dir() / (base + "_curves"));

        // Confusion panels per contextual mode at the best mean-accuracy
        // layer of the largest train size.
        std::vector<ConfusionPanel> panels;
        for (CellMode mode : {CellMode::Unk, CellMode::Prep}) {
            const SummaryRow* best = nullptr;
            for (const auto& r : summary) {
                if (r.mode != mode || !r.layer) continue;
                if (best == nullptr || r.train_size > best->train_size ||
                    (r.train_size == best->train_size &&
                     r.mean_accuracy > best->mean_accuracy)) {
                    best = &r;
                }
            }
            if (best == nullptr) continue;
            ConfusionPanel panel;
            panel.title = to_string(mode) + " (layer " +
                          std::to_string(*best->layer) + ")";
            panel.labels = best->classes;
            panel.matrix = best->confusion_sum;
            panels.push_back(std::move(panel));
        }
        if (!panels.empty()) {
            render_confusion(panels, config.figures_dir() / (base + "_confusion"));
        }

        if (config.pca.enabled && !config.models.empty()) {
            const std::string model =
                config.pca.model.empty() ? config.models.front() : config.pca.model;
            const TargetMode mode = target_mode_from_string(config.pca.mode);
            EmbeddingCache cache(config.cache_dir);
            auto store = cache.load_store(mode, model);

            std::set<std::string> in_splits;
            for (const auto& a : read_config_splits(config, sc)) {
                in_splits.insert(a.train_ids.begin(), a.train_ids.end());
                in_splits.insert(a.test_ids.begin(), a.test_ids.end());
            }
            std::vector<std::pair<std::string, std::string>> id_labels;
            std::map<std::string, std::string> label_of;
            for (const auto& id : in_splits) {
                auto it = by_id.find(id);
                if (it == by_id.end() || !store.row_of.count(id)) continue;
                const std::string label = split_label_of(*it->second, sc.label_kind);
                id_labels.emplace_back(id, label);
                label_of[id] = label;
            }
            auto subset =
                balanced_subset(id_labels, config.pca.subset, config.pca.seed);

            for (int layer = 1; layer <= store.layers;
                 layer += std::max(1, config.pca.layer_step)) {
                Eigen::MatrixXd rows(static_cast<Eigen::Index>(subset.size()),
                                     store.hidden);
                for (std::size_t i = 0; i < subset.size(); ++i) {
                    const float* row = store.row(subset[i], layer);
                    for (int c = 0; c < store.hidden; ++c) {
                        rows(static_cast<Eigen::Index>(i), c) = row[c];
                    }
                }
                PcaResult pca = pca_project(subset, rows, 3);
                const auto stem = base + "_pca_" + to_string(mode) + "_layer" +
                                  std::to_string(layer);
                export_pca_coords(pca, label_of,
                                  config.figures_dir() / "pca" / (stem + ".tsv"));
                render_pca(pca, label_of,
                           sc.name + " " + to_string(mode) + " layer " +
                               std::to_string(layer),
                           config.figures_dir() / "pca" / stem);
            }
        }
        std::cout << "config " << sc.name << ": figures written\n";
    }
    return 0;
}

namespace {

void write_manifest(const ExperimentConfig& config) {
    nlohmann::json manifest;
    manifest["tool_version"] = kVersion;
    manifest["config"] = config.raw;
    manifest["config_hash"] = to_hex(fnv1a64(config.raw.dump()));
    manifest["seeds"] = {{"filter", config.filter_seed},
                         {"split", config.split_seed},
                         {"control", config.control_seed},
                         {"probe", config.probe.seed}};

    nlohmann::json models = nlohmann::json::array();
    for (const auto& model_id : config.models) {
        nlohmann::json m{{"id", model_id}};
        if (model_id.rfind("synthetic:", 0) == 0) {
            // cheap to instantiate; records the shape it will produce
            auto enc = make_encoder(model_id);
            m["layers"] = enc->n_layers();
            m["hidden"] = enc->hidden_size();
            m["tokenizer_version"] = enc->tokenizer_version();
        }
        models.push_back(std::move(m));
    }
    manifest["models"] = models;

    // Content fingerprints of every artifact below the output directory.
    nlohmann::json artifacts = nlohmann::json::object();
    std::vector<std::filesystem::path> files;
    if (std::filesystem::exists(config.output_dir)) {
        for (const auto& entry :
             std::filesystem::recursive_directory_iterator(config.output_dir)) {
            if (!entry.is_regular_file()) continue;
            if (entry.path().filename() == "manifest.json") continue;
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const auto rel = std::filesystem::relative(f, config.output_dir).generic_string();
        artifacts[rel] = to_hex(fnv1a64(io::read_file(f)));
    }
    manifest["artifacts"] = artifacts;
    io::write_json(config.output_dir / "manifest.json", manifest);
}

}  // namespace

int cmd_run_all(const ExperimentConfig& config, bool force) {
    int status = cmd_validate(config);
    if (status != 0) return status;
    if ((status = cmd_split(config, force)) != 0) return status;
    if ((status = cmd_extract(config)) != 0) return status;
    if ((status = cmd_probe(config)) != 0) return status;
    if ((status = cmd_report(config)) != 0) return status;
    write_manifest(config);
    std::cout << "manifest written to "
              << (config.output_dir / "manifest.json").string() << "\n";
    return 0;
}

}  // namespace cxnprobe
