#include "cxnprobe/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <mutex>
#include <thread>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/rng.hpp"
#include "cxnprobe/text.hpp"

namespace cxnprobe {

std::string to_string(CellMode m) {
    switch (m) {
        case CellMode::Unk: return "UNK";
        case CellMode::Prep: return "PREP";
        case CellMode::StaticLemma: return "STATIC_LEMMA";
        case CellMode::StaticForm: return "STATIC_FORM";
        case CellMode::Control: return "CONTROL";
    }
    return "?";
}

CellMode cell_mode_from_string(const std::string& s) {
    if (s == "UNK") return CellMode::Unk;
    if (s == "PREP") return CellMode::Prep;
    if (s == "STATIC_LEMMA") return CellMode::StaticLemma;
    if (s == "STATIC_FORM") return CellMode::StaticForm;
    if (s == "CONTROL") return CellMode::Control;
    throw SchemaError("unknown cell mode '" + s + "'");
}

namespace {

CellMode cell_mode_of(TargetMode m) {
    return m == TargetMode::Unk ? CellMode::Unk : CellMode::Prep;
}

// A unit of probe work; resolved into an EvalCell independently of all
// others, so the grid can run on a thread pool.
struct CellTask {
    CellMode mode;
    std::string model_id;
    std::optional<int> layer;
    int split_index;
    int train_size;
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

void parallel_run(std::vector<std::function<void()>>& tasks, int threads) {
    int n = threads > 0 ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    n = std::min<int>(n, static_cast<int>(tasks.size()));
    if (n <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= tasks.size()) return;
                tasks[k]();
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::vector<EvalCell> run_experiment(const std::vector<ConstructionInstance>& corpus,
                                     const ExperimentSpec& spec,
                                     const EmbeddingCache& cache) {
    if (spec.splits.empty()) throw DataError("run_experiment: no splits supplied");

    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus) by_id[inst.id] = &inst;
    auto instance_of = [&](const std::string& id) -> const ConstructionInstance& {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw DataError("split id not in corpus: " + id);
        return *it->second;
    };

    // Control splits are lemma-disjoint versions of the task configuration.
    std::vector<SplitAssignment> control_splits = spec.control_splits;
    if (spec.control && !spec.model_ids.empty() && control_splits.empty()) {
        SplitConfiguration control_config = spec.config;
        control_config.group_by_lemma_only = true;
        control_config.seed = SeededRng::derive(spec.config.seed, "control_splits");
        control_config.n_splits = static_cast<int>(spec.splits.size());
        control_splits = generate_splits(corpus, control_config);
    }

    // Task labels and the control label map (built over the instances that
    // participate in any split).
    auto task_label = [&](const std::string& id) {
        return split_label_of(instance_of(id), spec.config.label_kind);
    };
    ControlLabelMap control_map;
    if (spec.control && !spec.model_ids.empty()) {
        std::set<std::string> in_play;
        for (const auto& a : control_splits) {
            in_play.insert(a.train_ids.begin(), a.train_ids.end());
            in_play.insert(a.test_ids.begin(), a.test_ids.end());
        }
        std::vector<ConstructionInstance> participants;
        std::vector<std::string> labels;
        for (const auto& id : in_play) {
            participants.push_back(instance_of(id));
            labels.push_back(task_label(id));
        }
        control_map = control_labels(participants, labels, spec.control_seed);
    }

    // Preflight: every (instance, mode, model) triple must be cached.
    std::set<std::string> all_ids;
    for (const auto& a : spec.splits) {
        all_ids.insert(a.train_ids.begin(), a.train_ids.end());
        all_ids.insert(a.test_ids.begin(), a.test_ids.end());
    }
    for (const auto& a : control_splits) {
        all_ids.insert(a.train_ids.begin(), a.train_ids.end());
        all_ids.insert(a.test_ids.begin(), a.test_ids.end());
    }
    std::map<std::pair<std::string, TargetMode>, EmbeddingCache::LoadedStore> stores;
    for (const auto& model : spec.model_ids) {
        for (TargetMode mode : spec.modes) {
            auto store = cache.load_store(mode, model);
            std::vector<std::string> missing;
            for (const auto& id : all_ids) {
                if (!store.row_of.count(id)) missing.push_back(id);
            }
            if (!missing.empty()) {
                std::string list;
                for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
                    if (i) list += ", ";
                    list += missing[i];
                }
                if (missing.size() > 20) list += ", ...";
                throw NotFoundError("embedding cache misses for (" + model + ", " +
                                    to_string(mode) + "): " + std::to_string(missing.size()) +
                                    " instance(s): " + list);
            }
            stores.emplace(std::make_pair(model, mode), std::move(store));
        }
    }

    // Enumerate the grid in a fixed order.
    std::vector<CellTask> tasks;
    for (const auto& model : spec.model_ids) {
        for (TargetMode mode : spec.modes) {
            const auto& store = stores.at({model, mode});
            std::vector<int> layers = spec.layers;
            if (layers.empty()) {
                for (int l = 0; l <= store.layers; ++l) layers.push_back(l);
            }
            for (const auto& assignment : spec.splits) {
                std::vector<int> sizes = spec.train_sizes;
                if (sizes.empty()) {
                    sizes = spec.config.decremental_sizes;
                }
                std::vector<std::vector<std::string>> subsets;
                if (sizes.empty()) {
                    sizes = {static_cast<int>(assignment.train_ids.size())};
                    subsets = {assignment.train_ids};
                } else {
                    subsets = decremental_subsets(corpus, spec.config, assignment, sizes);
                }
                for (int layer : layers) {
                    for (std::size_t s = 0; s < sizes.size(); ++s) {
                        CellTask task;
                        task.mode = cell_mode_of(mode);
                        task.model_id = model;
                        task.layer = layer;
                        task.split_index = assignment.split_index;
                        task.train_size = sizes[s];
                        task.train_ids = subsets[s];
                        task.test_ids = assignment.test_ids;
                        tasks.push_back(std::move(task));
                    }
                }
            }
        }
    }
    if (spec.control && !spec.model_ids.empty() && !spec.modes.empty()) {
        // Control runs per layer at full train size, on the first listed
        // contextual mode, for every model.
        for (const auto& model : spec.model_ids) {
            const auto& store = stores.at({model, spec.modes.front()});
            std::vector<int> layers = spec.layers;
            if (layers.empty()) {
                for (int l = 0; l <= store.layers; ++l) layers.push_back(l);
            }
            for (const auto& assignment : control_splits) {
                for (int layer : layers) {
                    CellTask task;
                    task.mode = CellMode::Control;
                    task.model_id = model;
                    task.layer = layer;
                    task.split_index = assignment.split_index;
                    task.train_size = static_cast<int>(assignment.train_ids.size());
                    task.train_ids = assignment.train_ids;
                    task.test_ids = assignment.test_ids;
                    tasks.push_back(std::move(task));
                }
            }
        }
    }
    for (const auto* table : spec.static_tables) {
        for (const auto& assignment : spec.splits) {
            CellTask lemma_task;
            lemma_task.mode = CellMode::StaticLemma;
            lemma_task.model_id = table->source_id();
            lemma_task.split_index = assignment.split_index;
            lemma_task.train_size = static_cast<int>(assignment.train_ids.size());
            lemma_task.train_ids = assignment.train_ids;
            lemma_task.test_ids = assignment.test_ids;
            tasks.push_back(lemma_task);
            if (spec.static_form_baseline) {
                CellTask form_task = lemma_task;
                form_task.mode = CellMode::StaticForm;
                tasks.push_back(form_task);
            }
        }
    }

    std::map<std::string, const StaticVectorTable*> tables;
    for (const auto* t : spec.static_tables) tables[t->source_id()] = t;

    auto features_for = [&](const CellTask& task, const std::vector<std::string>& ids)
        -> Eigen::MatrixXd {
        if (task.mode == CellMode::StaticLemma || task.mode == CellMode::StaticForm) {
            const auto* table = tables.at(task.model_id);
            Eigen::MatrixXd X(static_cast<Eigen::Index>(ids.size()), table->dim());
            for (std::size_t i = 0; i < ids.size(); ++i) {
                const auto& inst = instance_of(ids[i]);
                const auto v = task.mode == CellMode::StaticLemma
                                   ? lemma_features(inst, *table)
                                   : form_features(inst, *table);
                for (int c = 0; c < table->dim(); ++c) {
                    X(static_cast<Eigen::Index>(i), c) = v[static_cast<std::size_t>(c)];
                }
            }
            return X;
        }
        const TargetMode mode =
            task.mode == CellMode::Prep
                ? TargetMode::Prep
                : task.mode == CellMode::Unk ? TargetMode::Unk : spec.modes.front();
        const auto& store = stores.at({task.model_id, mode});
        Eigen::MatrixXd X(static_cast<Eigen::Index>(ids.size()), store.hidden);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const float* row = store.row(ids[i], *task.layer);
            for (int c = 0; c < store.hidden; ++c) {
                X(static_cast<Eigen::Index>(i), c) = static_cast<double>(row[c]);
            }
        }
        return X;
    };

    auto labels_for = [&](const CellTask& task, const std::vector<std::string>& ids) {
        std::vector<std::string> labels;
        labels.reserve(ids.size());
        for (const auto& id : ids) {
            labels.push_back(task.mode == CellMode::Control
                                 ? control_map.label_for(instance_of(id))
                                 : task_label(id));
        }
        return labels;
    };

    std::vector<EvalCell> cells(tasks.size());
    std::vector<std::function<void()>> jobs;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    jobs.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        jobs.push_back([&, i] {
            try {
                const CellTask& task = tasks[i];
                Eigen::MatrixXd train_x = features_for(task, task.train_ids);
                Eigen::MatrixXd test_x = features_for(task, task.test_ids);
                ProbeModel model =
                    train_probe(train_x, labels_for(task, task.train_ids), spec.probe);
                Evaluation eval = evaluate(model, test_x, labels_for(task, task.test_ids));

                EvalCell cell;
                cell.config = spec.config.name;
                cell.model_id = task.model_id;
                cell.mode = task.mode;
                cell.layer = task.layer;
                cell.split_index = task.split_index;
                cell.train_size = task.train_size;
                cell.accuracy = eval.accuracy;
                cell.classes = eval.classes;
                for (const auto& row : eval.confusion) {
                    cell.confusion.insert(cell.confusion.end(), row.begin(), row.end());
                }
                cells[i] = std::move(cell);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    parallel_run(jobs, spec.threads);
    if (first_error) std::rethrow_exception(first_error);
    return cells;
}

std::vector<SummaryRow> aggregate(const std::vector<EvalCell>& cells) {
    using Key = std::tuple<std::string, std::string, std::string, int, int>;
    std::map<Key, std::vector<const EvalCell*>> groups;
    for (const auto& cell : cells) {
        Key key{cell.config, cell.model_id, to_string(cell.mode),
                cell.layer.value_or(-1), cell.train_size};
        groups[key].push_back(&cell);
    }

    std::vector<SummaryRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, members] : groups) {
        SummaryRow row;
        row.config = std::get<0>(key);
        row.model_id = std::get<1>(key);
        row.mode = cell_mode_from_string(std::get<2>(key));
        if (std::get<3>(key) >= 0) row.layer = std::get<3>(key);
        row.train_size = std::get<4>(key);
        row.n_splits = static_cast<int>(members.size());
        row.classes = members.front()->classes;
        row.confusion_sum.assign(members.front()->confusion.size(), 0);

        double sum = 0.0;
        double sumsq = 0.0;
        for (const auto* cell : members) {
            if (cell->classes != row.classes) {
                throw DataError("aggregate: mixed label alphabets inside one condition");
            }
            if (cell->confusion.size() != row.confusion_sum.size()) {
                throw DataError("aggregate: confusion size mismatch");
            }
            sum += cell->accuracy;
            sumsq += cell->accuracy * cell->accuracy;
            for (std::size_t i = 0; i < cell->confusion.size(); ++i) {
                row.confusion_sum[i] += cell->confusion[i];
            }
        }
        const double n = static_cast<double>(members.size());
        row.mean_accuracy = sum / n;
        const double var = std::max(0.0, sumsq / n - row.mean_accuracy * row.mean_accuracy);
        row.stdev_accuracy = std::sqrt(var);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cxnprobe
