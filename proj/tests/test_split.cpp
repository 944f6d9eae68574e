#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cxnprobe/corpus.hpp"
#include "cxnprobe/errors.hpp"
#include "cxnprobe/split.hpp"
#include "cxnprobe/split_verify.hpp"
#include "cxnprobe/text.hpp"
#include "support/helpers.hpp"

using namespace cxnprobe;

namespace {

const std::vector<ConstructionInstance>& filtered_fixture() {
    static const auto corpus = filter_corpus(testsupport::full_fixture());
    return corpus;
}

std::map<std::string, int> cell_counts(const std::vector<ConstructionInstance>& corpus,
                                       const SplitConfiguration& config,
                                       const std::vector<std::string>& ids,
                                       Partition partition) {
    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus) by_id[inst.id] = &inst;
    std::map<std::string, int> counts;
    for (const auto& id : ids) {
        const auto& inst = *by_id.at(id);
        counts[to_string(QuotaKey{partition, split_label_of(inst, config.label_kind),
                                  inst.prep})] += 1;
    }
    return counts;
}

ConstructionInstance tiny_instance(const std::string& id, const std::string& lemma,
                                   const std::string& prep, InstanceClass cls,
                                   SemanticLabel sem, DistractorType dtype) {
    ConstructionInstance inst;
    inst.id = id;
    inst.sentence = "Li vedevo andare " + lemma + " " + prep + " " + lemma +
                    " senza fermarsi mai davvero.";
    inst.span_start = 17;
    inst.span_end = inst.span_start + 2 * text::codepoint_count(lemma) +
                    text::codepoint_count(prep) + 2;
    inst.prep = prep;
    inst.noun_lemma = lemma;
    inst.noun_form = lemma;
    inst.number = Number::Singular;
    inst.cls = cls;
    inst.semantic_label = sem;
    inst.distractor_type = dtype;
    return inst;
}

}  // namespace

TEST_CASE("SIMPLE configuration realizes the published quota cells") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    auto splits = generate_splits(corpus, config);
    REQUIRE(splits.size() == 5);
    for (const auto& a : splits) {
        CHECK(a.train_ids.size() == 480);
        CHECK(a.test_ids.size() == 120);
        auto train = cell_counts(corpus, config, a.train_ids, Partition::Train);
        CHECK(train["train/CXN/a"] == 120);
        CHECK(train["train/CXN/su"] == 120);
        CHECK(train["train/DISTRACTOR/a"] == 120);
        CHECK(train["train/DISTRACTOR/su"] == 120);
        auto test = cell_counts(corpus, config, a.test_ids, Partition::Test);
        for (const auto& [cell, n] : test) CHECK(n == 30);
        CHECK(verify_split(corpus, a, config).ok());
    }
}

TEST_CASE("DISAMBIG configuration matches its quota table") {
    const auto& corpus = filtered_fixture();
    auto config = disambig_config();
    auto splits = generate_splits(corpus, config);
    const std::string succ = to_string(SemanticLabel::SuccessionIterationDistributivity);
    const std::string accum = to_string(SemanticLabel::GreaterPluralityAccumulation);
    const std::string juxt = to_string(SemanticLabel::JuxtapositionContact);
    for (const auto& a : splits) {
        auto train = cell_counts(corpus, config, a.train_ids, Partition::Train);
        CHECK(train["train/" + succ + "/a"] == 60);
        CHECK(train["train/" + succ + "/su"] == 60);
        CHECK(train["train/" + accum + "/su"] == 120);
        CHECK(train["train/" + juxt + "/a"] == 120);
        auto test = cell_counts(corpus, config, a.test_ids, Partition::Test);
        CHECK(test["test/" + succ + "/a"] == 15);
        CHECK(test["test/" + succ + "/su"] == 15);
        CHECK(test["test/" + accum + "/su"] == 30);
        CHECK(test["test/" + juxt + "/a"] == 30);
        CHECK(verify_split(corpus, a, config).ok());
    }
}

TEST_CASE("PSEUDO and OTHER restrict training distractor types") {
    const auto& corpus = filtered_fixture();
    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus) by_id[inst.id] = &inst;

    for (auto config : {pseudo_config(), other_config()}) {
        auto splits = generate_splits(corpus, config);
        const auto& allowed = config.allowed_distractor_types.at(Partition::Train);
        std::set<DistractorType> seen_test;
        for (const auto& a : splits) {
            CHECK(verify_split(corpus, a, config).ok());
            for (const auto& id : a.train_ids) {
                const auto& inst = *by_id.at(id);
                if (inst.cls == InstanceClass::Distractor) {
                    CHECK(allowed.count(inst.distractor_type) == 1);
                }
            }
            for (const auto& id : a.test_ids) {
                const auto& inst = *by_id.at(id);
                if (inst.cls == InstanceClass::Distractor) {
                    seen_test.insert(inst.distractor_type);
                }
            }
        }
        // the test side is unrestricted: across the five splits it draws
        // types the training partition was barred from
        bool outside_allowed = false;
        for (auto t : seen_test) {
            if (!allowed.count(t)) outside_allowed = true;
        }
        CHECK(outside_allowed);
    }
}

TEST_CASE("generalization split takes every per/dopo instance as test") {
    const auto& corpus = filtered_fixture();
    auto assignment = generalization_split(corpus);
    CHECK(assignment.test_ids.size() == 100);

    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus) by_id[inst.id] = &inst;
    int per = 0, dopo = 0;
    for (const auto& id : assignment.test_ids) {
        const auto& inst = *by_id.at(id);
        if (inst.prep == "per") ++per;
        if (inst.prep == "dopo") ++dopo;
    }
    CHECK(per == 50);
    CHECK(dopo == 50);
    CHECK(assignment.train_ids.size() == 240);  // cells, not the caption total

    auto config = generalize_per_dopo_config();
    CHECK(config.declared_train_total == 360);  // discrepancy surfaced, not hidden
    CHECK(config.partition_total(Partition::Train) == 240);
    CHECK(verify_split(corpus, assignment, config).ok());
}

TEST_CASE("generalization split without per/dopo instances is an error") {
    std::vector<ConstructionInstance> corpus;
    for (const auto& inst : filtered_fixture()) {
        if (inst.prep != "per" && inst.prep != "dopo") corpus.push_back(inst);
    }
    CHECK_THROWS_AS(generalization_split(corpus), DataError);
}

TEST_CASE("splits are deterministic in (corpus, seed) and vary across indexes") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    auto first = generate_splits(corpus, config);
    auto second = generate_splits(corpus, config);
    for (std::size_t k = 0; k < first.size(); ++k) {
        CHECK(first[k].train_ids == second[k].train_ids);
        CHECK(first[k].test_ids == second[k].test_ids);
    }
    CHECK(first[0].train_ids != first[1].train_ids);

    config.seed = 999;
    auto reseeded = generate_splits(corpus, config);
    CHECK(reseeded[0].train_ids != first[0].train_ids);
}

TEST_CASE("single lemma covering a label forces infeasibility") {
    std::vector<ConstructionInstance> corpus;
    // one lemma for all CXN instances; distractors vary
    for (int i = 0; i < 20; ++i) {
        corpus.push_back(tiny_instance("c" + std::to_string(i), "porta", "a",
                                       InstanceClass::Cxn,
                                       SemanticLabel::JuxtapositionContact,
                                       DistractorType::None));
    }
    for (int i = 0; i < 20; ++i) {
        corpus.push_back(tiny_instance("d" + std::to_string(i),
                                       "lemma" + std::to_string(i), "a",
                                       InstanceClass::Distractor, SemanticLabel::None,
                                       DistractorType::Pnpn));
    }
    SplitConfiguration config;
    config.name = "tiny";
    config.label_kind = LabelKind::InstanceClassLabel;
    config.quotas[{Partition::Train, kClsCxn, "a"}] = 5;
    config.quotas[{Partition::Test, kClsCxn, "a"}] = 5;
    config.quotas[{Partition::Train, kClsDistractor, "a"}] = 5;
    config.quotas[{Partition::Test, kClsDistractor, "a"}] = 5;
    config.n_splits = 1;
    try {
        generate_splits(corpus, config);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.cell()).find("CXN/a") != std::string::npos);
    }
}

TEST_CASE("verify_split flags planted violations") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    config.n_splits = 1;
    auto assignment = generate_splits(corpus, config).front();

    SUBCASE("test id moved into train") {
        auto broken = assignment;
        broken.train_ids.push_back(broken.test_ids.front());
        auto report = verify_split(corpus, broken, config);
        bool dup = false;
        for (const auto& v : report.violations) {
            if (v.code == "duplicate_id") dup = true;
        }
        CHECK(dup);
    }

    SUBCASE("hand-built lemma-label overlap is named") {
        std::vector<ConstructionInstance> tiny;
        tiny.push_back(tiny_instance("t1", "porta", "a", InstanceClass::Cxn,
                                     SemanticLabel::JuxtapositionContact,
                                     DistractorType::None));
        tiny.push_back(tiny_instance("t2", "porta", "a", InstanceClass::Cxn,
                                     SemanticLabel::JuxtapositionContact,
                                     DistractorType::None));
        SplitConfiguration small;
        small.label_kind = LabelKind::InstanceClassLabel;
        small.quotas[{Partition::Train, kClsCxn, "a"}] = 1;
        small.quotas[{Partition::Test, kClsCxn, "a"}] = 1;
        SplitAssignment planted;
        planted.train_ids = {"t1"};
        planted.test_ids = {"t2"};
        auto report = verify_split(tiny, planted, small);
        bool named = false;
        for (const auto& v : report.violations) {
            if (v.code == "lemma_label_overlap" &&
                v.detail.find("porta") != std::string::npos &&
                v.detail.find("CXN") != std::string::npos) {
                named = true;
            }
        }
        CHECK(named);
    }
}

TEST_CASE("cross-label lemma overlap across partitions survives") {
    // The lemma "ponte" exists only with CXN instances on the a side and
    // DISTRACTOR instances on the a side; quotas force it onto both sides
    // under different labels, which the constraint set explicitly allows.
    std::vector<ConstructionInstance> corpus;
    for (int i = 0; i < 5; ++i) {
        corpus.push_back(tiny_instance("c" + std::to_string(i), "ponte", "a",
                                       InstanceClass::Cxn,
                                       SemanticLabel::JuxtapositionContact,
                                       DistractorType::None));
        corpus.push_back(tiny_instance("d" + std::to_string(i), "ponte", "a",
                                       InstanceClass::Distractor, SemanticLabel::None,
                                       DistractorType::Pnpn));
    }
    SplitConfiguration config;
    config.label_kind = LabelKind::InstanceClassLabel;
    config.quotas[{Partition::Train, kClsCxn, "a"}] = 5;
    config.quotas[{Partition::Test, kClsDistractor, "a"}] = 5;
    config.n_splits = 1;
    auto assignment = generate_splits(corpus, config).front();
    CHECK(assignment.train_ids.size() == 5);
    CHECK(assignment.test_ids.size() == 5);
    CHECK(verify_split(corpus, assignment, config).ok());
}

TEST_CASE("lemma-only grouping keeps lemmas on one side (control splits)") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    config.group_by_lemma_only = true;
    config.n_splits = 2;
    auto splits = generate_splits(corpus, config);
    std::map<std::string, const ConstructionInstance*> by_id;
    for (const auto& inst : corpus) by_id[inst.id] = &inst;
    for (const auto& a : splits) {
        CHECK(verify_split(corpus, a, config).ok());
        std::set<std::string> train_lemmas;
        for (const auto& id : a.train_ids) {
            train_lemmas.insert(text::normalize_lemma(by_id.at(id)->noun_lemma));
        }
        for (const auto& id : a.test_ids) {
            CHECK(train_lemmas.count(text::normalize_lemma(by_id.at(id)->noun_lemma)) ==
                  0);
        }
    }
}

TEST_CASE("decremental subsets are nested and exactly balanced") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    config.n_splits = 1;
    auto assignment = generate_splits(corpus, config).front();

    auto chain = decremental_subsets(corpus, config, assignment, {480, 240, 120, 60});
    REQUIRE(chain.size() == 4);
    CHECK(chain[0].size() == 480);
    CHECK(chain[1].size() == 240);
    CHECK(chain[2].size() == 120);
    CHECK(chain[3].size() == 60);

    for (std::size_t i = 1; i < chain.size(); ++i) {
        std::set<std::string> prev(chain[i - 1].begin(), chain[i - 1].end());
        for (const auto& id : chain[i]) CHECK(prev.count(id) == 1);
    }
    // per-cell counts 120/60/30/15
    const std::vector<int> expected = {120, 60, 30, 15};
    for (std::size_t i = 0; i < chain.size(); ++i) {
        auto counts = cell_counts(corpus, config, chain[i], Partition::Train);
        REQUIRE(counts.size() == 4);
        for (const auto& [cell, n] : counts) CHECK(n == expected[i]);
    }
}

TEST_CASE("decremental edge cases") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    config.n_splits = 1;
    auto assignment = generate_splits(corpus, config).front();

    auto identity = decremental_subsets(corpus, config, assignment, {480});
    REQUIRE(identity.size() == 1);
    CHECK(identity[0] == assignment.train_ids);

    CHECK_THROWS_AS(decremental_subsets(corpus, config, assignment, {480, 250}),
                    Error);
    CHECK_THROWS_AS(decremental_subsets(corpus, config, assignment, {480, 480}),
                    Error);
    CHECK_THROWS_AS(decremental_subsets(corpus, config, assignment, {100, 50}),
                    Error);
}

TEST_CASE("configurations round-trip through JSON") {
    for (const auto& name : builtin_config_names()) {
        auto config = config_by_name(name);
        auto back = config_from_json(config_to_json(config));
        CHECK(back.name == config.name);
        CHECK(back.label_kind == config.label_kind);
        CHECK(back.quotas == config.quotas);
        CHECK(back.allowed_distractor_types == config.allowed_distractor_types);
        CHECK(back.decremental_sizes == config.decremental_sizes);
        CHECK(back.test_exhaustive_preps == config.test_exhaustive_preps);
        CHECK(back.declared_train_total == config.declared_train_total);
    }
}

TEST_CASE("assignments round-trip through record lines") {
    const auto& corpus = filtered_fixture();
    auto config = simple_config();
    config.n_splits = 2;
    auto splits = generate_splits(corpus, config);
    testsupport::TempDir dir("assign");
    const auto path = dir.path() / "assignments.jsonl";
    write_assignments(path, splits);
    auto back = read_assignments(path);
    REQUIRE(back.size() == splits.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].split_index == splits[k].split_index);
        CHECK(back[k].train_ids == splits[k].train_ids);
        CHECK(back[k].test_ids == splits[k].test_ids);
    }
}
