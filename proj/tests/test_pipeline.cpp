#include <doctest.h>

#include "cxnprobe/corpus.hpp"
#include "cxnprobe/errors.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/pipeline.hpp"
#include "cxnprobe/text.hpp"
#include "support/helpers.hpp"

using namespace cxnprobe;

namespace {

nlohmann::json base_config(const std::filesystem::path& dir) {
    return nlohmann::json{
        {"corpus", (dir / "corpus.tsv").string()},
        {"configurations", {"SIMPLE"}},
        {"models", {"synthetic:t?layers=2&hidden=8"}},
        {"seeds", {{"filter", 7}, {"split", 13}, {"control", 99}}},
        {"cache_dir", (dir / "cache").string()},
        {"output_dir", (dir / "out").string()},
    };
}

}  // namespace

TEST_CASE("experiment config parses fields and defaults") {
    testsupport::TempDir dir("cfg");
    auto j = base_config(dir.path());
    j["modes"] = {"UNK"};
    j["probe"] = {{"l2", 2.0}, {"max_iter", 123}};
    j["filter"] = {{"min_tokens", 7}, {"max_per_lemma_prep", 10}};
    const auto path = dir.path() / "config.json";
    io::write_json(path, j);

    auto config = load_experiment_config(path);
    CHECK(config.corpus == dir.path() / "corpus.tsv");
    CHECK(config.configurations == std::vector<std::string>{"SIMPLE"});
    CHECK(config.modes == std::vector<TargetMode>{TargetMode::Unk});
    CHECK(config.probe.l2 == 2.0);
    CHECK(config.probe.max_iter == 123);
    CHECK(config.min_tokens == 7);
    CHECK(config.max_per_lemma_prep == 10);
    CHECK(config.split_seed == 13);
    CHECK(config.control);
    CHECK(!config.pca.enabled);
}

TEST_CASE("cache dir env override wins") {
    testsupport::TempDir dir("cfgenv");
    const auto path = dir.path() / "config.json";
    io::write_json(path, base_config(dir.path()));
    setenv("CXNPROBE_CACHE_DIR", "/tmp/other-cache", 1);
    auto config = load_experiment_config(path);
    unsetenv("CXNPROBE_CACHE_DIR");
    CHECK(config.cache_dir == std::filesystem::path("/tmp/other-cache"));
}

TEST_CASE("replication requires an english source") {
    testsupport::TempDir dir("cfg2");
    auto j = base_config(dir.path());
    j["replication"] = true;
    const auto path = dir.path() / "config.json";
    io::write_json(path, j);
    CHECK_THROWS_AS(load_experiment_config(path), SchemaError);
}

TEST_CASE("english source conversion produces the native schema") {
    testsupport::TempDir dir("conv");
    io::write_file(dir.path() / "english.csv",
                   "sentence,target,cls,semantic_label,lemma,form,number,prep\n"
                   "\"I was living moment to moment in those years.\",moment to "
                   "moment,CXN,succession_iteration_distributivity,moment,moment,"
                   "singular,to\n"
                   "\"Largesse was doled out by individuals to individuals "
                   "there.\",individuals to individuals,DISTRACTOR,none,individual,"
                   "individuals,plural,to\n");
    auto j = base_config(dir.path());
    j["replication"] = true;
    j["english_source"] = (dir.path() / "english.csv").string();
    const auto path = dir.path() / "config.json";
    io::write_json(path, j);
    auto config = load_experiment_config(path);

    const auto converted = convert_english_source(config);
    auto loaded = load_corpus(converted, CorpusFormat::DelimitedTable);
    CHECK(loaded.rejected.empty());
    REQUIRE(loaded.instances.size() == 2);
    CHECK(loaded.instances[0].language == "en");
    CHECK(loaded.instances[0].prep == "to");
    CHECK(loaded.instances[0].cls == InstanceClass::Cxn);
    const auto& inst = loaded.instances[0];
    CHECK(cxnprobe::text::substr_cp(inst.sentence, inst.span_start, inst.span_end) ==
          "moment to moment");
    CHECK(loaded.instances[1].cls == InstanceClass::Distractor);
}

TEST_CASE("missing target in the english source is a data error") {
    testsupport::TempDir dir("conv2");
    io::write_file(dir.path() / "english.csv",
                   "sentence,target,cls,semantic_label,lemma,form,number,prep\n"
                   "\"No such phrase here.\",moment to moment,CXN,"
                   "succession_iteration_distributivity,moment,moment,singular,to\n");
    auto j = base_config(dir.path());
    j["replication"] = true;
    j["english_source"] = (dir.path() / "english.csv").string();
    const auto path = dir.path() / "config.json";
    io::write_json(path, j);
    auto config = load_experiment_config(path);
    CHECK_THROWS_AS(convert_english_source(config), DataError);
}
