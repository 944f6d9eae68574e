#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "cxnprobe/corpus.hpp"
#include "cxnprobe/fixture.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/rng.hpp"
#include "cxnprobe/text.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generates a synthetic NPN fixture corpus, annotations and vectors"};

    std::string out_dir = "data/fixture";
    std::string profile = "full";
    std::uint64_t seed = 42;
    int vector_dim = 32;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--profile", profile, "full | smoke")->check(CLI::IsMember({"full", "smoke"}));
    app.add_option("--seed", seed, "fixture seed");
    app.add_option("--vector-dim", vector_dim, "static vector dimensionality");

    CLI11_PARSE(app, argc, argv);

    try {
        using namespace cxnprobe;
        fixture::FixtureParams params = profile == "smoke"
                                            ? fixture::smoke_fixture_params()
                                            : fixture::full_fixture_params();
        params.seed = seed;
        const auto corpus = fixture::make_fixture_corpus(params);
        const std::filesystem::path dir(out_dir);
        write_corpus(dir / "corpus.tsv", corpus, CorpusFormat::DelimitedTable);
        const auto annotations =
            fixture::make_fixture_annotations(corpus, 100, 5, seed);
        write_annotations(dir / "annotations.tsv", annotations);
        fixture::write_fixture_vectors(dir / "vectors.vec", corpus, vector_dim, seed);
        if (profile == "smoke") {
            io::write_json(dir / "smoke_config.json",
                           config_to_json(fixture::smoke_split_config()));
        }
        std::cout << "wrote " << corpus.size() << " instances, "
                  << annotations.size() << " annotation records to " << out_dir
                  << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
