#pragma once

#include <cstdint>
#include <vector>

#include "cxnprobe/split.hpp"
#include "cxnprobe/types.hpp"

namespace cxnprobe::fixture {

// Synthetic Italian-like corpus generator. Produces construction instances
// and the eight distractor patterns in quantities that keep all shipped
// split configurations feasible, with a controlled amount of cross-label
// lemma overlap.  Used by the demo tool, the tests and the smoke pipeline.
struct FixtureParams {
    std::uint64_t seed = 42;
    int per_lemma = 5;  // instances per (lemma, category)

    // construction instances (category = semantic label x prep)
    int juxtaposition_a = 180;
    int succession_a = 100;
    int succession_su = 100;
    int accumulation_su = 180;
    int succession_per = 50;
    int succession_dopo = 50;
    int connection_a = 5;
    int idiosyncratic_a = 5;

    // distractor instances per type
    int pnpn_a = 70;
    int verbal_a = 60;
    int num_p_num_a = 50;
    int n_extended_a = 50;
    int n_extended_su = 40;
    int proper_name_su = 50;
    int n_su_n_giu_su = 40;
    int num_p_num_su = 50;
    int thematic_su = 60;

    // extra instances the length filter must drop
    int short_sentences = 4;
    // lemmas shared between the per/dopo pool and the a/su succession pool
    int cross_prep_overlap = 2;
};

FixtureParams full_fixture_params();   // defaults above (~1.1k instances)
FixtureParams smoke_fixture_params();  // ~210 instances

std::vector<ConstructionInstance> make_fixture_corpus(const FixtureParams& params);

// Cross-annotation table: n_annotators labels for the first n_instances
// CXN instances, with seeded disagreement between the two semantically
// adjacent labels.
std::vector<AnnotationRecord> make_fixture_annotations(
    const std::vector<ConstructionInstance>& corpus, int n_instances,
    int n_annotators, std::uint64_t seed, double disagreement = 0.12);

// Quota table scaled for the smoke fixture (train 20 / test 5 per cell).
SplitConfiguration smoke_split_config();

// Demo static vectors in text format: one row per lemma and inflected form
// seen in the corpus, plus a shared "plural" direction so a form-keyed probe
// can read number morphology the way a subword table would.
void write_fixture_vectors(const std::filesystem::path& path,
                           const std::vector<ConstructionInstance>& corpus,
                           int dim, std::uint64_t seed);

}  // namespace cxnprobe::fixture
