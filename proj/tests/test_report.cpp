#include <doctest.h>

#include <cmath>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/pca.hpp"
#include "cxnprobe/report.hpp"
#include "cxnprobe/results_io.hpp"
#include "cxnprobe/rng.hpp"
#include "support/helpers.hpp"

using namespace cxnprobe;

namespace {

Eigen::MatrixXd random_matrix(int n, int d, std::uint64_t seed) {
    SeededRng rng(seed);
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) m(i, j) = rng.gaussian();
    }
    return m;
}

std::vector<std::string> make_ids(int n) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("id" + std::to_string(i));
    return ids;
}

std::vector<SummaryRow> tiny_summary() {
    std::vector<SummaryRow> rows;
    for (int layer = 1; layer <= 4; ++layer) {
        for (CellMode mode : {CellMode::Unk, CellMode::Prep, CellMode::Control}) {
            SummaryRow r;
            r.config = "SMOKE";
            r.model_id = "model-a";
            r.mode = mode;
            r.layer = layer;
            r.train_size = 80;
            r.n_splits = 5;
            r.mean_accuracy = mode == CellMode::Control ? 0.5 : 0.7 + 0.05 * layer;
            r.stdev_accuracy = 0.02;
            r.classes = {"CXN", "DISTRACTOR"};
            r.confusion_sum = {40, 10, 10, 40};
            rows.push_back(r);
        }
    }
    SummaryRow stat;
    stat.config = "SMOKE";
    stat.model_id = "vec";
    stat.mode = CellMode::StaticLemma;
    stat.train_size = 80;
    stat.n_splits = 5;
    stat.mean_accuracy = 0.65;
    stat.classes = {"CXN", "DISTRACTOR"};
    stat.confusion_sum = {35, 15, 15, 35};
    rows.push_back(stat);
    return rows;
}

}  // namespace

TEST_CASE("pca: data in a 2-plane has a zero third variance ratio") {
    const int n = 50;
    Eigen::MatrixXd plane = random_matrix(n, 2, 3);
    Eigen::MatrixXd embed(n, 5);
    embed.setZero();
    // plant the plane into 5-d space via a fixed linear map
    Eigen::MatrixXd lift(2, 5);
    lift << 1, 0.5, -0.25, 0, 2, 0, 1, 0.75, -1, 0.5;
    embed = plane * lift;
    auto result = pca_project(make_ids(n), embed, 3);
    CHECK(result.explained_variance_ratio[2] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(result.explained_variance_ratio[0] >= result.explained_variance_ratio[1]);
}

TEST_CASE("pca explained variance is rotation invariant") {
    const int n = 80, d = 6;
    Eigen::MatrixXd data = random_matrix(n, d, 4);
    // an orthonormal rotation from QR of a random matrix
    Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(d, d, 5)).householderQ();
    auto base = pca_project(make_ids(n), data, 3);
    auto rotated = pca_project(make_ids(n), data * q, 3);
    for (int c = 0; c < 3; ++c) {
        CHECK(base.explained_variance_ratio[static_cast<std::size_t>(c)] ==
              doctest::Approx(
                  rotated.explained_variance_ratio[static_cast<std::size_t>(c)])
                  .epsilon(1e-9));
    }
}

TEST_CASE("pca top-3 reconstruction matches the SVD oracle within 1e-6") {
    const int n = 360;
    const int d = 48;
    Eigen::MatrixXd data = random_matrix(n, d, 6);
    auto result = pca_project(make_ids(n), data, 3);

    Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    // independent route: thin SVD of the centered matrix
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd v3 = svd.matrixV().leftCols(3);
    const double recon_svd =
        (centered - centered * v3 * v3.transpose()).squaredNorm();
    const double recon_pca =
        (centered - centered * result.axes.transpose() * result.axes).squaredNorm();
    CHECK(std::abs(recon_svd - recon_pca) / std::max(1.0, recon_svd) < 1e-6);

    // variance ratios agree with the singular values
    const double total = centered.squaredNorm();
    for (int c = 0; c < 3; ++c) {
        const double sv = svd.singularValues()[c];
        CHECK(result.explained_variance_ratio[static_cast<std::size_t>(c)] ==
              doctest::Approx(sv * sv / total).epsilon(1e-9));
    }
}

TEST_CASE("pca output is deterministic with canonical signs") {
    const int n = 40;
    Eigen::MatrixXd data = random_matrix(n, 8, 7);
    auto a = pca_project(make_ids(n), data, 3);
    auto b = pca_project(make_ids(n), data, 3);
    CHECK(a.coords == b.coords);
    for (int c = 0; c < 3; ++c) {
        Eigen::Index arg_max = 0;
        for (Eigen::Index i = 1; i < a.axes.cols(); ++i) {
            if (std::abs(a.axes(c, i)) > std::abs(a.axes(c, arg_max))) arg_max = i;
        }
        CHECK(a.axes(c, arg_max) > 0.0);
    }
}

TEST_CASE("pca rank and size errors") {
    Eigen::MatrixXd thin = random_matrix(2, 5, 8);
    CHECK_THROWS_AS(pca_project(make_ids(2), thin, 3), DataError);
    Eigen::MatrixXd narrow = random_matrix(20, 2, 9);
    CHECK_THROWS_AS(pca_project(make_ids(20), narrow, 3), DataError);
    // numerically rank-1 data succeeds with zero trailing variance ratios
    Eigen::MatrixXd rank1(20, 4);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 4; ++j) rank1(i, j) = static_cast<double>(i) * (j + 1);
    }
    auto res = pca_project(make_ids(20), rank1, 3);
    CHECK(res.explained_variance_ratio[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(res.explained_variance_ratio[2] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("balanced_subset balances labels with seeded determinism") {
    std::vector<std::pair<std::string, std::string>> id_labels;
    for (int i = 0; i < 100; ++i) {
        id_labels.emplace_back("a" + std::to_string(i), "alpha");
        id_labels.emplace_back("b" + std::to_string(i), "beta");
        id_labels.emplace_back("c" + std::to_string(i), "gamma");
    }
    auto subset = balanced_subset(id_labels, 60, 17);
    CHECK(subset.size() == 60);
    int alpha = 0;
    for (const auto& id : subset) {
        if (id[0] == 'a') ++alpha;
    }
    CHECK(alpha == 20);
    CHECK(balanced_subset(id_labels, 60, 17) == subset);
    CHECK_THROWS_AS(balanced_subset(id_labels, 50, 17), DataError);  // 50 % 3 != 0
}

TEST_CASE("layer curves render deterministically to svg and png") {
    testsupport::TempDir dir("curves");
    auto summary = tiny_summary();
    CurveSpec spec;
    spec.config = "SMOKE";
    spec.title = "smoke";
    const auto base = dir.path() / "curves";
    render_layer_curves(summary, spec, base);
    REQUIRE(std::filesystem::exists(base.string() + ".svg"));
    REQUIRE(std::filesystem::exists(base.string() + ".png"));

    const auto svg1 = io::read_file(base.string() + ".svg");
    const auto png1 = io::read_file(base.string() + ".png");
    render_layer_curves(summary, spec, base);
    CHECK(io::read_file(base.string() + ".svg") == svg1);  // byte-identical
    CHECK(io::read_file(base.string() + ".png") == png1);

    // png signature sanity
    CHECK(static_cast<unsigned char>(png1[0]) == 0x89);
    CHECK(png1.substr(1, 3) == "PNG");
}

TEST_CASE("layer curves fail loudly on empty filters") {
    auto summary = tiny_summary();
    CurveSpec spec;
    spec.config = "MISSING";
    testsupport::TempDir dir("curves2");
    CHECK_THROWS_WITH_AS(render_layer_curves(summary, spec, dir.path() / "x"),
                         doctest::Contains("MISSING"), DataError);
}

TEST_CASE("single-point series render without crashing") {
    std::vector<SummaryRow> one;
    SummaryRow r;
    r.config = "ONE";
    r.model_id = "m";
    r.mode = CellMode::Unk;
    r.layer = 1;
    r.train_size = 10;
    r.n_splits = 1;
    r.mean_accuracy = 0.5;
    r.classes = {"CXN", "DISTRACTOR"};
    r.confusion_sum = {1, 0, 0, 1};
    one.push_back(r);
    testsupport::TempDir dir("curves3");
    CurveSpec spec;
    spec.config = "ONE";
    render_layer_curves(one, spec, dir.path() / "one");
    CHECK(std::filesystem::exists(dir.path() / "one.svg"));
}

TEST_CASE("confusion panels render with raw-count annotations") {
    testsupport::TempDir dir("conf");
    ConfusionPanel unk{"UNK", {"CXN", "DISTRACTOR"}, {55, 5, 8, 52}};
    ConfusionPanel prep{"PREP", {"CXN", "DISTRACTOR"}, {57, 3, 9, 51}};
    render_confusion({unk, prep}, dir.path() / "confusion");
    const auto svg = io::read_file(dir.path() / "confusion.svg");
    CHECK(svg.find(">55<") != std::string::npos);  // raw counts annotated
    CHECK(svg.find("UNK") != std::string::npos);
    CHECK(svg.find("PREP") != std::string::npos);

    SUBCASE("non-square matrices are rejected") {
        ConfusionPanel bad{"X", {"a", "b"}, {1, 2, 3}};
        CHECK_THROWS_AS(render_confusion({bad}, dir.path() / "bad"), DataError);
    }

    SUBCASE("3x3 disambiguation labels keep the canonical order") {
        auto order = canonical_label_order({"juxtaposition_contact",
                                            "succession_iteration_distributivity",
                                            "greater_plurality_accumulation"});
        CHECK(order[0] == "succession_iteration_distributivity");
        CHECK(order[1] == "greater_plurality_accumulation");
        CHECK(order[2] == "juxtaposition_contact");
    }
}

TEST_CASE("pca figure and coordinate export") {
    testsupport::TempDir dir("pcafig");
    const int n = 30;
    auto res = pca_project(make_ids(n), random_matrix(n, 6, 10), 3);
    std::map<std::string, std::string> labels;
    for (int i = 0; i < n; ++i) {
        labels["id" + std::to_string(i)] = i % 2 == 0 ? "CXN" : "DISTRACTOR";
    }
    export_pca_coords(res, labels, dir.path() / "coords.tsv");
    auto table = io::read_table(dir.path() / "coords.tsv");
    CHECK(table.rows.size() == n);
    CHECK(table.header.front() == "id");
    render_pca(res, labels, "layer 1", dir.path() / "pca");
    CHECK(std::filesystem::exists(dir.path() / "pca.svg"));
    CHECK(std::filesystem::exists(dir.path() / "pca.png"));
}

TEST_CASE("results round-trip through record lines and delimited tables") {
    testsupport::TempDir dir("results");
    auto summary = tiny_summary();

    const auto jsonl = dir.path() / "summary.jsonl";
    write_summary_jsonl(jsonl, summary);
    auto back = read_summary_jsonl(jsonl);
    REQUIRE(back.size() == summary.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].mean_accuracy == summary[i].mean_accuracy);
        CHECK(back[i].confusion_sum == summary[i].confusion_sum);
        CHECK(back[i].layer == summary[i].layer);
    }
    // write -> read -> write produces identical bytes
    const auto jsonl2 = dir.path() / "summary2.jsonl";
    write_summary_jsonl(jsonl2, back);
    CHECK(io::read_file(jsonl) == io::read_file(jsonl2));

    const auto tsv = dir.path() / "summary.tsv";
    write_summary_table(tsv, summary);
    auto back_tsv = read_summary_table(tsv);
    REQUIRE(back_tsv.size() == summary.size());
    for (std::size_t i = 0; i < back_tsv.size(); ++i) {
        CHECK(back_tsv[i].mean_accuracy == summary[i].mean_accuracy);
        CHECK(back_tsv[i].classes == summary[i].classes);
    }
    const auto tsv2 = dir.path() / "summary2.tsv";
    write_summary_table(tsv2, back_tsv);
    CHECK(io::read_file(tsv) == io::read_file(tsv2));

    // empty summary -> header-only file
    write_summary_table(dir.path() / "empty.tsv", {});
    auto empty = io::read_table(dir.path() / "empty.tsv");
    CHECK(empty.rows.empty());

    // cells round-trip too
    EvalCell cell;
    cell.config = "X";
    cell.model_id = "m";
    cell.mode = CellMode::Prep;
    cell.layer = 2;
    cell.split_index = 1;
    cell.train_size = 80;
    cell.accuracy = 1.0 / 3.0;
    cell.classes = {"a", "b"};
    cell.confusion = {3, 1, 0, 4};
    const auto cells_path = dir.path() / "cells.jsonl";
    write_cells_jsonl(cells_path, {cell});
    auto cells_back = read_cells_jsonl(cells_path);
    REQUIRE(cells_back.size() == 1);
    CHECK(cells_back[0].accuracy == cell.accuracy);  // exact double round-trip
    CHECK(cells_back[0].confusion == cell.confusion);
}
