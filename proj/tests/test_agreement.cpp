#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "cxnprobe/agreement.hpp"
#include "cxnprobe/errors.hpp"
#include "cxnprobe/rng.hpp"

using namespace cxnprobe;

namespace {

// Literal textbook alpha over enumerated pairs, used as the oracle against
// the coincidence-matrix implementation.
double brute_force_alpha(const std::vector<AnnotationRecord>& records,
                         const PenaltyMap& penalty) {
    std::map<std::string, std::vector<std::string>> units;
    for (const auto& r : records) units[r.instance_id].push_back(r.label);

    double d_obs_num = 0.0;
    double n_pairable = 0.0;
    std::vector<std::string> pooled;
    for (const auto& [unit, values] : units) {
        if (values.size() < 2) continue;
        const double m = static_cast<double>(values.size());
        n_pairable += m;
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (std::size_t j = 0; j < values.size(); ++j) {
                if (i == j) continue;
                d_obs_num += penalty(values[i], values[j]) / (m - 1.0);
            }
        }
        for (const auto& v : values) pooled.push_back(v);
    }
    const double d_obs = d_obs_num / n_pairable;

    double d_exp_num = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        for (std::size_t j = 0; j < pooled.size(); ++j) {
            if (i == j) continue;
            d_exp_num += penalty(pooled[i], pooled[j]);
        }
    }
    const double d_exp = d_exp_num / (n_pairable * (n_pairable - 1.0));
    if (d_exp == 0.0) return 1.0;
    return 1.0 - d_obs / d_exp;
}

std::vector<AnnotationRecord> toy_records() {
    // 3 annotators x 4 instances, mixed agreement
    return {
        {"u1", "a1", "red"},  {"u1", "a2", "red"},   {"u1", "a3", "blue"},
        {"u2", "a1", "blue"}, {"u2", "a2", "blue"},  {"u2", "a3", "blue"},
        {"u3", "a1", "red"},  {"u3", "a2", "green"}, {"u3", "a3", "green"},
        {"u4", "a1", "blue"}, {"u4", "a2", "red"},   {"u4", "a3", "red"},
    };
}

}  // namespace

TEST_CASE("cohen kappa on identical sequences with 2+ labels") {
    std::vector<std::string> a = {"x", "y", "x", "y", "x"};
    CHECK(cohen_kappa(a, a) == doctest::Approx(1.0));
}

TEST_CASE("cohen kappa is -1 for complementary balanced binary labels") {
    std::vector<std::string> a, b;
    SeededRng rng(99);
    for (int i = 0; i < 50; ++i) {
        a.push_back("x");
        a.push_back("y");
    }
    rng.shuffle(a);
    for (const auto& l : a) b.push_back(l == "x" ? "y" : "x");
    CHECK(cohen_kappa(a, b) == doctest::Approx(-1.0));
}

TEST_CASE("cohen kappa golden value from the 2x2 count table [[20,5],[10,15]]") {
    // p_o = 35/50 = 0.7; marginals A = (0.5, 0.5), B = (0.6, 0.4);
    // p_e = 0.5*0.6 + 0.5*0.4 = 0.5; kappa = (0.7-0.5)/(1-0.5) = 0.4
    std::vector<std::string> a, b;
    auto push = [&](int n, const char* la, const char* lb) {
        for (int i = 0; i < n; ++i) {
            a.push_back(la);
            b.push_back(lb);
        }
    };
    push(20, "0", "0");
    push(5, "0", "1");
    push(10, "1", "0");
    push(15, "1", "1");
    CHECK(cohen_kappa(a, b) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("cohen kappa conventions and errors") {
    std::vector<std::string> constant = {"x", "x", "x"};
    CHECK(cohen_kappa(constant, constant) == doctest::Approx(1.0));  // p_e = 1
    CHECK_THROWS_AS(cohen_kappa({"x"}, {"x", "y"}), Error);
    CHECK_THROWS_AS(cohen_kappa({}, {}), Error);
}

TEST_CASE("cohen kappa is symmetric") {
    std::vector<std::string> a = {"x", "y", "z", "x", "y", "x"};
    std::vector<std::string> b = {"x", "z", "z", "y", "y", "x"};
    CHECK(cohen_kappa(a, b) == doctest::Approx(cohen_kappa(b, a)));
}

TEST_CASE("krippendorff alpha: perfect agreement with 2+ labels") {
    std::vector<AnnotationRecord> records = {
        {"u1", "a1", "x"}, {"u1", "a2", "x"},
        {"u2", "a1", "y"}, {"u2", "a2", "y"},
    };
    CHECK(krippendorff_alpha(records) == doctest::Approx(1.0));
}

TEST_CASE("krippendorff alpha matches the brute-force pair enumeration") {
    const auto records = toy_records();
    const PenaltyMap nominal;
    CHECK(krippendorff_alpha(records) ==
          doctest::Approx(brute_force_alpha(records, nominal)).epsilon(1e-12));

    PenaltyMap weighted;
    weighted.set("red", "green", 0.5);
    CHECK(krippendorff_alpha(records, weighted) ==
          doctest::Approx(brute_force_alpha(records, weighted)).epsilon(1e-12));
}

TEST_CASE("krippendorff alpha invariances") {
    auto records = toy_records();
    const double base = krippendorff_alpha(records);

    // record order
    std::reverse(records.begin(), records.end());
    CHECK(krippendorff_alpha(records) == doctest::Approx(base));

    // annotator relabeling
    for (auto& r : records) r.annotator_id = "renamed-" + r.annotator_id;
    CHECK(krippendorff_alpha(records) == doctest::Approx(base));
}

TEST_CASE("krippendorff alpha error cases") {
    std::vector<AnnotationRecord> lonely = {{"u1", "a1", "x"}, {"u2", "a2", "y"}};
    CHECK_THROWS_AS(krippendorff_alpha(lonely), Error);
}

TEST_CASE("weighted alpha rises as the adjacent-pair penalty falls") {
    const auto records = toy_records();
    PenaltyMap strong;
    strong.set("red", "blue", 0.9);
    PenaltyMap weak;
    weak.set("red", "blue", 0.2);
    CHECK(krippendorff_alpha(records, weak) > krippendorff_alpha(records, strong));
}

TEST_CASE("pairwise kappas cover every annotator pair on shared instances") {
    const auto records = toy_records();
    auto pairs = pairwise_kappas(records);
    CHECK(pairs.size() == 3);  // 3 annotators
    for (const auto& p : pairs) CHECK(p.shared == 4);
}

TEST_CASE("penalty calibration recovers a planted penalty") {
    const auto records = toy_records();
    PenaltyMap planted;
    planted.set("red", "blue", 0.37);
    const double target = krippendorff_alpha(records, planted);
    auto calibrated = calibrate_pair_penalty(records, "red", "blue", target);
    REQUIRE(calibrated.has_value());
    PenaltyMap check;
    check.set("red", "blue", *calibrated);
    CHECK(krippendorff_alpha(records, check) == doctest::Approx(target).epsilon(1e-6));
    // unattainable targets are reported as such
    CHECK(!calibrate_pair_penalty(records, "red", "blue", 0.9999).has_value());
}
