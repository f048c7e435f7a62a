#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "rcb/cohort.hpp"
#include "rcb/errors.hpp"

using namespace rcb;

namespace {

RciClassification make_cls(const std::string& id, double p_v1, Category cat,
                           double rci = 0.0, const std::string& domain = "") {
    RciClassification c;
    c.item_id = id;
    c.domain = domain;
    c.p_v1 = p_v1;
    c.p_v2 = p_v1;
    c.rci = rci;
    c.category = cat;
    return c;
}

}  // namespace

TEST_CASE("difficulty bins respect half-open edges") {
    std::vector<RciClassification> cls{
        make_cls("a", 0.0, Category::NoChange),
        make_cls("b", 0.19, Category::Improved),
        make_cls("c", 0.2, Category::NoChange),   // left edge of second bin
        make_cls("d", 0.8, Category::Deteriorated),
        make_cls("e", 1.0, Category::NoChange),   // last bin is closed
        make_cls("f", 0.5, Category::ExcludedFloorCeiling),  // never binned
    };
    const auto table = difficulty_bins(cls);
    REQUIRE(table.bins.size() == 5);
    CHECK(table.bins[0].n == 2);
    CHECK(table.bins[0].n_improved == 1);
    CHECK(table.bins[0].churn_rate == doctest::Approx(0.5));
    CHECK(table.bins[1].n == 1);
    CHECK(table.bins[2].n == 0);
    CHECK(table.bins[2].churn_rate == doctest::Approx(0.0));
    CHECK(table.bins[4].n == 2);
    CHECK(table.bins[4].n_deteriorated == 1);

    std::size_t total = 0;
    for (const auto& b : table.bins) total += b.n;
    CHECK(total == 5);  // exclusions stay out
}

TEST_CASE("difficulty bins validate edges") {
    const std::vector<RciClassification> cls{make_cls("a", 0.5, Category::NoChange)};
    CHECK_THROWS_AS(difficulty_bins(cls, {0.0, 0.5}), AnalysisError);
    CHECK_THROWS_AS(difficulty_bins(cls, {0.0, 0.5, 0.5, 1.0}), AnalysisError);
    CHECK_THROWS_AS(difficulty_bins(cls, {0.1, 0.5, 1.0}), AnalysisError);
}

TEST_CASE("domain contingency matches a hand-built table") {
    // law:     10 improved, 20 no change,  5 deteriorated
    // physics:  5 improved, 25 no change, 10 deteriorated
    std::vector<RciClassification> cls;
    auto fill = [&](const std::string& domain, int ni, int nn, int nd) {
        for (int i = 0; i < ni; ++i)
            cls.push_back(make_cls(domain + "i" + std::to_string(i), 0.5, Category::Improved, 3.0,
                                   domain));
        for (int i = 0; i < nn; ++i)
            cls.push_back(make_cls(domain + "n" + std::to_string(i), 0.5, Category::NoChange, 0.0,
                                   domain));
        for (int i = 0; i < nd; ++i)
            cls.push_back(make_cls(domain + "d" + std::to_string(i), 0.5, Category::Deteriorated,
                                   -3.0, domain));
    };
    fill("law", 10, 20, 5);
    fill("physics", 5, 25, 10);
    const auto res = domain_contingency(cls);
    CHECK(res.n == 75);
    CHECK(res.df == 2);
    REQUIRE(res.table.size() == 2);
    CHECK(res.table[0].domain == "law");
    CHECK(res.table[0].improvement_deterioration_ratio == doctest::Approx(2.0));
    CHECK(res.table[1].improvement_deterioration_ratio == doctest::Approx(0.5));

    // Independent chi-squared from the marginals.
    const double row_tot[2] = {35, 40};
    const double col_tot[3] = {15, 45, 15};
    const double obs[2][3] = {{10, 20, 5}, {5, 25, 10}};
    double chi2 = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double e = row_tot[i] * col_tot[j] / 75.0;
            chi2 += (obs[i][j] - e) * (obs[i][j] - e) / e;
        }
    }
    CHECK(res.chi2 == doctest::Approx(chi2).epsilon(1e-12));
    CHECK(res.p_value == doctest::Approx(stats::chi2_sf(chi2, 2)).epsilon(1e-12));
    CHECK(res.cramers_v == doctest::Approx(std::sqrt(chi2 / 75.0)).epsilon(1e-12));
}

TEST_CASE("domain contingency guards degenerate tables") {
    std::vector<RciClassification> one_domain{
        make_cls("a", 0.5, Category::Improved, 3.0, "law"),
        make_cls("b", 0.5, Category::NoChange, 0.0, "law"),
    };
    CHECK_THROWS_AS(domain_contingency(one_domain), AnalysisError);

    // No deteriorated item anywhere: an expected column is all zero.
    std::vector<RciClassification> no_det{
        make_cls("a", 0.5, Category::Improved, 3.0, "law"),
        make_cls("b", 0.5, Category::NoChange, 0.0, "law"),
        make_cls("c", 0.5, Category::Improved, 3.0, "physics"),
        make_cls("d", 0.5, Category::NoChange, 0.0, "physics"),
    };
    CHECK_THROWS_AS(domain_contingency(no_det), AnalysisError);
}

TEST_CASE("churn z-test forwards the chosen denominator") {
    ChurnReport a;
    a.n_total = 952;
    a.n_analysable = 800;
    a.churn_rate_full = 0.3;
    a.churn_rate_post = 0.35;
    ChurnReport b;
    b.n_total = 652;
    b.n_analysable = 600;
    b.churn_rate_full = 0.25;
    b.churn_rate_post = 0.28;

    const auto post = churn_rate_z_test(a, b);
    const auto want_post = stats::two_proportion_z(0.35, 800, 0.28, 600);
    CHECK(post.z == doctest::Approx(want_post.z));

    const auto full = churn_rate_z_test(a, b, ChurnDenominator::full);
    const auto want_full = stats::two_proportion_z(0.3, 952, 0.25, 652);
    CHECK(full.z == doctest::Approx(want_full.z));

    ChurnReport empty;
    CHECK_THROWS_AS(churn_rate_z_test(a, empty), AnalysisError);
}

TEST_CASE("cross-pair correlation over shared analysable items") {
    std::vector<RciClassification> a, b;
    const double xs[] = {-2.0, -0.5, 0.3, 1.1, 2.4};
    const double ys[] = {-1.6, -0.2, 0.1, 0.9, 2.7};
    for (int i = 0; i < 5; ++i) {
        a.push_back(make_cls("q" + std::to_string(i), 0.5, Category::NoChange, xs[i]));
        b.push_back(make_cls("q" + std::to_string(i), 0.5, Category::NoChange, ys[i]));
    }
    // Excluded in one pair: drops out of the shared set.
    a.push_back(make_cls("zz", 0.5, Category::NoChange, 9.9));
    b.push_back(make_cls("zz", 0.5, Category::ExcludedFloorCeiling, 0.0));
    // Only in pair a.
    a.push_back(make_cls("only_a", 0.5, Category::NoChange, 1.0));

    const auto res = cross_pair_correlation(a, b);
    CHECK(res.n_shared == 5);
    bool defined = false;
    const double want_r = stats::pearson({xs, xs + 5}, {ys, ys + 5}, &defined);
    CHECK(res.pearson_r == doctest::Approx(want_r).epsilon(1e-12));
    CHECK(res.p_value > 0.0);
    CHECK(res.p_value < 0.05);
    CHECK_FALSE(res.normal_approximation);
}

TEST_CASE("cross-pair correlation error cases") {
    std::vector<RciClassification> a{
        make_cls("x", 0.5, Category::NoChange, 1.0),
        make_cls("y", 0.5, Category::NoChange, 2.0),
    };
    CHECK_THROWS_AS(cross_pair_correlation(a, a), AnalysisError);  // < 3 shared

    std::vector<RciClassification> flat;
    for (int i = 0; i < 4; ++i) {
        flat.push_back(make_cls("q" + std::to_string(i), 0.5, Category::NoChange, 0.7));
    }
    CHECK_THROWS_AS(cross_pair_correlation(flat, flat), AnalysisError);  // zero variance
}

TEST_CASE("greedy comparison confusion and disagreement rates") {
    GreedyRun g1, g2;
    g1.model_id = "m1";
    g2.model_id = "m2";
    auto set = [&](const std::string& id, bool c1, bool c2) {
        g1.correct[id] = c1;
        g2.correct[id] = c2;
    };
    set("a", false, true);   // greedy improved
    set("b", false, true);   // greedy improved
    set("c", true, false);   // greedy deteriorated
    set("d", true, true);    // greedy no change
    set("e", false, false);  // greedy no change
    set("f", true, true);    // matched with an excluded classification
    g1.correct["greedy_only"] = true;  // no classification row

    std::vector<RciClassification> cls{
        make_cls("a", 0.2, Category::Improved, 3.0),
        make_cls("b", 0.2, Category::NoChange, 1.0),
        make_cls("c", 0.8, Category::NoChange, -1.0),
        make_cls("d", 0.5, Category::Improved, 2.5),
        make_cls("e", 0.5, Category::NoChange, 0.0),
        make_cls("f", 0.0, Category::ExcludedFloorCeiling, 0.0),
        make_cls("no_greedy", 0.5, Category::NoChange, 0.0),
    };

    const auto cmp = greedy_compare(g1, g2, cls);
    CHECK(cmp.n_matched == 6);
    CHECK(cmp.n_unmatched == 2);  // no_greedy + greedy_only
    // Excluded item counts as no-change on the RCI axis in the full framing.
    CHECK(cmp.confusion[1][1] == 2);  // e, f
    CHECK(cmp.confusion[0][0] == 1);  // a
    CHECK(cmp.confusion[0][1] == 1);  // b
    CHECK(cmp.confusion[2][1] == 1);  // c
    CHECK(cmp.confusion[1][0] == 1);  // d
    CHECK(cmp.exact_agreement_rate == doctest::Approx(3.0 / 6.0));
    CHECK(cmp.greedy_changed_rci_nochange_count == 2);
    CHECK(cmp.greedy_changed_rci_nochange_rate == doctest::Approx(2.0 / 3.0));
    CHECK(cmp.rci_changed_greedy_nochange_count == 1);
    CHECK(cmp.rci_changed_greedy_nochange_rate == doctest::Approx(1.0 / 2.0));

    const auto post = greedy_compare(g1, g2, cls, true);
    CHECK(post.n_matched == 5);  // f dropped entirely
    CHECK(post.confusion[1][1] == 1);
}

TEST_CASE("greedy file parsing round trips csv and jsonl") {
    const std::string csv_path = "greedy_test.csv";
    {
        std::ofstream out(csv_path);
        out << "item_id,correct,model_id\n";
        out << "a,true,m1\n";
        out << "b,0,m1\n";
    }
    const auto csv = parse_greedy_file(csv_path);
    CHECK(csv.model_id == "m1");
    CHECK(csv.correct.at("a"));
    CHECK_FALSE(csv.correct.at("b"));

    const std::string jsonl_path = "greedy_test.jsonl";
    {
        std::ofstream out(jsonl_path);
        out << "{\"item_id\":\"a\",\"model_id\":\"m2\",\"correct\":false}\n";
        out << "{\"item_id\":\"b\",\"model_id\":\"m2\",\"correct\":true}\n";
    }
    const auto jsonl = parse_greedy_file(jsonl_path);
    CHECK(jsonl.model_id == "m2");
    CHECK_FALSE(jsonl.correct.at("a"));
    CHECK(jsonl.correct.at("b"));

    {
        std::ofstream out(csv_path);
        out << "item_id,correct\n";
        out << "a,true\n";
        out << "a,false\n";
    }
    CHECK_THROWS_AS(parse_greedy_file(csv_path), ValidationError);
    CHECK_THROWS_AS(parse_greedy_file("no_such_file.csv"), IoError);

    std::remove(csv_path.c_str());
    std::remove(jsonl_path.c_str());
}
