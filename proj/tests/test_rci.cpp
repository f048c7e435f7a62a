#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "rcb/errors.hpp"
#include "rcb/rci.hpp"

using namespace rcb;

TEST_CASE("sem from accuracy table") {
    // p = {0, 0.5, 1}: population SD = sqrt(1/6).
    const auto acc = test::make_accuracy("m", 10, {0, 5, 10});
    CHECK(sd_p(acc) == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-12));
    CHECK(sem(acc, 0.75) == doctest::Approx(std::sqrt(1.0 / 6.0) * 0.5).epsilon(1e-12));
    CHECK(sem(acc, 1.0) == doctest::Approx(0.0));

    SemOptions sample_opts;
    sample_opts.convention = SdConvention::sample;
    CHECK(sd_p(acc, sample_opts) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sem item selection honours min_valid") {
    auto set = test::make_trials("m", {{1, 1, 1, 1, 1, 1, 1, 1, 1, 1},
                                       {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                                       {1, 1, 1, -1, -1, -1, -1, -1, -1, -1}});
    const auto acc = compute_item_accuracy(set);
    // Third item has k_valid = 3 < 6 and must not enter SD(p).
    CHECK(sd_p(acc) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pair measurement arithmetic") {
    const auto pm = pair_measurement(0.058, 0.062);
    CHECK(pm.s_diff == doctest::Approx(0.0849).epsilon(1e-3));
    CHECK(pm.min_detectable_delta == doctest::Approx(0.1664).epsilon(1e-3));

    const auto pm2 = pair_measurement(0.045, 0.031);
    CHECK(pm2.s_diff == doctest::Approx(0.05464).epsilon(1e-3));
    CHECK(pm2.min_detectable_delta == doctest::Approx(0.1071).epsilon(1e-3));

    CHECK(pair_measurement(0.0, 0.0).degenerate);
    CHECK_FALSE(pm.degenerate);
}

TEST_CASE("classification worked examples") {
    auto pm = pair_measurement(0.058, 0.062);
    const auto v1 = test::make_accuracy("m1", 10, {2, 5, 0, 10, 3});
    const auto v2 = test::make_accuracy("m2", 10, {7, 5, 0, 10, 2});
    const auto cls = classify_items(v1, v2, pm);
    REQUIRE(cls.size() == 5);
    // 0.2 -> 0.7: RCI = 0.5 / 0.0849 = 5.89 > 1.96.
    CHECK(cls[0].category == Category::Improved);
    CHECK(cls[0].rci == doctest::Approx(5.89).epsilon(1e-2));
    // Identical accuracies.
    CHECK(cls[1].category == Category::NoChange);
    CHECK(cls[1].rci == doctest::Approx(0.0));
    // Floor (0,0) and ceiling (1,1).
    CHECK(cls[2].category == Category::ExcludedFloorCeiling);
    CHECK(cls[3].category == Category::ExcludedFloorCeiling);
    // 0.3 -> 0.2: |RCI| = 1.18, no reliable change.
    CHECK(cls[4].category == Category::NoChange);
}

TEST_CASE("insufficient-valid takes precedence over floor/ceiling") {
    const auto v1 = compute_item_accuracy(
        test::make_trials("m1", {{0, 0, 0, 0, 0, -1, -1, -1, -1, -1}}));
    const auto v2 = compute_item_accuracy(
        test::make_trials("m2", {{0, 0, 0, 0, 0, 0, 0, 0, 0, 0}}));
    const auto cls = classify_items(v1, v2, pair_measurement(0.05, 0.05));
    REQUIRE(cls.size() == 1);
    CHECK(cls[0].category == Category::ExcludedInsufficientValid);
}

TEST_CASE("both_extreme rule also drops mixed extremes") {
    const auto v1 = test::make_accuracy("m1", 10, {0, 0, 5});
    const auto v2 = test::make_accuracy("m2", 10, {0, 10, 6});
    const auto pm = pair_measurement(0.05, 0.05);

    const auto strict = classify_items(v1, v2, pm);
    CHECK(strict[0].category == Category::ExcludedFloorCeiling);
    CHECK(strict[1].category == Category::Improved);  // (0,1) stays under same_extreme

    ClassifyOptions opts;
    opts.floor_ceiling = FloorCeilingRule::both_extreme;
    const auto broad = classify_items(v1, v2, pm, opts);
    CHECK(broad[0].category == Category::ExcludedFloorCeiling);
    CHECK(broad[1].category == Category::ExcludedFloorCeiling);
    CHECK(broad[2].category == strict[2].category);
}

TEST_CASE("strict threshold inequality") {
    // Pick S_diff so one delta lands exactly on 1.96 * S_diff.
    const double s_diff = 0.1 / 1.96;
    PairMeasurement pm;
    pm.sem_v1 = pm.sem_v2 = s_diff / std::sqrt(2.0);
    pm.s_diff = s_diff;
    pm.min_detectable_delta = 0.1;
    const auto v1 = test::make_accuracy("m1", 10, {4, 4});
    const auto v2 = test::make_accuracy("m2", 10, {5, 6});
    const auto cls = classify_items(v1, v2, pm);
    CHECK(cls[0].category == Category::NoChange);  // RCI exactly 1.96
    CHECK(cls[1].category == Category::Improved);
}

TEST_CASE("classification trichotomy and swap antisymmetry") {
    std::mt19937 gen(42);
    std::uniform_int_distribution<int> count(0, 10);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<int> c1, c2;
        for (int i = 0; i < 40; ++i) {
            c1.push_back(count(gen));
            c2.push_back(count(gen));
        }
        const auto v1 = test::make_accuracy("m1", 10, c1);
        const auto v2 = test::make_accuracy("m2", 10, c2);
        const auto pm = pair_measurement(0.05, 0.07);
        const auto fwd = classify_items(v1, v2, pm);
        const auto rev = classify_items(v2, v1, pm);
        REQUIRE(fwd.size() == rev.size());
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            if (is_excluded(fwd[i].category)) {
                CHECK(rev[i].category == fwd[i].category);
                continue;
            }
            CHECK(rev[i].rci == doctest::Approx(-fwd[i].rci).epsilon(1e-12));
            if (fwd[i].category == Category::Improved)
                CHECK(rev[i].category == Category::Deteriorated);
            else if (fwd[i].category == Category::Deteriorated)
                CHECK(rev[i].category == Category::Improved);
            else
                CHECK(rev[i].category == Category::NoChange);
        }
    }
}

TEST_CASE("raising the threshold never adds changed items") {
    std::mt19937 gen(9);
    std::uniform_int_distribution<int> count(0, 10);
    std::vector<int> c1, c2;
    for (int i = 0; i < 60; ++i) {
        c1.push_back(count(gen));
        c2.push_back(count(gen));
    }
    const auto v1 = test::make_accuracy("m1", 10, c1);
    const auto v2 = test::make_accuracy("m2", 10, c2);
    std::size_t prev = v1.rows.size() + 1;
    for (double thr : {1.0, 1.5, 1.96, 2.58, 4.0}) {
        const auto rep = churn_report(classify_items(v1, v2, pair_measurement(0.05, 0.05, thr)));
        const std::size_t changed = rep.n_improved + rep.n_deteriorated;
        CHECK(changed <= prev);
        prev = changed;
    }
}

TEST_CASE("churn report counts and rates") {
    std::vector<RciClassification> cls;
    auto push = [&](Category c, double delta) {
        RciClassification r;
        r.item_id = "i" + std::to_string(cls.size());
        r.p_v1 = 0.5;
        r.p_v2 = 0.5 + delta;
        r.delta_p = delta;
        r.category = c;
        cls.push_back(r);
    };
    push(Category::Improved, 0.4);
    push(Category::Improved, 0.3);
    push(Category::Deteriorated, -0.25);
    push(Category::NoChange, 0.05);
    push(Category::NoChange, 0.0);
    push(Category::ExcludedFloorCeiling, 0.0);
    push(Category::ExcludedInsufficientValid, 0.0);
    push(Category::ExcludedInsufficientValid, 0.0);

    const auto rep = churn_report(cls);
    CHECK(rep.n_total == 8);
    CHECK(rep.n_excluded_insufficient == 2);
    CHECK(rep.n_excluded_floorceiling == 1);
    CHECK(rep.n_analysable == 5);
    CHECK(rep.n_improved == 2);
    CHECK(rep.n_deteriorated == 1);
    CHECK(rep.n_nochange == 2);
    CHECK(rep.net_surplus == 1);

    CHECK(rep.churn_rate_full == doctest::Approx(3.0 / 8.0));
    CHECK(rep.full_nochange_rate == doctest::Approx(5.0 / 8.0));
    CHECK(rep.churn_rate_post == doctest::Approx(3.0 / 5.0));
    CHECK(rep.post_improved_rate == doctest::Approx(2.0 / 5.0));

    // Both conventions agree on the changed-item count.
    CHECK(rep.churn_rate_full * 8.0 == doctest::Approx(rep.churn_rate_post * 5.0));

    // Effect sizes over analysable vs changed items.
    CHECK(rep.effect_analysable.n == 5);
    CHECK(rep.effect_analysable.mean_abs_delta == doctest::Approx(1.0 / 5.0));
    CHECK(rep.effect_changed.n == 3);
    CHECK(rep.effect_changed.mean_abs_delta == doctest::Approx(0.95 / 3.0));
    CHECK(rep.effect_changed.median_abs_delta == doctest::Approx(0.3));
    CHECK(rep.effect_changed.frac_abs_delta_ge_02 == doctest::Approx(1.0));
    CHECK(rep.effect_changed.frac_abs_delta_ge_04 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("churn report rejects an empty list") {
    CHECK_THROWS_AS(churn_report({}), AnalysisError);
}

TEST_CASE("single full-range stratum reproduces the global counts") {
    std::mt19937 gen(3);
    std::uniform_int_distribution<int> count(0, 10);
    std::vector<int> c1, c2;
    for (int i = 0; i < 50; ++i) {
        c1.push_back(count(gen));
        c2.push_back(count(gen));
    }
    const auto v1 = test::make_accuracy("m1", 10, c1);
    const auto v2 = test::make_accuracy("m2", 10, c2);
    const double r_xx = 0.9;
    const auto strata =
        stratified_sensitivity(v1, v2, r_xx, r_xx, {0.0, 1.0}, 1.96);
    REQUIRE(strata.size() == 1);
    CHECK_FALSE(strata[0].skipped);

    // The one bin holds every item, so its recomputed SEM equals the global
    // one and the classification must match the global run exactly.
    const auto pm = pair_measurement(sem(v1, r_xx), sem(v2, r_xx));
    const auto global_cls = classify_items(v1, v2, pm);
    const auto global_rep = churn_report(global_cls);
    CHECK(strata[0].n_improved == global_rep.n_improved);
    CHECK(strata[0].n_deteriorated == global_rep.n_deteriorated);
    CHECK(strata[0].churn_rate == doctest::Approx(strata[0].global_churn_rate));
}

TEST_CASE("stratified analysis shrinks SEM inside tight clusters") {
    // Two tight clusters of baseline difficulty. Within a bin the p spread is
    // small, so the per-bin S_diff drops below the global one.
    std::vector<int> c1, c2;
    for (int i = 0; i < 20; ++i) {
        c1.push_back(2 + i % 2);
        c2.push_back(2 + (i + 1) % 2);
    }
    for (int i = 0; i < 20; ++i) {
        c1.push_back(7 + i % 2);
        c2.push_back(7 + i % 2);
    }
    const auto v1 = test::make_accuracy("m1", 10, c1);
    const auto v2 = test::make_accuracy("m2", 10, c2);
    const double r_xx = 0.8;
    const auto global_pm = pair_measurement(sem(v1, r_xx), sem(v2, r_xx));
    const auto strata = stratified_sensitivity(v1, v2, r_xx, r_xx, {0.0, 0.5, 1.0}, 1.96);
    REQUIRE(strata.size() == 2);
    for (const auto& s : strata) {
        REQUIRE_FALSE(s.skipped);
        CHECK(s.pm.s_diff < global_pm.s_diff);
        CHECK(s.churn_rate >= s.global_churn_rate);
    }
}

TEST_CASE("stratified analysis skips undersized bins") {
    const auto v1 = test::make_accuracy("m1", 10, {1, 2, 8, 8, 9, 9});
    const auto v2 = test::make_accuracy("m2", 10, {2, 3, 8, 8, 9, 9});
    // Middle bin [0.4, 0.6) holds nothing.
    const auto strata =
        stratified_sensitivity(v1, v2, 0.9, 0.9, {0.0, 0.4, 0.6, 1.0}, 1.96);
    REQUIRE(strata.size() == 3);
    CHECK_FALSE(strata[0].skipped);
    CHECK(strata[1].skipped);
    CHECK(strata[1].n == 0);
    CHECK_FALSE(strata[2].skipped);
}

TEST_CASE("category helpers") {
    CHECK(is_changed(Category::Improved));
    CHECK(is_changed(Category::Deteriorated));
    CHECK_FALSE(is_changed(Category::NoChange));
    CHECK(is_excluded(Category::ExcludedFloorCeiling));
    CHECK(is_excluded(Category::ExcludedInsufficientValid));
    CHECK_FALSE(is_excluded(Category::NoChange));
    CHECK(std::string(category_name(Category::Improved)) == "improved");
}
