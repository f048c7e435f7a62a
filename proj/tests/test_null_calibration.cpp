#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "rcb/errors.hpp"
#include "rcb/null_calibration.hpp"
#include "rcb/rci.hpp"

using namespace rcb;

TEST_CASE("permutation flips are seed and index deterministic") {
    const auto a = permutation_flips(42, 0, 64);
    const auto b = permutation_flips(42, 0, 64);
    CHECK(a == b);
    CHECK(a.size() == 64);
    CHECK(a != permutation_flips(42, 1, 64));
    CHECK(a != permutation_flips(43, 0, 64));
    // Roughly half the blocks flip.
    const auto n_flipped = std::count(a.begin(), a.end(), true);
    CHECK(n_flipped > 16);
    CHECK(n_flipped < 48);
}

TEST_CASE("explicit flip vector swaps whole item blocks") {
    const auto v1 = test::make_trials("m1", {{1, 1, 1, 1}, {0, 0, 0, 0}});
    const auto v2 = test::make_trials("m2", {{0, 0, 0, 0}, {1, 1, 0, 0}});

    const auto identity = permute_pair(v1, v2, std::vector<bool>{false, false});
    CHECK(identity.first.items[0].correct_count() == 4);
    CHECK(identity.second.items[1].correct_count() == 2);

    const auto swapped = permute_pair(v1, v2, std::vector<bool>{true, false});
    CHECK(swapped.first.items[0].correct_count() == 0);
    CHECK(swapped.second.items[0].correct_count() == 4);
    // Unflipped item untouched.
    CHECK(swapped.first.items[1].correct_count() == 0);
    CHECK(swapped.second.items[1].correct_count() == 2);
}

TEST_CASE("identical inputs produce a degenerate null") {
    // v1 == v2 per item, so every permutation reproduces the observed zero
    // changed-item count.
    std::vector<int> counts;
    for (int i = 0; i < 30; ++i) counts.push_back(i % 11);
    const auto v1 = test::make_trials_counts("m1", 10, counts);
    const auto v2 = test::make_trials_counts("m2", 10, counts);
    const auto pm = pair_measurement(0.05, 0.05);
    const auto null = empirical_null(v1, v2, pm, 100, 7);
    CHECK(null.observed_improved == 0);
    CHECK(null.observed_deteriorated == 0);
    CHECK(null.null_improved_p95 == 0);
    CHECK(null.null_deteriorated_p95 == 0);
    CHECK(null.null_improved_mean == doctest::Approx(0.0));
    CHECK_FALSE(null.exceeds_improved);
    CHECK_FALSE(null.exceeds_deteriorated);
    CHECK(null.null_improved_samples.size() == 100);
    CHECK_THROWS_AS(empirical_null(v1, v2, pm, 99, 7), AnalysisError);
}

TEST_CASE("the empirical null is reproducible per seed") {
    std::vector<int> c1, c2;
    for (int i = 0; i < 40; ++i) {
        c1.push_back((i * 3) % 11);
        c2.push_back((i * 5 + 2) % 11);
    }
    const auto v1 = test::make_trials_counts("m1", 10, c1);
    const auto v2 = test::make_trials_counts("m2", 10, c2);
    const auto pm = pair_measurement(0.06, 0.06);
    const auto a = empirical_null(v1, v2, pm, 120, 123);
    const auto b = empirical_null(v1, v2, pm, 120, 123);
    CHECK(a.null_improved_samples == b.null_improved_samples);
    CHECK(a.null_deteriorated_samples == b.null_deteriorated_samples);
    CHECK(a.null_improved_p95 == b.null_improved_p95);
    const auto c = empirical_null(v1, v2, pm, 120, 124);
    CHECK(a.null_improved_samples != c.null_improved_samples);
}

TEST_CASE("a genuine uniform shift exceeds the null") {
    // Every item moves up by 0.4 while the measurement error implies a
    // minimum detectable delta around 0.17: swapping labels symmetrises the
    // shift, so the null cannot reproduce 40 improvements.
    std::vector<int> c1, c2;
    for (int i = 0; i < 40; ++i) {
        c1.push_back(2 + i % 2);
        c2.push_back(6 + i % 2);
    }
    const auto v1 = test::make_trials_counts("m1", 10, c1);
    const auto v2 = test::make_trials_counts("m2", 10, c2);
    const auto pm = pair_measurement(0.06, 0.06);
    const auto null = empirical_null(v1, v2, pm, 100, 5);
    CHECK(null.observed_improved == 40);
    CHECK(null.observed_deteriorated == 0);
    CHECK(null.exceeds_improved);
    CHECK(null.null_improved_p95 < 40);
}

TEST_CASE("null statistics agree with the retained samples") {
    std::vector<int> c1, c2;
    for (int i = 0; i < 30; ++i) {
        c1.push_back((i * 7) % 11);
        c2.push_back((i * 4 + 1) % 11);
    }
    const auto v1 = test::make_trials_counts("m1", 10, c1);
    const auto v2 = test::make_trials_counts("m2", 10, c2);
    const auto pm = pair_measurement(0.07, 0.07);
    const auto null = empirical_null(v1, v2, pm, 120, 11);
    REQUIRE(null.null_improved_samples.size() == 120);

    const double mean_imp =
        std::accumulate(null.null_improved_samples.begin(), null.null_improved_samples.end(), 0.0) /
        120.0;
    CHECK(null.null_improved_mean == doctest::Approx(mean_imp));

    auto sorted = null.null_improved_samples;
    std::sort(sorted.begin(), sorted.end());
    // Nearest rank: ceil(0.95 * 120) = 114 -> index 113.
    CHECK(null.null_improved_p95 == sorted[113]);
}
