// Acceptance suite: one line per criterion, "PASS"/"FAIL" plus a short
// detail. Exits nonzero when any checked criterion fails. Criterion 9 needs
// the published benchmark trial files and is reported as SKIP when they are
// not present.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rcb/analysis.hpp"
#include "rcb/cohort.hpp"
#include "rcb/null_calibration.hpp"
#include "rcb/oracle.hpp"
#include "rcb/rci.hpp"
#include "rcb/reliability.hpp"
#include "rcb/stats.hpp"
#include "rcb/synth.hpp"

using namespace rcb;

namespace {

int g_failed = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++g_failed;
}

void report_skip(int criterion, const std::string& detail) {
    std::printf("criterion %2d: SKIP  %s\n", criterion, detail.c_str());
}

bool near(double x, double want, double tol) { return std::abs(x - want) <= tol; }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

// 1. S_diff and minimum detectable delta from published SEM pairs.
void criterion_1() {
    const auto a = pair_measurement(0.058, 0.062);
    const auto b = pair_measurement(0.045, 0.031);
    const bool ok = near(a.s_diff, 0.085, 0.001) && near(a.min_detectable_delta, 0.167, 0.001) &&
                    near(b.s_diff, 0.055, 0.001) && near(b.min_detectable_delta, 0.107, 0.001);
    report(1, ok,
           "S_diff/minDelta: " + fmt(a.s_diff) + "/" + fmt(a.min_detectable_delta) + ", " +
               fmt(b.s_diff) + "/" + fmt(b.min_detectable_delta));
}

// 2. Cramer's V arithmetic.
void criterion_2() {
    const double v1 = stats::cramers_v(26.5, 952, 4, 3);
    const double v2 = stats::cramers_v(28.6, 652, 4, 3);
    report(2, near(v1, 0.118, 0.001) && near(v2, 0.148, 0.001),
           "V = " + fmt(v1) + ", " + fmt(v2));
}

// 3. Two-proportion z-test.
void criterion_3() {
    const auto r = stats::two_proportion_z(0.621, 952, 0.859, 652);
    report(3, near(r.z, -10.4, 0.05) && r.p < 0.001, "z = " + fmt(r.z));
}

// 4. Spearman-Brown prophecy sample counts.
void criterion_4() {
    const auto res = prophecy_k(0.973, 10, {0.80, 0.90});
    const bool ok = res.table.size() == 2 && res.table[0].second == 2 && res.table[1].second == 3;
    report(4, ok,
           "k_needed = " + std::to_string(res.table[0].second) + ", " +
               std::to_string(res.table[1].second));
}

// 5. Greedy discordance ratios out of a confusion table with the published
// marginals: 329 greedy-changed (83 of them RCI no-change), 425 RCI-changed
// (179 of them greedy no-change).
void criterion_5() {
    GreedyRun g1, g2;
    std::vector<RciClassification> cls;
    int next_id = 0;
    auto add = [&](int greedy_dir, Category cat, int count) {
        for (int i = 0; i < count; ++i) {
            const std::string id = "it" + std::to_string(next_id++);
            g1.correct[id] = greedy_dir == 2;               // deteriorated: true -> false
            g2.correct[id] = greedy_dir == 0;               // improved: false -> true
            if (greedy_dir == 1) g1.correct[id] = g2.correct[id] = true;
            RciClassification c;
            c.item_id = id;
            c.p_v1 = 0.5;
            c.p_v2 = 0.5;
            c.category = cat;
            cls.push_back(c);
        }
    };
    add(0, Category::Improved, 200);       // agree on improvement
    add(2, Category::Deteriorated, 46);    // agree on deterioration
    add(0, Category::NoChange, 60);        // greedy-changed, RCI quiet
    add(2, Category::NoChange, 23);
    add(1, Category::Improved, 120);       // RCI-changed, greedy quiet
    add(1, Category::Deteriorated, 59);
    add(1, Category::NoChange, 300);

    const auto cmp = greedy_compare(g1, g2, cls);
    const double r1 = cmp.greedy_changed_rci_nochange_rate;
    const double r2 = cmp.rci_changed_greedy_nochange_rate;
    const bool ok = cmp.greedy_changed_rci_nochange_count == 83 &&
                    cmp.rci_changed_greedy_nochange_count == 179 &&
                    near(100.0 * r1, 25.2, 0.1) && near(100.0 * r2, 42.1, 0.1);
    report(5, ok, "83/329 = " + fmt(100.0 * r1) + "%, 179/425 = " + fmt(100.0 * r2) + "%");
}

// 6. Oracle equivalence over random synthetic specs.
void criterion_6() {
    std::mt19937 gen(777);
    std::uniform_int_distribution<int> n_items(10, 100);
    std::uniform_int_distribution<int> k(4, 10);
    std::uniform_real_distribution<double> q(0.0, 1.0);
    std::uniform_int_distribution<int> pin(0, 11);
    int mismatched_runs = 0;
    std::string first_detail;
    for (int rep = 0; rep < 50; ++rep) {
        SynthSpec spec;
        spec.n_items = n_items(gen);
        spec.k = k(gen);
        spec.seed = gen();
        for (int i = 0; i < spec.n_items; ++i) {
            double q1 = q(gen), q2 = q(gen);
            if (pin(gen) == 0) q1 = q2 = 0.0;
            if (pin(gen) == 1) q1 = q2 = 1.0;
            spec.q_v1.push_back(q1);
            spec.q_v2.push_back(q2);
            spec.domains.push_back(i % 2 == 0 ? "alpha" : "beta");
        }
        const auto data = generate_pair(spec);
        RunConfig cfg;
        cfg.n_splits = 50;
        cfg.n_permutations = 100;
        cfg.seed = gen();
        cfg.min_valid = std::min(6, spec.k);  // K < 6 must stay analysable
        cfg.store_null_samples = true;
        const auto fast = analyze_pair(data.trials_v1, data.trials_v2, cfg);
        const auto slow = brute_force_pipeline(data.trials_v1, data.trials_v2, cfg);
        const auto mismatches = compare_pair_analysis(fast, slow);
        if (!mismatches.empty()) {
            ++mismatched_runs;
            if (first_detail.empty()) first_detail = mismatches.front();
        }
    }
    report(6, mismatched_runs == 0,
           mismatched_runs == 0 ? "50/50 runs equivalent"
                                : std::to_string(mismatched_runs) + " runs diverged; first: " +
                                      first_detail);
}

// 7. Property suite: invariants that must hold for arbitrary inputs.
void criterion_7() {
    std::ostringstream why;
    bool ok = true;
    auto expect = [&](bool cond, const char* what) {
        if (!cond) {
            ok = false;
            why << what << "; ";
        }
    };

    std::mt19937 gen(4242);
    std::uniform_real_distribution<double> q(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        SynthSpec spec;
        spec.n_items = 60;
        spec.k = 10;
        spec.seed = gen();
        for (int i = 0; i < spec.n_items; ++i) {
            spec.q_v1.push_back(q(gen));
            spec.q_v2.push_back(q(gen));
        }
        const auto data = generate_pair(spec);
        const auto v1 = compute_item_accuracy(data.trials_v1);
        const auto v2 = compute_item_accuracy(data.trials_v2);
        const auto pm = pair_measurement(0.05, 0.06);

        // Trichotomy + swap antisymmetry.
        const auto fwd = classify_items(v1, v2, pm);
        const auto rev = classify_items(v2, v1, pm);
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            if (is_excluded(fwd[i].category)) {
                expect(rev[i].category == fwd[i].category, "exclusion not symmetric");
                continue;
            }
            expect(std::abs(fwd[i].rci + rev[i].rci) < 1e-12, "RCI not antisymmetric");
            const bool swap_ok =
                (fwd[i].category == Category::Improved && rev[i].category == Category::Deteriorated) ||
                (fwd[i].category == Category::Deteriorated && rev[i].category == Category::Improved) ||
                (fwd[i].category == Category::NoChange && rev[i].category == Category::NoChange);
            expect(swap_ok, "category swap broken");
        }

        // Threshold monotonicity.
        std::size_t prev_changed = fwd.size() + 1;
        for (double thr : {1.0, 1.96, 3.0}) {
            const auto rep2 = churn_report(classify_items(v1, v2, pair_measurement(0.05, 0.06, thr)));
            expect(rep2.n_improved + rep2.n_deteriorated <= prev_changed,
                   "threshold monotonicity broken");
            prev_changed = rep2.n_improved + rep2.n_deteriorated;
        }

        // Bin sums equal analysable count.
        const auto churn = churn_report(fwd);
        const auto bins = difficulty_bins(fwd);
        std::size_t bin_total = 0;
        for (const auto& b : bins.bins) bin_total += b.n;
        expect(bin_total == churn.n_analysable, "bin totals != analysable");

        // Null symmetry: swapping pair roles under the same seed swaps the
        // improved and deteriorated null streams.
        const auto nf = empirical_null(data.trials_v1, data.trials_v2, pm, 100, 99);
        const auto nr = empirical_null(data.trials_v2, data.trials_v1, pm, 100, 99);
        expect(nf.null_improved_samples == nr.null_deteriorated_samples &&
                   nf.null_deteriorated_samples == nr.null_improved_samples,
               "null permutation counts not symmetric");
    }

    // Exclusion precedence: too few valid samples wins over floor/ceiling.
    {
        TrialSet t1, t2;
        t1.model_id = "m1";
        t2.model_id = "m2";
        t1.k = t2.k = 10;
        ItemTrials a1, a2;
        a1.item_id = a2.item_id = "x";
        a1.slots.resize(10);
        a2.slots.resize(10);
        for (int s = 0; s < 10; ++s) {
            a1.slots[static_cast<std::size_t>(s)].valid = s < 4;  // 4 < 6 valid
            a2.slots[static_cast<std::size_t>(s)].valid = true;
        }
        t1.items.push_back(a1);
        t2.items.push_back(a2);
        const auto cls = classify_items(compute_item_accuracy(t1), compute_item_accuracy(t2),
                                        pair_measurement(0.05, 0.05));
        expect(cls[0].category == Category::ExcludedInsufficientValid, "precedence broken");
    }

    // Spearman-Brown monotone + inverse round trip at 1e-12.
    {
        double prev = spearman_brown(-0.9);
        for (double r = -0.85; r < 0.999; r += 0.05) {
            const double sb = spearman_brown(r);
            expect(sb > prev, "S-B not increasing");
            expect(std::abs(sb / (2.0 - sb) - r) < 1e-12, "S-B inverse drifts");
            prev = sb;
        }
    }

    // ICC on a deterministic mixed-row matrix.
    {
        TrialSet t;
        t.model_id = "m";
        t.k = 6;
        for (int i = 0; i < 8; ++i) {
            ItemTrials item;
            item.item_id = "r" + std::to_string(i);
            item.slots.resize(6);
            for (auto& s : item.slots) {
                s.valid = true;
                s.correct = i % 2 == 0;
            }
            t.items.push_back(std::move(item));
        }
        expect(std::abs(icc_2_1(t) - 1.0) < 1e-12, "ICC != 1 on deterministic rows");
    }

    // End-to-end seed determinism.
    {
        const auto data = generate_pair(make_grid_spec(40, 8, 55, 0.1, 0.9, 0.1));
        RunConfig cfg;
        cfg.n_splits = 40;
        cfg.n_permutations = 100;
        cfg.store_null_samples = true;
        const auto a = analyze_pair(data.trials_v1, data.trials_v2, cfg);
        const auto b = analyze_pair(data.trials_v1, data.trials_v2, cfg);
        expect(compare_pair_analysis(a, b, 0.0).empty(), "pipeline not deterministic");
    }

    report(7, ok, ok ? "all invariants held" : why.str());
}

// 8. Regression to the middle under a pure null with difficulty clustered
// near the extremes: the lowest bin can only flag improvements and the
// highest bin only deteriorations.
void criterion_8() {
    SynthSpec spec;
    spec.n_items = 2000;
    spec.k = 10;
    spec.seed = 2718;
    for (int i = 0; i < spec.n_items; ++i) {
        const double qi = i % 2 == 0 ? 0.1 : 0.9;
        spec.q_v1.push_back(qi);
        spec.q_v2.push_back(qi);  // pure null: no true change anywhere
    }
    const auto data = generate_pair(spec);
    RunConfig cfg;
    cfg.n_splits = 200;
    cfg.n_permutations = 0;
    const auto res = analyze_pair(data.trials_v1, data.trials_v2, cfg);
    const auto& low = res.bins.bins.front();
    const auto& high = res.bins.bins.back();
    const bool ok = low.n_improved > 0 && low.n_deteriorated == 0 && high.n_deteriorated > 0 &&
                    high.n_improved == 0;
    std::ostringstream detail;
    detail << "low bin +" << low.n_improved << "/-" << low.n_deteriorated << ", high bin +"
           << high.n_improved << "/-" << high.n_deteriorated
           << " (method artefact under a pure null, not a model effect)";
    report(8, ok, detail.str());
}

// 10. Performance budget: 2,000 items x 10 samples x 2 models, 1,000 splits
// and 1,000 permutations, under 60 s.
void criterion_10() {
    const auto data = generate_pair(make_grid_spec(2000, 10, 31, 0.05, 0.95, 0.05));
    RunConfig cfg;  // defaults: 1,000 splits, 1,000 permutations
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = analyze_pair(data.trials_v1, data.trials_v2, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    const bool ok = secs < 60.0 && res.churn.n_total == 2000;
    report(10, ok, "full analyze took " + fmt(secs) + " s");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    report_skip(9, "published benchmark trial files not present in this workspace");
    criterion_10();
    if (g_failed > 0) {
        std::printf("%d criterion(s) failed\n", g_failed);
        return 1;
    }
    std::printf("all checked criteria passed\n");
    return 0;
}
