#include "rcb/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcb/errors.hpp"
#include "rcb/rng.hpp"
#include "rcb/stats.hpp"

namespace rcb {

std::vector<int> split_permutation(std::uint64_t seed, int split_index,
                                   std::size_t item_ordinal, int k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(mix_seed(mix_seed(seed, static_cast<std::uint64_t>(split_index)), item_ordinal));
    shuffle(idx, rng);
    return idx;
}

ReliabilityEstimate split_half_reliability(const TrialSet& trials, int n_splits,
                                           std::uint64_t seed) {
    const int k = trials.k;
    if (k < 2) throw AnalysisError("split_half_reliability: K must be >= 2");

    // Partially valid items are excluded; unequal half sizes vary per item
    // otherwise and bias the half-accuracies.
    std::vector<const ItemTrials*> used;
    for (const auto& item : trials.items) {
        if (item.valid_count() == k) used.push_back(&item);
    }
    if (used.size() < 3) {
        throw AnalysisError("split_half_reliability: fewer than 3 fully valid items");
    }

    const int half_a = (k + 1) / 2;
    const std::uint64_t proc_seed = mix_seed(seed, seed_label::split_half);

    std::vector<double> r_sb_values;
    r_sb_values.reserve(static_cast<std::size_t>(n_splits));
    int n_skipped = 0;
    std::vector<double> va(used.size()), vb(used.size());
    for (int s = 0; s < n_splits; ++s) {
        for (std::size_t i = 0; i < used.size(); ++i) {
            const auto idx = split_permutation(proc_seed, s, i, k);
            int ca = 0, cb = 0;
            for (int j = 0; j < k; ++j) {
                const bool c = used[i]->slots[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])].correct;
                if (j < half_a) {
                    ca += c;
                } else {
                    cb += c;
                }
            }
            va[i] = static_cast<double>(ca) / half_a;
            vb[i] = static_cast<double>(cb) / (k - half_a);
        }
        bool defined = false;
        const double r = stats::pearson(va, vb, &defined);
        if (!defined) {
            ++n_skipped;
            continue;
        }
        r_sb_values.push_back(spearman_brown(r));
    }

    if (r_sb_values.empty()) {
        throw AnalysisError("split_half_reliability: every split had undefined correlation");
    }

    ReliabilityEstimate est;
    est.model_id = trials.model_id;
    est.r_xx = stats::median(r_sb_values);
    est.ci_low = stats::percentile_nearest_rank(r_sb_values, 0.025);
    est.ci_high = stats::percentile_nearest_rank(r_sb_values, 0.975);
    est.n_splits = n_splits;
    est.n_skipped_splits = n_skipped;
    est.icc = icc_2_1(trials);
    est.n_items_used = static_cast<int>(used.size());
    est.seed = seed;
    est.unequal_halves = (k % 2) != 0;
    return est;
}

double spearman_brown(double r_half) {
    if (r_half <= -1.0) throw AnalysisError("spearman_brown: r = -1 is undefined");
    return 2.0 * r_half / (1.0 + r_half);
}

double icc_2_1(const TrialSet& trials) {
    const int k = trials.k;
    std::vector<const ItemTrials*> used;
    for (const auto& item : trials.items) {
        if (item.valid_count() == k) used.push_back(&item);
    }
    const std::size_t n = used.size();
    if (n < 2 || k < 2) throw AnalysisError("icc_2_1: need at least 2 items and 2 samples");

    double grand = 0.0;
    for (const auto* item : used) grand += item->correct_count();
    grand /= static_cast<double>(n) * k;

    double ss_rows = 0.0;
    for (const auto* item : used) {
        const double rm = static_cast<double>(item->correct_count()) / k;
        ss_rows += (rm - grand) * (rm - grand);
    }
    ss_rows *= k;

    double ss_cols = 0.0;
    for (int j = 0; j < k; ++j) {
        double cm = 0.0;
        for (const auto* item : used) cm += item->slots[static_cast<std::size_t>(j)].correct;
        cm /= static_cast<double>(n);
        ss_cols += (cm - grand) * (cm - grand);
    }
    ss_cols *= static_cast<double>(n);

    double ss_total = 0.0;
    for (const auto* item : used) {
        for (int j = 0; j < k; ++j) {
            const double x = item->slots[static_cast<std::size_t>(j)].correct ? 1.0 : 0.0;
            ss_total += (x - grand) * (x - grand);
        }
    }
    const double ss_err = ss_total - ss_rows - ss_cols;

    const double ms_r = ss_rows / (static_cast<double>(n) - 1.0);
    const double ms_c = ss_cols / (k - 1.0);
    const double ms_e = ss_err / ((static_cast<double>(n) - 1.0) * (k - 1.0));

    const double denom = ms_r + (k - 1.0) * ms_e +
                         (static_cast<double>(k) / static_cast<double>(n)) * (ms_c - ms_e);
    if (denom == 0.0) {
        throw AnalysisError("icc_2_1: degenerate matrix (no variance anywhere), ICC undefined");
    }
    return (ms_r - ms_e) / denom;
}

double prophecy_extrapolate(double r_single, int k) {
    return k * r_single / (1.0 + (k - 1.0) * r_single);
}

ProphecyResult prophecy_k(double r_k, int k, const std::vector<double>& targets) {
    if (r_k <= 0.0 || r_k >= 1.0) throw AnalysisError("prophecy_k: r must be in (0, 1)");
    if (k < 1) throw AnalysisError("prophecy_k: K must be >= 1");
    ProphecyResult res;
    res.r_single = r_k / (k - (k - 1.0) * r_k);
    for (double target : targets) {
        if (target <= 0.0 || target >= 1.0) {
            throw AnalysisError("prophecy_k: target must be in (0, 1)");
        }
        int needed = 1;
        while (prophecy_extrapolate(res.r_single, needed) < target) {
            ++needed;
            if (needed > 1'000'000) throw AnalysisError("prophecy_k: target unreachable");
        }
        res.table.emplace_back(target, needed);
    }
    return res;
}

}  // namespace rcb
