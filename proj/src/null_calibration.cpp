#include "rcb/null_calibration.hpp"

#include <algorithm>
#include <cmath>

#include "rcb/errors.hpp"
#include "rcb/rng.hpp"

namespace rcb {

std::vector<bool> permutation_flips(std::uint64_t seed, int perm_index, std::size_t n_items) {
    const std::uint64_t proc_seed = mix_seed(seed, seed_label::permutation);
    const std::uint64_t perm_seed = mix_seed(proc_seed, static_cast<std::uint64_t>(perm_index));
    std::vector<bool> flips(n_items);
    for (std::size_t i = 0; i < n_items; ++i) {
        Rng rng(mix_seed(perm_seed, i));
        flips[i] = rng.next_double() < 0.5;
    }
    return flips;
}

std::pair<TrialSet, TrialSet> permute_pair(const TrialSet& trials_v1, const TrialSet& trials_v2,
                                           const std::vector<bool>& flips) {
    require_matched_items(trials_v1, trials_v2);
    if (flips.size() != trials_v1.items.size()) {
        throw AnalysisError("permute_pair: flip vector size mismatch");
    }
    TrialSet a = trials_v1;
    TrialSet b = trials_v2;
    for (std::size_t i = 0; i < flips.size(); ++i) {
        if (flips[i]) std::swap(a.items[i].slots, b.items[i].slots);
    }
    return {std::move(a), std::move(b)};
}

std::pair<TrialSet, TrialSet> permute_pair(const TrialSet& trials_v1, const TrialSet& trials_v2,
                                           std::uint64_t seed, int perm_index) {
    return permute_pair(trials_v1, trials_v2,
                        permutation_flips(seed, perm_index, trials_v1.items.size()));
}

namespace {

std::size_t nearest_rank_p95(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(v.size())));
    if (rank == 0) rank = 1;
    return v[rank - 1];
}

}  // namespace

NullCalibration empirical_null(const TrialSet& trials_v1, const TrialSet& trials_v2,
                               const PairMeasurement& pm, int n_permutations,
                               std::uint64_t seed, const ClassifyOptions& opts) {
    if (n_permutations < 100) throw AnalysisError("empirical_null: need >= 100 permutations");
    if (pm.degenerate) throw AnalysisError("empirical_null: degenerate S_diff = 0");
    require_matched_items(trials_v1, trials_v2);

    NullCalibration cal;
    cal.n_permutations = n_permutations;
    cal.seed = seed;

    {
        const auto cls = classify_items(compute_item_accuracy(trials_v1),
                                        compute_item_accuracy(trials_v2), pm, opts);
        for (const auto& c : cls) {
            if (c.category == Category::Improved) ++cal.observed_improved;
            if (c.category == Category::Deteriorated) ++cal.observed_deteriorated;
        }
    }

    cal.null_improved_samples.reserve(static_cast<std::size_t>(n_permutations));
    cal.null_deteriorated_samples.reserve(static_cast<std::size_t>(n_permutations));
    for (int p = 0; p < n_permutations; ++p) {
        const auto flips = permutation_flips(seed, p, trials_v1.items.size());
        auto [a, b] = permute_pair(trials_v1, trials_v2, flips);
        const auto cls = classify_items(compute_item_accuracy(a), compute_item_accuracy(b), pm,
                                        opts);
        std::size_t imp = 0, det = 0;
        for (const auto& c : cls) {
            if (c.category == Category::Improved) ++imp;
            if (c.category == Category::Deteriorated) ++det;
        }
        cal.null_improved_samples.push_back(imp);
        cal.null_deteriorated_samples.push_back(det);
    }

    cal.null_improved_p95 = nearest_rank_p95(cal.null_improved_samples);
    cal.null_deteriorated_p95 = nearest_rank_p95(cal.null_deteriorated_samples);
    double mi = 0.0, md = 0.0;
    for (std::size_t v : cal.null_improved_samples) mi += static_cast<double>(v);
    for (std::size_t v : cal.null_deteriorated_samples) md += static_cast<double>(v);
    cal.null_improved_mean = mi / n_permutations;
    cal.null_deteriorated_mean = md / n_permutations;
    cal.exceeds_improved = cal.observed_improved > cal.null_improved_p95;
    cal.exceeds_deteriorated = cal.observed_deteriorated > cal.null_deteriorated_p95;
    return cal;
}

}  // namespace rcb
