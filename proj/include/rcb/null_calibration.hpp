#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rcb/core_model.hpp"
#include "rcb/rci.hpp"

namespace rcb {

struct NullCalibration {
    int n_permutations = 0;
    std::uint64_t seed = 0;
    std::size_t observed_improved = 0;
    std::size_t observed_deteriorated = 0;
    std::size_t null_improved_p95 = 0;
    std::size_t null_deteriorated_p95 = 0;
    bool exceeds_improved = false;
    bool exceeds_deteriorated = false;
    double null_improved_mean = 0.0;
    double null_deteriorated_mean = 0.0;
    std::vector<std::size_t> null_improved_samples;
    std::vector<std::size_t> null_deteriorated_samples;
};

// The per-item version-label coin flips for permutation p. A "block" is one
// item's full K-sample set for one model; a flip swaps the two blocks.
std::vector<bool> permutation_flips(std::uint64_t seed, int perm_index, std::size_t n_items);

// Applies an explicit flip vector (index-aligned with the canonical item
// order). Exposed separately so the identity permutation is testable and the
// oracle can replay the seeded stream.
std::pair<TrialSet, TrialSet> permute_pair(const TrialSet& trials_v1, const TrialSet& trials_v2,
                                           const std::vector<bool>& flips);

std::pair<TrialSet, TrialSet> permute_pair(const TrialSet& trials_v1, const TrialSet& trials_v2,
                                           std::uint64_t seed, int perm_index = 0);

// Empirical null of reliable-change counts under version-label permutation.
// S_diff stays fixed at the observed-data PairMeasurement; exclusions are
// re-applied per permutation. Percentiles by nearest rank.
NullCalibration empirical_null(const TrialSet& trials_v1, const TrialSet& trials_v2,
                               const PairMeasurement& pm, int n_permutations,
                               std::uint64_t seed, const ClassifyOptions& opts = {});

}  // namespace rcb
