#pragma once

#include <cstdint>
#include <vector>

#include "rcb/core_model.hpp"

namespace rcb {

struct ReliabilityEstimate {
    std::string model_id;
    double r_xx = 0.0;    // median Spearman-Brown-corrected split-half reliability
    double ci_low = 0.0;  // 2.5th percentile over splits, nearest rank
    double ci_high = 0.0;
    int n_splits = 0;
    int n_skipped_splits = 0;  // splits with undefined correlation
    double icc = 0.0;          // ICC(2,1), two-way random, single measures
    int n_items_used = 0;      // fully valid items entering the estimate
    std::uint64_t seed = 0;
    bool unequal_halves = false;  // K odd: halves of ceil(K/2) and floor(K/2)
};

struct ProphecyResult {
    double r_single = 0.0;  // implied single-sample reliability
    std::vector<std::pair<double, int>> table;  // (target r, minimal k)
};

// The shared per-item permutation that assigns samples to the two halves of
// one split. Index order after shuffling: first ceil(K/2) positions form
// half A. Exposed so the brute-force oracle can replay the identical stream.
std::vector<int> split_permutation(std::uint64_t seed, int split_index,
                                   std::size_t item_ordinal, int k);

// 1,000-style random split-half reliability with Spearman-Brown correction.
// Only items with all K samples valid are used. Deterministic given seed;
// split s draws its randomness from (seed, s), so results do not depend on
// evaluation order.
ReliabilityEstimate split_half_reliability(const TrialSet& trials, int n_splits,
                                           std::uint64_t seed);

// r_sb = 2r / (1 + r); strictly increasing on (-1, 1).
double spearman_brown(double r_half);

// ICC(2,1) from the two-way ANOVA decomposition of the n x k correctness
// matrix of fully valid items.
double icc_2_1(const TrialSet& trials);

// Spearman-Brown prophecy: collapse r at length K to a single sample, then
// find the minimal k reaching each target.
ProphecyResult prophecy_k(double r_k, int k, const std::vector<double>& targets);

// Extrapolated reliability of k samples given single-sample reliability.
double prophecy_extrapolate(double r_single, int k);

}  // namespace rcb
