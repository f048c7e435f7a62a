#pragma once

#include <string>
#include <vector>

#include "rcb/analysis.hpp"

namespace rcb {

// Independent loop-based re-implementation of the whole single-pair
// pipeline, favouring clarity over speed. Shares only the seeded RNG stream
// helpers (so permutations replay exactly) and the special-function
// primitives; every statistic is recomputed from scratch. Guarded to small
// instances: n_items <= 1000, K <= 20.
PairAnalysis brute_force_pipeline(const TrialSet& trials_v1, const TrialSet& trials_v2,
                                  const RunConfig& config);

stats::ZTestResult brute_force_churn_z(const ChurnReport& a, const ChurnReport& b,
                                       ChurnDenominator denom);

CrossPairResult brute_force_cross_pair(const std::vector<RciClassification>& class_a,
                                       const std::vector<RciClassification>& class_b);

GreedyComparison brute_force_greedy(const GreedyRun& greedy_v1, const GreedyRun& greedy_v2,
                                    const std::vector<RciClassification>& classifications);

// Field-for-field comparison of two pipeline outputs; integer fields must
// match exactly, floating fields within tol. Returns one message per
// mismatch, empty when equivalent.
std::vector<std::string> compare_pair_analysis(const PairAnalysis& a, const PairAnalysis& b,
                                               double tol = 1e-12);

}  // namespace rcb
