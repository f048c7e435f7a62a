#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "rcb/rci.hpp"
#include "rcb/stats.hpp"

namespace rcb {

struct DifficultyBin {
    double lo = 0.0;
    double hi = 0.0;  // [lo, hi) except the last bin, which is closed
    std::size_t n = 0;
    std::size_t n_improved = 0;
    std::size_t n_deteriorated = 0;
    std::size_t n_nochange = 0;
    double churn_rate = 0.0;
};

struct DifficultyBinTable {
    std::vector<DifficultyBin> bins;
};

struct DomainRow {
    std::string domain;
    std::size_t n_improved = 0;
    std::size_t n_nochange = 0;
    std::size_t n_deteriorated = 0;
    // improved / deteriorated; unset when deteriorated = 0.
    std::optional<double> improvement_deterioration_ratio;
};

struct ContingencyResult {
    std::vector<DomainRow> table;
    double chi2 = 0.0;
    int df = 0;
    double p_value = 1.0;
    double cramers_v = 0.0;
    std::size_t n = 0;
};

// Greedy direction x RCI category; indices 0 improved, 1 no change,
// 2 deteriorated.
struct GreedyComparison {
    std::size_t n_matched = 0;
    std::size_t n_unmatched = 0;
    double exact_agreement_rate = 0.0;
    std::size_t greedy_changed_rci_nochange_count = 0;
    double greedy_changed_rci_nochange_rate = 0.0;  // of greedy-changed items
    std::size_t rci_changed_greedy_nochange_count = 0;
    double rci_changed_greedy_nochange_rate = 0.0;  // of RCI-changed items
    std::array<std::array<std::size_t, 3>, 3> confusion{};  // [greedy][rci]
};

struct CrossPairResult {
    std::size_t n_shared = 0;
    double pearson_r = 0.0;
    double p_value = 1.0;
    bool normal_approximation = false;  // always exact t here
};

// Per-item greedy (single-shot) correctness for one model.
struct GreedyRun {
    std::string model_id;
    std::map<std::string, bool> correct;  // item_id -> correct
};

GreedyRun parse_greedy_file(const std::string& path);

// Bins analysable classifications by baseline accuracy p_v1.
DifficultyBinTable difficulty_bins(const std::vector<RciClassification>& classifications,
                                   const std::vector<double>& edges = {0.0, 0.2, 0.4, 0.6, 0.8,
                                                                       1.0});

// Pearson chi-squared over the domain x {improved, no-change, deteriorated}
// table of analysable items, with Cramer's V.
ContingencyResult domain_contingency(const std::vector<RciClassification>& classifications);

enum class ChurnDenominator { full, post_exclusion };

stats::ZTestResult churn_rate_z_test(const ChurnReport& a, const ChurnReport& b,
                                     ChurnDenominator denom = ChurnDenominator::post_exclusion);

// Pearson correlation of RCI values over items analysable in both pairs;
// two-sided p from the exact t distribution with n-2 df.
CrossPairResult cross_pair_correlation(const std::vector<RciClassification>& class_a,
                                       const std::vector<RciClassification>& class_b);

// Full-benchmark framing: excluded RCI items count as no-reliable-change.
GreedyComparison greedy_compare(const GreedyRun& greedy_v1, const GreedyRun& greedy_v2,
                                const std::vector<RciClassification>& classifications,
                                bool post_exclusion_only = false);

}  // namespace rcb
