#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcb/cohort.hpp"
#include "rcb/core_model.hpp"
#include "rcb/null_calibration.hpp"
#include "rcb/rci.hpp"
#include "rcb/reliability.hpp"

namespace rcb {

// All analysis parameters in one place. Defaults match the study design the
// tool is built around: K = 10, 6-valid minimum, 1.96 threshold, 1,000
// splits and permutations.
struct RunConfig {
    std::string trials_v1_path;
    std::string trials_v2_path;
    std::string greedy_v1_path;  // optional
    std::string greedy_v2_path;
    std::string pair_b_v1_path;  // optional second pair for cross-pair analysis
    std::string pair_b_v2_path;

    int k = 10;
    int min_valid = 6;
    double threshold = 1.96;
    int n_splits = 1000;
    int n_permutations = 1000;
    std::uint64_t seed = 42;
    std::vector<double> bin_edges = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    SdConvention sd_convention = SdConvention::population;
    FloorCeilingRule floor_ceiling = FloorCeilingRule::same_extreme;
    std::vector<double> prophecy_targets = {0.80, 0.90};

    std::string output_dir = "out";
    bool emit_plots = true;
    bool emit_csv = true;
    bool store_null_samples = false;  // raw per-permutation counts in JSON/CSV

    ClassifyOptions classify_options() const { return {min_valid, floor_ceiling}; }
    SemOptions sem_options() const { return {sd_convention, min_valid}; }
};

// Everything cmd_analyze computes for one model pair.
struct PairAnalysis {
    AccuracyTable acc_v1;
    AccuracyTable acc_v2;
    double mean_acc_v1 = 0.0;
    double mean_acc_v2 = 0.0;
    ReliabilityEstimate rel_v1;
    ReliabilityEstimate rel_v2;
    ProphecyResult prophecy_v1;
    ProphecyResult prophecy_v2;
    PairMeasurement pm;
    std::vector<RciClassification> classifications;
    ChurnReport churn;
    std::optional<NullCalibration> null_calibration;  // absent when n_permutations = 0
    DifficultyBinTable bins;
    std::optional<ContingencyResult> contingency;  // absent when < 2 domains
    std::vector<StratumResult> strata;
};

struct AnalysisBundle {
    RunConfig config;
    PairAnalysis pair;
    std::optional<PairAnalysis> pair_b;
    std::optional<stats::ZTestResult> churn_z;          // pair vs pair_b
    std::optional<CrossPairResult> cross_pair;
    std::optional<GreedyComparison> greedy;
};

// Runs the full single-pair pipeline over in-memory trial sets.
PairAnalysis analyze_pair(const TrialSet& trials_v1, const TrialSet& trials_v2,
                          const RunConfig& config);

// Full run from the configured file paths, including the optional greedy and
// second-pair sections.
AnalysisBundle run_analysis(const RunConfig& config);

}  // namespace rcb
