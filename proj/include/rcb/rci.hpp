#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcb/core_model.hpp"

namespace rcb {

enum class Category {
    Improved,
    NoChange,
    Deteriorated,
    ExcludedInsufficientValid,
    ExcludedFloorCeiling,
};

const char* category_name(Category c);
bool is_excluded(Category c);
bool is_changed(Category c);

enum class SdConvention { population, sample };

// Floor/ceiling exclusion readings: same_extreme excludes only (0,0) and
// (1,1); both_extreme also excludes e.g. (0,1), for replication experiments.
enum class FloorCeilingRule { same_extreme, both_extreme };

struct PairMeasurement {
    double sem_v1 = 0.0;
    double sem_v2 = 0.0;
    double s_diff = 0.0;
    double min_detectable_delta = 0.0;
    double alpha_threshold = 1.96;
    double r_xx_v1 = 0.0;
    double r_xx_v2 = 0.0;
    double sd_p_v1 = 0.0;
    double sd_p_v2 = 0.0;
    bool degenerate = false;  // s_diff == 0
};

struct RciClassification {
    std::string item_id;
    std::string domain;
    std::optional<double> p_v1;
    std::optional<double> p_v2;
    double delta_p = 0.0;  // p_v2 - p_v1, meaningful when both defined
    double rci = 0.0;
    Category category = Category::NoChange;
};

struct EffectSizes {
    double mean_abs_delta = 0.0;
    double median_abs_delta = 0.0;
    double frac_abs_delta_ge_02 = 0.0;
    double frac_abs_delta_ge_04 = 0.0;
    std::size_t n = 0;
};

struct ChurnReport {
    std::size_t n_total = 0;
    std::size_t n_excluded_insufficient = 0;
    std::size_t n_excluded_floorceiling = 0;
    std::size_t n_analysable = 0;
    std::size_t n_improved = 0;
    std::size_t n_nochange = 0;
    std::size_t n_deteriorated = 0;

    // Full-benchmark convention: denominator n_total, excluded items counted
    // as no-reliable-change.
    double full_improved_rate = 0.0;
    double full_nochange_rate = 0.0;
    double full_deteriorated_rate = 0.0;
    double churn_rate_full = 0.0;

    // Post-exclusion convention: denominator n_analysable.
    double post_improved_rate = 0.0;
    double post_nochange_rate = 0.0;
    double post_deteriorated_rate = 0.0;
    double churn_rate_post = 0.0;

    long long net_surplus = 0;  // improved - deteriorated
    EffectSizes effect_analysable;
    EffectSizes effect_changed;
};

struct SemOptions {
    SdConvention convention = SdConvention::population;
    int min_valid = 6;  // SD(p) item set: all items with k_valid >= min_valid
};

// SEM = SD(p) * sqrt(1 - r_xx) over the selected items.
double sem(const AccuracyTable& acc, double r_xx, const SemOptions& opts = {});

// Standard deviation of the selected p values alone (exposed for the
// stratified analysis and reporting).
double sd_p(const AccuracyTable& acc, const SemOptions& opts = {});

PairMeasurement pair_measurement(double sem_v1, double sem_v2, double threshold = 1.96);

struct ClassifyOptions {
    int min_valid = 6;
    FloorCeilingRule floor_ceiling = FloorCeilingRule::same_extreme;
};

// Exclusion precedence: insufficient-valid first, then floor/ceiling, then
// RCI classification with strict inequalities at the threshold.
std::vector<RciClassification> classify_items(const AccuracyTable& acc_v1,
                                              const AccuracyTable& acc_v2,
                                              const PairMeasurement& pm,
                                              const ClassifyOptions& opts = {});

ChurnReport churn_report(const std::vector<RciClassification>& classifications);

struct StratumResult {
    double lo = 0.0;
    double hi = 0.0;
    bool skipped = false;  // fewer than 2 items in v1
    std::size_t n = 0;
    PairMeasurement pm;
    std::vector<RciClassification> classifications;
    std::size_t n_improved = 0;
    std::size_t n_deteriorated = 0;
    double churn_rate = 0.0;
    // Churn among the same items under the global classification.
    double global_churn_rate = 0.0;
};

// Difficulty-stratified sensitivity analysis: SD(p), SEM, S_diff recomputed
// within each baseline-difficulty bin (binned by p_v1), members reclassified.
std::vector<StratumResult> stratified_sensitivity(const AccuracyTable& acc_v1,
                                                  const AccuracyTable& acc_v2,
                                                  double r_xx_v1, double r_xx_v2,
                                                  const std::vector<double>& edges,
                                                  double threshold,
                                                  const ClassifyOptions& copts = {},
                                                  SdConvention convention = SdConvention::population);

}  // namespace rcb
