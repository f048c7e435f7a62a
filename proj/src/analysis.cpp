#include "rcb/analysis.hpp"

#include "rcb/errors.hpp"

namespace rcb {

PairAnalysis analyze_pair(const TrialSet& trials_v1, const TrialSet& trials_v2,
                          const RunConfig& config) {
    require_matched_items(trials_v1, trials_v2);

    PairAnalysis res;
    res.acc_v1 = compute_item_accuracy(trials_v1);
    res.acc_v2 = compute_item_accuracy(trials_v2);
    res.mean_acc_v1 = aggregate_accuracy(res.acc_v1);
    res.mean_acc_v2 = aggregate_accuracy(res.acc_v2);

    res.rel_v1 = split_half_reliability(trials_v1, config.n_splits, config.seed);
    res.rel_v2 = split_half_reliability(trials_v2, config.n_splits, config.seed);
    res.prophecy_v1 = prophecy_k(res.rel_v1.r_xx, trials_v1.k, config.prophecy_targets);
    res.prophecy_v2 = prophecy_k(res.rel_v2.r_xx, trials_v2.k, config.prophecy_targets);

    const auto sopts = config.sem_options();
    const double sem_v1 = sem(res.acc_v1, res.rel_v1.r_xx, sopts);
    const double sem_v2 = sem(res.acc_v2, res.rel_v2.r_xx, sopts);
    res.pm = pair_measurement(sem_v1, sem_v2, config.threshold);
    res.pm.r_xx_v1 = res.rel_v1.r_xx;
    res.pm.r_xx_v2 = res.rel_v2.r_xx;
    res.pm.sd_p_v1 = sd_p(res.acc_v1, sopts);
    res.pm.sd_p_v2 = sd_p(res.acc_v2, sopts);

    const auto copts = config.classify_options();
    res.classifications = classify_items(res.acc_v1, res.acc_v2, res.pm, copts);
    res.churn = churn_report(res.classifications);

    if (config.n_permutations > 0) {
        res.null_calibration = empirical_null(trials_v1, trials_v2, res.pm,
                                              config.n_permutations, config.seed, copts);
    }

    res.bins = difficulty_bins(res.classifications, config.bin_edges);

    bool has_domains = false;
    std::string first_domain;
    bool first_set = false;
    for (const auto& c : res.classifications) {
        if (is_excluded(c.category)) continue;
        if (!first_set) {
            first_domain = c.domain;
            first_set = true;
        } else if (c.domain != first_domain) {
            has_domains = true;
            break;
        }
    }
    if (has_domains) {
        try {
            res.contingency = domain_contingency(res.classifications);
        } catch (const AnalysisError&) {
            // Sparse table (an all-zero category column): report the section
            // as not computed rather than failing the whole run.
        }
    }

    res.strata = stratified_sensitivity(res.acc_v1, res.acc_v2, res.rel_v1.r_xx, res.rel_v2.r_xx,
                                        config.bin_edges, config.threshold, copts,
                                        config.sd_convention);
    return res;
}

AnalysisBundle run_analysis(const RunConfig& config) {
    AnalysisBundle bundle;
    bundle.config = config;

    const auto trials_v1 = parse_trials_file(config.trials_v1_path, config.k);
    const auto trials_v2 = parse_trials_file(config.trials_v2_path, config.k);
    bundle.pair = analyze_pair(trials_v1, trials_v2, config);

    if (!config.pair_b_v1_path.empty()) {
        const auto b1 = parse_trials_file(config.pair_b_v1_path, config.k);
        const auto b2 = parse_trials_file(config.pair_b_v2_path, config.k);
        bundle.pair_b = analyze_pair(b1, b2, config);
        bundle.churn_z = churn_rate_z_test(bundle.pair.churn, bundle.pair_b->churn,
                                           ChurnDenominator::post_exclusion);
        bundle.cross_pair = cross_pair_correlation(bundle.pair.classifications,
                                                   bundle.pair_b->classifications);
    }

    if (!config.greedy_v1_path.empty()) {
        const auto g1 = parse_greedy_file(config.greedy_v1_path);
        const auto g2 = parse_greedy_file(config.greedy_v2_path);
        bundle.greedy = greedy_compare(g1, g2, bundle.pair.classifications);
    }
    return bundle;
}

}  // namespace rcb
