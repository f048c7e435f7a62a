#include "rcb/rci.hpp"

#include <algorithm>
#include <cmath>

#include "rcb/errors.hpp"
#include "rcb/stats.hpp"

namespace rcb {

const char* category_name(Category c) {
    switch (c) {
        case Category::Improved: return "improved";
        case Category::NoChange: return "no_change";
        case Category::Deteriorated: return "deteriorated";
        case Category::ExcludedInsufficientValid: return "excluded_insufficient_valid";
        case Category::ExcludedFloorCeiling: return "excluded_floor_ceiling";
    }
    return "?";
}

bool is_excluded(Category c) {
    return c == Category::ExcludedInsufficientValid || c == Category::ExcludedFloorCeiling;
}

bool is_changed(Category c) {
    return c == Category::Improved || c == Category::Deteriorated;
}

namespace {

std::vector<double> selected_p(const AccuracyTable& acc, const SemOptions& opts) {
    std::vector<double> p;
    for (const auto& row : acc.rows) {
        if (row.defined() && row.k_valid >= opts.min_valid) p.push_back(row.p());
    }
    return p;
}

}  // namespace

double sd_p(const AccuracyTable& acc, const SemOptions& opts) {
    const auto p = selected_p(acc, opts);
    if (p.size() < 2) throw AnalysisError("sd_p: fewer than 2 selected items");
    return stats::stddev(p, opts.convention == SdConvention::population);
}

double sem(const AccuracyTable& acc, double r_xx, const SemOptions& opts) {
    if (r_xx >= 1.0) return 0.0;  // degenerate: perfect reliability
    if (r_xx < 0.0) throw AnalysisError("sem: negative reliability");
    return sd_p(acc, opts) * std::sqrt(1.0 - r_xx);
}

PairMeasurement pair_measurement(double sem_v1, double sem_v2, double threshold) {
    if (sem_v1 < 0.0 || sem_v2 < 0.0) throw AnalysisError("pair_measurement: negative SEM");
    PairMeasurement pm;
    pm.sem_v1 = sem_v1;
    pm.sem_v2 = sem_v2;
    pm.s_diff = std::sqrt(sem_v1 * sem_v1 + sem_v2 * sem_v2);
    pm.alpha_threshold = threshold;
    pm.min_detectable_delta = threshold * pm.s_diff;
    pm.degenerate = pm.s_diff == 0.0;
    return pm;
}

std::vector<RciClassification> classify_items(const AccuracyTable& acc_v1,
                                              const AccuracyTable& acc_v2,
                                              const PairMeasurement& pm,
                                              const ClassifyOptions& opts) {
    require_matched_items(acc_v1, acc_v2);

    std::vector<RciClassification> out;
    out.reserve(acc_v1.rows.size());
    for (std::size_t i = 0; i < acc_v1.rows.size(); ++i) {
        const auto& r1 = acc_v1.rows[i];
        const auto& r2 = acc_v2.rows[i];
        RciClassification c;
        c.item_id = r1.item_id;
        c.domain = r1.domain.empty() ? r2.domain : r1.domain;
        if (r1.defined()) c.p_v1 = r1.p();
        if (r2.defined()) c.p_v2 = r2.p();

        if (!r1.defined() || !r2.defined() || r1.k_valid < opts.min_valid ||
            r2.k_valid < opts.min_valid) {
            c.category = Category::ExcludedInsufficientValid;
            out.push_back(std::move(c));
            continue;
        }

        const double p1 = r1.p();
        const double p2 = r2.p();
        const bool floorceiling =
            opts.floor_ceiling == FloorCeilingRule::same_extreme
                ? ((p1 == 0.0 && p2 == 0.0) || (p1 == 1.0 && p2 == 1.0))
                : ((p1 == 0.0 || p1 == 1.0) && (p2 == 0.0 || p2 == 1.0));
        if (floorceiling) {
            c.category = Category::ExcludedFloorCeiling;
            c.delta_p = p2 - p1;
            out.push_back(std::move(c));
            continue;
        }

        if (pm.s_diff == 0.0) {
            throw AnalysisError("classify_items: S_diff = 0 with non-excluded item '" +
                                c.item_id + "'");
        }
        c.delta_p = p2 - p1;
        c.rci = c.delta_p / pm.s_diff;
        if (c.rci > pm.alpha_threshold) {
            c.category = Category::Improved;
        } else if (c.rci < -pm.alpha_threshold) {
            c.category = Category::Deteriorated;
        } else {
            c.category = Category::NoChange;
        }
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

EffectSizes effect_sizes(const std::vector<double>& abs_deltas) {
    EffectSizes e;
    e.n = abs_deltas.size();
    if (abs_deltas.empty()) return e;
    e.mean_abs_delta = stats::mean(abs_deltas);
    e.median_abs_delta = stats::median(abs_deltas);
    std::size_t ge02 = 0, ge04 = 0;
    for (double d : abs_deltas) {
        if (d >= 0.2) ++ge02;
        if (d >= 0.4) ++ge04;
    }
    e.frac_abs_delta_ge_02 = static_cast<double>(ge02) / static_cast<double>(e.n);
    e.frac_abs_delta_ge_04 = static_cast<double>(ge04) / static_cast<double>(e.n);
    return e;
}

}  // namespace

ChurnReport churn_report(const std::vector<RciClassification>& classifications) {
    if (classifications.empty()) throw AnalysisError("churn_report: empty classification list");
    ChurnReport rep;
    rep.n_total = classifications.size();
    std::vector<double> abs_all, abs_changed;
    for (const auto& c : classifications) {
        switch (c.category) {
            case Category::Improved: ++rep.n_improved; break;
            case Category::NoChange: ++rep.n_nochange; break;
            case Category::Deteriorated: ++rep.n_deteriorated; break;
            case Category::ExcludedInsufficientValid: ++rep.n_excluded_insufficient; break;
            case Category::ExcludedFloorCeiling: ++rep.n_excluded_floorceiling; break;
        }
        if (!is_excluded(c.category)) {
            abs_all.push_back(std::fabs(c.delta_p));
            if (is_changed(c.category)) abs_changed.push_back(std::fabs(c.delta_p));
        }
    }
    rep.n_analysable = rep.n_improved + rep.n_nochange + rep.n_deteriorated;

    const double nt = static_cast<double>(rep.n_total);
    rep.full_improved_rate = rep.n_improved / nt;
    rep.full_deteriorated_rate = rep.n_deteriorated / nt;
    rep.full_nochange_rate =
        (rep.n_nochange + rep.n_excluded_insufficient + rep.n_excluded_floorceiling) / nt;
    rep.churn_rate_full = (rep.n_improved + rep.n_deteriorated) / nt;

    if (rep.n_analysable > 0) {
        const double na = static_cast<double>(rep.n_analysable);
        rep.post_improved_rate = rep.n_improved / na;
        rep.post_nochange_rate = rep.n_nochange / na;
        rep.post_deteriorated_rate = rep.n_deteriorated / na;
        rep.churn_rate_post = (rep.n_improved + rep.n_deteriorated) / na;
    }
    rep.net_surplus = static_cast<long long>(rep.n_improved) -
                      static_cast<long long>(rep.n_deteriorated);
    rep.effect_analysable = effect_sizes(abs_all);
    rep.effect_changed = effect_sizes(abs_changed);
    return rep;
}

std::vector<StratumResult> stratified_sensitivity(const AccuracyTable& acc_v1,
                                                  const AccuracyTable& acc_v2,
                                                  double r_xx_v1, double r_xx_v2,
                                                  const std::vector<double>& edges,
                                                  double threshold,
                                                  const ClassifyOptions& copts,
                                                  SdConvention convention) {
    require_matched_items(acc_v1, acc_v2);
    if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 1.0 ||
        !std::is_sorted(edges.begin(), edges.end())) {
        throw AnalysisError("stratified_sensitivity: edges must increase from 0 to 1");
    }

    // Global classification, for the per-bin churn delta.
    SemOptions sopts{convention, copts.min_valid};
    const auto global_pm = pair_measurement(sem(acc_v1, r_xx_v1, sopts),
                                            sem(acc_v2, r_xx_v2, sopts), threshold);
    const auto global_cls = classify_items(acc_v1, acc_v2, global_pm, copts);

    auto bin_of = [&edges](double p) {
        for (std::size_t b = 0; b + 2 < edges.size(); ++b) {
            if (p >= edges[b] && p < edges[b + 1]) return b;
        }
        return edges.size() - 2;  // last bin is closed
    };

    std::vector<StratumResult> out(edges.size() - 1);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        out[b].lo = edges[b];
        out[b].hi = edges[b + 1];
    }

    // Items eligible for classification (sufficient validity in both models).
    std::vector<std::vector<std::size_t>> members(out.size());
    for (std::size_t i = 0; i < acc_v1.rows.size(); ++i) {
        const auto& r1 = acc_v1.rows[i];
        const auto& r2 = acc_v2.rows[i];
        if (!r1.defined() || !r2.defined() || r1.k_valid < copts.min_valid ||
            r2.k_valid < copts.min_valid) {
            continue;
        }
        members[bin_of(r1.p())].push_back(i);
    }

    for (std::size_t b = 0; b < out.size(); ++b) {
        auto& stratum = out[b];
        stratum.n = members[b].size();
        if (stratum.n < 2) {
            stratum.skipped = true;
            continue;
        }
        AccuracyTable a1, a2;
        a1.model_id = acc_v1.model_id;
        a2.model_id = acc_v2.model_id;
        for (std::size_t i : members[b]) {
            a1.rows.push_back(acc_v1.rows[i]);
            a2.rows.push_back(acc_v2.rows[i]);
        }
        stratum.pm = pair_measurement(sem(a1, r_xx_v1, sopts), sem(a2, r_xx_v2, sopts), threshold);
        if (stratum.pm.degenerate) {
            stratum.skipped = true;  // zero within-bin spread, no measuring stick
            continue;
        }
        stratum.classifications = classify_items(a1, a2, stratum.pm, copts);

        std::size_t analysable = 0, global_changed = 0, global_analysable = 0;
        for (const auto& c : stratum.classifications) {
            if (is_excluded(c.category)) continue;
            ++analysable;
            if (c.category == Category::Improved) ++stratum.n_improved;
            if (c.category == Category::Deteriorated) ++stratum.n_deteriorated;
        }
        if (analysable > 0) {
            stratum.churn_rate = static_cast<double>(stratum.n_improved + stratum.n_deteriorated) /
                                 static_cast<double>(analysable);
        }
        for (std::size_t i : members[b]) {
            const auto& g = global_cls[i];
            if (is_excluded(g.category)) continue;
            ++global_analysable;
            if (is_changed(g.category)) ++global_changed;
        }
        if (global_analysable > 0) {
            stratum.global_churn_rate =
                static_cast<double>(global_changed) / static_cast<double>(global_analysable);
        }
    }
    return out;
}

}  // namespace rcb
