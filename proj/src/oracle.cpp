#include "rcb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "rcb/errors.hpp"
#include "rcb/rng.hpp"

namespace rcb {

namespace {

void size_guard(const TrialSet& t) {
    if (t.items.size() > 1000 || t.k > 20) {
        throw AnalysisError("brute_force_pipeline: size guard exceeded (n <= 1000, K <= 20)");
    }
}

double naive_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double naive_sd(const std::vector<double>& v, bool population) {
    const double m = naive_mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (population ? static_cast<double>(v.size())
                                      : static_cast<double>(v.size() - 1)));
}

// Pearson r via the direct definition: covariance over the product of the
// two standard deviations.
bool naive_pearson(const std::vector<double>& x, const std::vector<double>& y, double* out) {
    const std::size_t n = x.size();
    const double mx = naive_mean(x);
    const double my = naive_mean(y);
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return false;
    *out = cov / (std::sqrt(vx) * std::sqrt(vy));
    return true;
}

double naive_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double naive_percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    long rank = static_cast<long>(std::ceil(q * static_cast<double>(v.size())));
    if (rank < 1) rank = 1;
    if (rank > static_cast<long>(v.size())) rank = static_cast<long>(v.size());
    return v[static_cast<std::size_t>(rank - 1)];
}

AccuracyTable naive_accuracy(const TrialSet& t) {
    AccuracyTable acc;
    acc.model_id = t.model_id;
    for (const auto& item : t.items) {
        AccuracyRow row;
        row.item_id = item.item_id;
        row.domain = item.domain;
        for (const auto& slot : item.slots) {
            if (!slot.valid) continue;
            ++row.k_valid;
            if (slot.correct) ++row.n_correct;
        }
        acc.rows.push_back(row);
    }
    return acc;
}

ReliabilityEstimate naive_reliability(const TrialSet& t, int n_splits, std::uint64_t seed) {
    std::vector<const ItemTrials*> used;
    for (const auto& item : t.items) {
        bool full = true;
        for (const auto& slot : item.slots) {
            if (!slot.valid) full = false;
        }
        if (full) used.push_back(&item);
    }
    const int k = t.k;
    const int half_a = (k + 1) / 2;
    const std::uint64_t proc_seed = mix_seed(seed, seed_label::split_half);

    std::vector<double> values;
    int skipped = 0;
    for (int s = 0; s < n_splits; ++s) {
        std::vector<double> pa, pb;
        for (std::size_t i = 0; i < used.size(); ++i) {
            const auto perm = split_permutation(proc_seed, s, i, k);
            double ca = 0.0, cb = 0.0;
            for (int j = 0; j < k; ++j) {
                const bool c = used[i]->slots[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])].correct;
                if (j < half_a) {
                    ca += c ? 1.0 : 0.0;
                } else {
                    cb += c ? 1.0 : 0.0;
                }
            }
            pa.push_back(ca / half_a);
            pb.push_back(cb / (k - half_a));
        }
        double r = 0.0;
        if (!naive_pearson(pa, pb, &r)) {
            ++skipped;
            continue;
        }
        values.push_back(2.0 * r / (1.0 + r));
    }

    // ICC(2,1) from residuals of the additive two-way model.
    double icc;
    {
        const std::size_t n = used.size();
        std::vector<double> row_mean(n, 0.0), col_mean(static_cast<std::size_t>(k), 0.0);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) {
                const double x = used[i]->slots[static_cast<std::size_t>(j)].correct ? 1.0 : 0.0;
                row_mean[i] += x;
                col_mean[static_cast<std::size_t>(j)] += x;
                grand += x;
            }
        }
        for (auto& v : row_mean) v /= k;
        for (auto& v : col_mean) v /= static_cast<double>(n);
        grand /= static_cast<double>(n) * k;
        double ss_r = 0.0, ss_c = 0.0, ss_e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ss_r += k * (row_mean[i] - grand) * (row_mean[i] - grand);
        }
        for (int j = 0; j < k; ++j) {
            const double cm = col_mean[static_cast<std::size_t>(j)];
            ss_c += static_cast<double>(n) * (cm - grand) * (cm - grand);
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j) {
                const double x = used[i]->slots[static_cast<std::size_t>(j)].correct ? 1.0 : 0.0;
                const double resid = x - row_mean[i] - col_mean[static_cast<std::size_t>(j)] + grand;
                ss_e += resid * resid;
            }
        }
        const double ms_r = ss_r / (static_cast<double>(n) - 1.0);
        const double ms_c = ss_c / (k - 1.0);
        const double ms_e = ss_e / ((static_cast<double>(n) - 1.0) * (k - 1.0));
        icc = (ms_r - ms_e) /
              (ms_r + (k - 1.0) * ms_e + (static_cast<double>(k) / static_cast<double>(n)) * (ms_c - ms_e));
    }

    ReliabilityEstimate est;
    est.model_id = t.model_id;
    est.r_xx = naive_median(values);
    est.ci_low = naive_percentile(values, 0.025);
    est.ci_high = naive_percentile(values, 0.975);
    est.n_splits = n_splits;
    est.n_skipped_splits = skipped;
    est.icc = icc;
    est.n_items_used = static_cast<int>(used.size());
    est.seed = seed;
    est.unequal_halves = (k % 2) != 0;
    return est;
}

ProphecyResult naive_prophecy(double r_k, int k, const std::vector<double>& targets) {
    ProphecyResult res;
    res.r_single = r_k / (k - (k - 1.0) * r_k);
    for (double target : targets) {
        int needed = 1;
        while (needed * res.r_single / (1.0 + (needed - 1.0) * res.r_single) < target) ++needed;
        res.table.emplace_back(target, needed);
    }
    return res;
}

std::vector<double> naive_selected_p(const AccuracyTable& acc, int min_valid) {
    std::vector<double> p;
    for (const auto& row : acc.rows) {
        if (row.k_valid >= min_valid && row.k_valid > 0) {
            p.push_back(static_cast<double>(row.n_correct) / row.k_valid);
        }
    }
    return p;
}

std::vector<RciClassification> naive_classify(const AccuracyTable& a1, const AccuracyTable& a2,
                                              const PairMeasurement& pm,
                                              const ClassifyOptions& opts) {
    std::vector<RciClassification> out;
    for (std::size_t i = 0; i < a1.rows.size(); ++i) {
        const auto& r1 = a1.rows[i];
        const auto& r2 = a2.rows[i];
        RciClassification c;
        c.item_id = r1.item_id;
        c.domain = r1.domain.empty() ? r2.domain : r1.domain;
        if (r1.k_valid > 0) c.p_v1 = static_cast<double>(r1.n_correct) / r1.k_valid;
        if (r2.k_valid > 0) c.p_v2 = static_cast<double>(r2.n_correct) / r2.k_valid;
        if (r1.k_valid < opts.min_valid || r2.k_valid < opts.min_valid || !c.p_v1 || !c.p_v2) {
            c.category = Category::ExcludedInsufficientValid;
        } else {
            const double p1 = *c.p_v1;
            const double p2 = *c.p_v2;
            bool fc;
            if (opts.floor_ceiling == FloorCeilingRule::same_extreme) {
                fc = (p1 == 0.0 && p2 == 0.0) || (p1 == 1.0 && p2 == 1.0);
            } else {
                fc = (p1 == 0.0 || p1 == 1.0) && (p2 == 0.0 || p2 == 1.0);
            }
            c.delta_p = p2 - p1;
            if (fc) {
                c.category = Category::ExcludedFloorCeiling;
            } else {
                c.rci = c.delta_p / pm.s_diff;
                if (c.rci > pm.alpha_threshold) {
                    c.category = Category::Improved;
                } else if (c.rci < -pm.alpha_threshold) {
                    c.category = Category::Deteriorated;
                } else {
                    c.category = Category::NoChange;
                }
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

ChurnReport naive_churn(const std::vector<RciClassification>& cls) {
    ChurnReport rep;
    rep.n_total = cls.size();
    std::vector<double> all_deltas, changed_deltas;
    for (const auto& c : cls) {
        if (c.category == Category::Improved) ++rep.n_improved;
        if (c.category == Category::NoChange) ++rep.n_nochange;
        if (c.category == Category::Deteriorated) ++rep.n_deteriorated;
        if (c.category == Category::ExcludedInsufficientValid) ++rep.n_excluded_insufficient;
        if (c.category == Category::ExcludedFloorCeiling) ++rep.n_excluded_floorceiling;
        if (c.category == Category::Improved || c.category == Category::NoChange ||
            c.category == Category::Deteriorated) {
            all_deltas.push_back(std::fabs(c.delta_p));
            if (c.category != Category::NoChange) changed_deltas.push_back(std::fabs(c.delta_p));
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
    rep.net_surplus =
        static_cast<long long>(rep.n_improved) - static_cast<long long>(rep.n_deteriorated);
    auto effect = [](const std::vector<double>& deltas) {
        EffectSizes e;
        e.n = deltas.size();
        if (deltas.empty()) return e;
        e.mean_abs_delta = naive_mean(deltas);
        e.median_abs_delta = naive_median(deltas);
        double ge02 = 0.0, ge04 = 0.0;
        for (double d : deltas) {
            if (d >= 0.2) ge02 += 1.0;
            if (d >= 0.4) ge04 += 1.0;
        }
        e.frac_abs_delta_ge_02 = ge02 / static_cast<double>(e.n);
        e.frac_abs_delta_ge_04 = ge04 / static_cast<double>(e.n);
        return e;
    };
    rep.effect_analysable = effect(all_deltas);
    rep.effect_changed = effect(changed_deltas);
    return rep;
}

NullCalibration naive_null(const TrialSet& t1, const TrialSet& t2, const PairMeasurement& pm,
                           int n_permutations, std::uint64_t seed, const ClassifyOptions& opts) {
    NullCalibration cal;
    cal.n_permutations = n_permutations;
    cal.seed = seed;
    const auto observed = naive_classify(naive_accuracy(t1), naive_accuracy(t2), pm, opts);
    for (const auto& c : observed) {
        if (c.category == Category::Improved) ++cal.observed_improved;
        if (c.category == Category::Deteriorated) ++cal.observed_deteriorated;
    }
    for (int p = 0; p < n_permutations; ++p) {
        const auto flips = permutation_flips(seed, p, t1.items.size());
        TrialSet a = t1, b = t2;
        for (std::size_t i = 0; i < flips.size(); ++i) {
            if (flips[i]) {
                auto tmp = a.items[i].slots;
                a.items[i].slots = b.items[i].slots;
                b.items[i].slots = tmp;
            }
        }
        const auto cls = naive_classify(naive_accuracy(a), naive_accuracy(b), pm, opts);
        std::size_t imp = 0, det = 0;
        for (const auto& c : cls) {
            if (c.category == Category::Improved) ++imp;
            if (c.category == Category::Deteriorated) ++det;
        }
        cal.null_improved_samples.push_back(imp);
        cal.null_deteriorated_samples.push_back(det);
    }
    auto p95 = [](std::vector<std::size_t> v) {
        std::sort(v.begin(), v.end());
        long rank = static_cast<long>(std::ceil(0.95 * static_cast<double>(v.size())));
        if (rank < 1) rank = 1;
        return v[static_cast<std::size_t>(rank - 1)];
    };
    cal.null_improved_p95 = p95(cal.null_improved_samples);
    cal.null_deteriorated_p95 = p95(cal.null_deteriorated_samples);
    double mi = 0.0, md = 0.0;
    for (auto v : cal.null_improved_samples) mi += static_cast<double>(v);
    for (auto v : cal.null_deteriorated_samples) md += static_cast<double>(v);
    cal.null_improved_mean = mi / n_permutations;
    cal.null_deteriorated_mean = md / n_permutations;
    cal.exceeds_improved = cal.observed_improved > cal.null_improved_p95;
    cal.exceeds_deteriorated = cal.observed_deteriorated > cal.null_deteriorated_p95;
    return cal;
}

DifficultyBinTable naive_bins(const std::vector<RciClassification>& cls,
                              const std::vector<double>& edges) {
    DifficultyBinTable table;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        DifficultyBin bin;
        bin.lo = edges[b];
        bin.hi = edges[b + 1];
        for (const auto& c : cls) {
            if (is_excluded(c.category) || !c.p_v1) continue;
            const double p = *c.p_v1;
            const bool last = b + 2 == edges.size();
            const bool inside = p >= bin.lo && (last ? p <= bin.hi : p < bin.hi);
            if (!inside) continue;
            ++bin.n;
            if (c.category == Category::Improved) ++bin.n_improved;
            else if (c.category == Category::Deteriorated) ++bin.n_deteriorated;
            else ++bin.n_nochange;
        }
        if (bin.n > 0) {
            bin.churn_rate =
                static_cast<double>(bin.n_improved + bin.n_deteriorated) / static_cast<double>(bin.n);
        }
        table.bins.push_back(bin);
    }
    return table;
}

ContingencyResult naive_contingency(const std::vector<RciClassification>& cls) {
    std::set<std::string> domains;
    for (const auto& c : cls) {
        if (!is_excluded(c.category)) domains.insert(c.domain);
    }
    ContingencyResult res;
    for (const auto& d : domains) {
        DomainRow row;
        row.domain = d;
        for (const auto& c : cls) {
            if (is_excluded(c.category) || c.domain != d) continue;
            if (c.category == Category::Improved) ++row.n_improved;
            if (c.category == Category::NoChange) ++row.n_nochange;
            if (c.category == Category::Deteriorated) ++row.n_deteriorated;
        }
        if (row.n_deteriorated > 0) {
            row.improvement_deterioration_ratio =
                static_cast<double>(row.n_improved) / static_cast<double>(row.n_deteriorated);
        }
        res.table.push_back(row);
        res.n += row.n_improved + row.n_nochange + row.n_deteriorated;
    }
    double chi2 = 0.0;
    std::size_t tot_i = 0, tot_n = 0, tot_d = 0;
    for (const auto& row : res.table) {
        tot_i += row.n_improved;
        tot_n += row.n_nochange;
        tot_d += row.n_deteriorated;
    }
    for (const auto& row : res.table) {
        const double rt = static_cast<double>(row.n_improved + row.n_nochange + row.n_deteriorated);
        const double n = static_cast<double>(res.n);
        const double cells[3] = {static_cast<double>(row.n_improved),
                                 static_cast<double>(row.n_nochange),
                                 static_cast<double>(row.n_deteriorated)};
        const double cols[3] = {static_cast<double>(tot_i), static_cast<double>(tot_n),
                                static_cast<double>(tot_d)};
        for (int j = 0; j < 3; ++j) {
            const double e = rt * cols[j] / n;
            chi2 += (cells[j] - e) * (cells[j] - e) / e;
        }
    }
    res.chi2 = chi2;
    res.df = (static_cast<int>(res.table.size()) - 1) * 2;
    res.p_value = stats::chi2_sf(chi2, res.df);
    res.cramers_v = std::sqrt(chi2 / (static_cast<double>(res.n) *
                                      std::min(static_cast<int>(res.table.size()) - 1, 2)));
    return res;
}

std::vector<StratumResult> naive_strata(const AccuracyTable& a1, const AccuracyTable& a2,
                                        double r1, double r2, const RunConfig& cfg,
                                        const std::vector<RciClassification>& global_cls) {
    const auto& edges = cfg.bin_edges;
    const bool pop = cfg.sd_convention == SdConvention::population;
    std::vector<StratumResult> out;
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        StratumResult st;
        st.lo = edges[b];
        st.hi = edges[b + 1];
        const bool last = b + 2 == edges.size();
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < a1.rows.size(); ++i) {
            const auto& row1 = a1.rows[i];
            const auto& row2 = a2.rows[i];
            if (row1.k_valid < cfg.min_valid || row2.k_valid < cfg.min_valid ||
                row1.k_valid == 0 || row2.k_valid == 0) {
                continue;
            }
            const double p = static_cast<double>(row1.n_correct) / row1.k_valid;
            if (p >= st.lo && (last ? p <= st.hi : p < st.hi)) members.push_back(i);
        }
        st.n = members.size();
        if (st.n < 2) {
            st.skipped = true;
            out.push_back(std::move(st));
            continue;
        }
        AccuracyTable m1, m2;
        m1.model_id = a1.model_id;
        m2.model_id = a2.model_id;
        std::vector<double> p1s, p2s;
        for (std::size_t i : members) {
            m1.rows.push_back(a1.rows[i]);
            m2.rows.push_back(a2.rows[i]);
            p1s.push_back(static_cast<double>(a1.rows[i].n_correct) / a1.rows[i].k_valid);
            p2s.push_back(static_cast<double>(a2.rows[i].n_correct) / a2.rows[i].k_valid);
        }
        const double sem1 = naive_sd(p1s, pop) * std::sqrt(1.0 - r1);
        const double sem2 = naive_sd(p2s, pop) * std::sqrt(1.0 - r2);
        st.pm.sem_v1 = sem1;
        st.pm.sem_v2 = sem2;
        st.pm.s_diff = std::sqrt(sem1 * sem1 + sem2 * sem2);
        st.pm.alpha_threshold = cfg.threshold;
        st.pm.min_detectable_delta = cfg.threshold * st.pm.s_diff;
        st.pm.degenerate = st.pm.s_diff == 0.0;
        if (st.pm.degenerate) {
            st.skipped = true;
            out.push_back(std::move(st));
            continue;
        }
        st.classifications = naive_classify(m1, m2, st.pm, cfg.classify_options());
        std::size_t analysable = 0;
        for (const auto& c : st.classifications) {
            if (is_excluded(c.category)) continue;
            ++analysable;
            if (c.category == Category::Improved) ++st.n_improved;
            if (c.category == Category::Deteriorated) ++st.n_deteriorated;
        }
        if (analysable > 0) {
            st.churn_rate = static_cast<double>(st.n_improved + st.n_deteriorated) /
                            static_cast<double>(analysable);
        }
        std::size_t g_changed = 0, g_analysable = 0;
        for (std::size_t i : members) {
            const auto& g = global_cls[i];
            if (is_excluded(g.category)) continue;
            ++g_analysable;
            if (is_changed(g.category)) ++g_changed;
        }
        if (g_analysable > 0) {
            st.global_churn_rate = static_cast<double>(g_changed) / static_cast<double>(g_analysable);
        }
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace

PairAnalysis brute_force_pipeline(const TrialSet& trials_v1, const TrialSet& trials_v2,
                                  const RunConfig& config) {
    size_guard(trials_v1);
    size_guard(trials_v2);

    PairAnalysis res;
    res.acc_v1 = naive_accuracy(trials_v1);
    res.acc_v2 = naive_accuracy(trials_v2);
    {
        double s = 0.0;
        std::size_t n = 0;
        for (const auto& r : res.acc_v1.rows) {
            if (r.k_valid > 0) {
                s += static_cast<double>(r.n_correct) / r.k_valid;
                ++n;
            }
        }
        res.mean_acc_v1 = s / static_cast<double>(n);
        s = 0.0;
        n = 0;
        for (const auto& r : res.acc_v2.rows) {
            if (r.k_valid > 0) {
                s += static_cast<double>(r.n_correct) / r.k_valid;
                ++n;
            }
        }
        res.mean_acc_v2 = s / static_cast<double>(n);
    }

    res.rel_v1 = naive_reliability(trials_v1, config.n_splits, config.seed);
    res.rel_v2 = naive_reliability(trials_v2, config.n_splits, config.seed);
    res.prophecy_v1 = naive_prophecy(res.rel_v1.r_xx, trials_v1.k, config.prophecy_targets);
    res.prophecy_v2 = naive_prophecy(res.rel_v2.r_xx, trials_v2.k, config.prophecy_targets);

    const bool pop = config.sd_convention == SdConvention::population;
    const double sd1 = naive_sd(naive_selected_p(res.acc_v1, config.min_valid), pop);
    const double sd2 = naive_sd(naive_selected_p(res.acc_v2, config.min_valid), pop);
    const double sem1 = sd1 * std::sqrt(1.0 - res.rel_v1.r_xx);
    const double sem2 = sd2 * std::sqrt(1.0 - res.rel_v2.r_xx);
    res.pm.sem_v1 = sem1;
    res.pm.sem_v2 = sem2;
    res.pm.s_diff = std::sqrt(sem1 * sem1 + sem2 * sem2);
    res.pm.alpha_threshold = config.threshold;
    res.pm.min_detectable_delta = config.threshold * res.pm.s_diff;
    res.pm.degenerate = res.pm.s_diff == 0.0;
    res.pm.r_xx_v1 = res.rel_v1.r_xx;
    res.pm.r_xx_v2 = res.rel_v2.r_xx;
    res.pm.sd_p_v1 = sd1;
    res.pm.sd_p_v2 = sd2;

    res.classifications = naive_classify(res.acc_v1, res.acc_v2, res.pm,
                                         config.classify_options());
    res.churn = naive_churn(res.classifications);
    if (config.n_permutations > 0) {
        res.null_calibration = naive_null(trials_v1, trials_v2, res.pm, config.n_permutations,
                                          config.seed, config.classify_options());
    }
    res.bins = naive_bins(res.classifications, config.bin_edges);

    std::set<std::string> domains;
    for (const auto& c : res.classifications) {
        if (!is_excluded(c.category)) domains.insert(c.domain);
    }
    std::size_t tot_i = 0, tot_n = 0, tot_d = 0;
    for (const auto& c : res.classifications) {
        if (c.category == Category::Improved) ++tot_i;
        if (c.category == Category::NoChange) ++tot_n;
        if (c.category == Category::Deteriorated) ++tot_d;
    }
    // An all-zero category column means a zero expected cell; the main
    // pipeline reports that section as not computed.
    if (domains.size() >= 2 && tot_i > 0 && tot_n > 0 && tot_d > 0) {
        res.contingency = naive_contingency(res.classifications);
    }

    res.strata = naive_strata(res.acc_v1, res.acc_v2, res.rel_v1.r_xx, res.rel_v2.r_xx, config,
                              res.classifications);
    return res;
}

stats::ZTestResult brute_force_churn_z(const ChurnReport& a, const ChurnReport& b,
                                       ChurnDenominator denom) {
    const bool post = denom == ChurnDenominator::post_exclusion;
    const double pa = post ? a.churn_rate_post : a.churn_rate_full;
    const double pb = post ? b.churn_rate_post : b.churn_rate_full;
    const double na = static_cast<double>(post ? a.n_analysable : a.n_total);
    const double nb = static_cast<double>(post ? b.n_analysable : b.n_total);
    const double pool = (pa * na + pb * nb) / (na + nb);
    stats::ZTestResult r;
    r.z = (pa - pb) / std::sqrt(pool * (1.0 - pool) * (1.0 / na + 1.0 / nb));
    r.p = std::erfc(std::fabs(r.z) / std::sqrt(2.0));
    return r;
}

CrossPairResult brute_force_cross_pair(const std::vector<RciClassification>& class_a,
                                       const std::vector<RciClassification>& class_b) {
    std::vector<double> xs, ys;
    for (const auto& ca : class_a) {
        if (is_excluded(ca.category)) continue;
        for (const auto& cb : class_b) {
            if (cb.item_id == ca.item_id && !is_excluded(cb.category)) {
                xs.push_back(ca.rci);
                ys.push_back(cb.rci);
                break;
            }
        }
    }
    CrossPairResult res;
    res.n_shared = xs.size();
    double r = 0.0;
    naive_pearson(xs, ys, &r);
    res.pearson_r = r;
    if (r >= 1.0 || r <= -1.0) {
        res.p_value = 0.0;
    } else {
        const double n = static_cast<double>(res.n_shared);
        const double t = r * std::sqrt((n - 2.0) / (1.0 - r * r));
        res.p_value = stats::t_two_sided_p(t, static_cast<int>(res.n_shared) - 2);
    }
    return res;
}

GreedyComparison brute_force_greedy(const GreedyRun& greedy_v1, const GreedyRun& greedy_v2,
                                    const std::vector<RciClassification>& classifications) {
    GreedyComparison cmp;
    std::set<std::string> seen;
    for (const auto& c : classifications) {
        seen.insert(c.item_id);
        const auto i1 = greedy_v1.correct.find(c.item_id);
        const auto i2 = greedy_v2.correct.find(c.item_id);
        if (i1 == greedy_v1.correct.end() || i2 == greedy_v2.correct.end()) {
            ++cmp.n_unmatched;
            continue;
        }
        std::size_t g = 1;
        if (!i1->second && i2->second) g = 0;
        if (i1->second && !i2->second) g = 2;
        std::size_t r = 1;
        if (c.category == Category::Improved) r = 0;
        if (c.category == Category::Deteriorated) r = 2;
        ++cmp.confusion[g][r];
        ++cmp.n_matched;
    }
    for (const auto& [id, unused] : greedy_v1.correct) {
        if (!seen.count(id)) ++cmp.n_unmatched;
    }
    for (const auto& [id, unused] : greedy_v2.correct) {
        if (!seen.count(id) && !greedy_v1.correct.count(id)) ++cmp.n_unmatched;
    }
    std::size_t agree = 0, gch = 0, rch = 0;
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t r = 0; r < 3; ++r) {
            if (g == r) agree += cmp.confusion[g][r];
            if (g != 1) gch += cmp.confusion[g][r];
            if (r != 1) rch += cmp.confusion[g][r];
            if (g != 1 && r == 1) cmp.greedy_changed_rci_nochange_count += cmp.confusion[g][r];
            if (g == 1 && r != 1) cmp.rci_changed_greedy_nochange_count += cmp.confusion[g][r];
        }
    }
    cmp.exact_agreement_rate = static_cast<double>(agree) / static_cast<double>(cmp.n_matched);
    if (gch > 0) {
        cmp.greedy_changed_rci_nochange_rate =
            static_cast<double>(cmp.greedy_changed_rci_nochange_count) / static_cast<double>(gch);
    }
    if (rch > 0) {
        cmp.rci_changed_greedy_nochange_rate =
            static_cast<double>(cmp.rci_changed_greedy_nochange_count) / static_cast<double>(rch);
    }
    return cmp;
}

namespace {

struct Comparator {
    double tol;
    std::vector<std::string> diffs;

    void num(const std::string& name, double a, double b) {
        const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
        if (std::fabs(a - b) > tol * scale) {
            std::ostringstream os;
            os.precision(17);
            os << name << ": " << a << " vs " << b;
            diffs.push_back(os.str());
        }
    }
    void integer(const std::string& name, long long a, long long b) {
        if (a != b) {
            diffs.push_back(name + ": " + std::to_string(a) + " vs " + std::to_string(b));
        }
    }
    void str(const std::string& name, const std::string& a, const std::string& b) {
        if (a != b) diffs.push_back(name + ": '" + a + "' vs '" + b + "'");
    }
};

void compare_churn(Comparator& c, const std::string& tag, const ChurnReport& a,
                   const ChurnReport& b) {
    c.integer(tag + ".n_total", static_cast<long long>(a.n_total), static_cast<long long>(b.n_total));
    c.integer(tag + ".n_excluded_insufficient", static_cast<long long>(a.n_excluded_insufficient),
              static_cast<long long>(b.n_excluded_insufficient));
    c.integer(tag + ".n_excluded_floorceiling", static_cast<long long>(a.n_excluded_floorceiling),
              static_cast<long long>(b.n_excluded_floorceiling));
    c.integer(tag + ".n_analysable", static_cast<long long>(a.n_analysable),
              static_cast<long long>(b.n_analysable));
    c.integer(tag + ".n_improved", static_cast<long long>(a.n_improved),
              static_cast<long long>(b.n_improved));
    c.integer(tag + ".n_nochange", static_cast<long long>(a.n_nochange),
              static_cast<long long>(b.n_nochange));
    c.integer(tag + ".n_deteriorated", static_cast<long long>(a.n_deteriorated),
              static_cast<long long>(b.n_deteriorated));
    c.integer(tag + ".net_surplus", a.net_surplus, b.net_surplus);
    c.num(tag + ".full_improved_rate", a.full_improved_rate, b.full_improved_rate);
    c.num(tag + ".full_nochange_rate", a.full_nochange_rate, b.full_nochange_rate);
    c.num(tag + ".full_deteriorated_rate", a.full_deteriorated_rate, b.full_deteriorated_rate);
    c.num(tag + ".churn_rate_full", a.churn_rate_full, b.churn_rate_full);
    c.num(tag + ".post_improved_rate", a.post_improved_rate, b.post_improved_rate);
    c.num(tag + ".post_nochange_rate", a.post_nochange_rate, b.post_nochange_rate);
    c.num(tag + ".post_deteriorated_rate", a.post_deteriorated_rate, b.post_deteriorated_rate);
    c.num(tag + ".churn_rate_post", a.churn_rate_post, b.churn_rate_post);
    c.num(tag + ".effect_analysable.mean", a.effect_analysable.mean_abs_delta,
          b.effect_analysable.mean_abs_delta);
    c.num(tag + ".effect_analysable.median", a.effect_analysable.median_abs_delta,
          b.effect_analysable.median_abs_delta);
    c.num(tag + ".effect_analysable.ge02", a.effect_analysable.frac_abs_delta_ge_02,
          b.effect_analysable.frac_abs_delta_ge_02);
    c.num(tag + ".effect_analysable.ge04", a.effect_analysable.frac_abs_delta_ge_04,
          b.effect_analysable.frac_abs_delta_ge_04);
    c.num(tag + ".effect_changed.mean", a.effect_changed.mean_abs_delta,
          b.effect_changed.mean_abs_delta);
    c.num(tag + ".effect_changed.median", a.effect_changed.median_abs_delta,
          b.effect_changed.median_abs_delta);
    c.integer(tag + ".effect_changed.n", static_cast<long long>(a.effect_changed.n),
              static_cast<long long>(b.effect_changed.n));
}

}  // namespace

std::vector<std::string> compare_pair_analysis(const PairAnalysis& a, const PairAnalysis& b,
                                               double tol) {
    Comparator c{tol, {}};

    c.integer("acc_v1.rows", static_cast<long long>(a.acc_v1.rows.size()),
              static_cast<long long>(b.acc_v1.rows.size()));
    if (a.acc_v1.rows.size() == b.acc_v1.rows.size()) {
        for (std::size_t i = 0; i < a.acc_v1.rows.size(); ++i) {
            const auto tag = "acc[" + std::to_string(i) + "]";
            c.str(tag + ".item_id", a.acc_v1.rows[i].item_id, b.acc_v1.rows[i].item_id);
            c.integer(tag + ".v1.k_valid", a.acc_v1.rows[i].k_valid, b.acc_v1.rows[i].k_valid);
            c.integer(tag + ".v1.n_correct", a.acc_v1.rows[i].n_correct, b.acc_v1.rows[i].n_correct);
            c.integer(tag + ".v2.k_valid", a.acc_v2.rows[i].k_valid, b.acc_v2.rows[i].k_valid);
            c.integer(tag + ".v2.n_correct", a.acc_v2.rows[i].n_correct, b.acc_v2.rows[i].n_correct);
        }
    }
    c.num("mean_acc_v1", a.mean_acc_v1, b.mean_acc_v1);
    c.num("mean_acc_v2", a.mean_acc_v2, b.mean_acc_v2);

    auto cmp_rel = [&](const std::string& tag, const ReliabilityEstimate& x,
                       const ReliabilityEstimate& y) {
        c.num(tag + ".r_xx", x.r_xx, y.r_xx);
        c.num(tag + ".ci_low", x.ci_low, y.ci_low);
        c.num(tag + ".ci_high", x.ci_high, y.ci_high);
        c.integer(tag + ".n_splits", x.n_splits, y.n_splits);
        c.integer(tag + ".n_skipped", x.n_skipped_splits, y.n_skipped_splits);
        c.num(tag + ".icc", x.icc, y.icc);
        c.integer(tag + ".n_items_used", x.n_items_used, y.n_items_used);
    };
    cmp_rel("rel_v1", a.rel_v1, b.rel_v1);
    cmp_rel("rel_v2", a.rel_v2, b.rel_v2);

    c.num("prophecy_v1.r_single", a.prophecy_v1.r_single, b.prophecy_v1.r_single);
    c.integer("prophecy_v1.rows", static_cast<long long>(a.prophecy_v1.table.size()),
              static_cast<long long>(b.prophecy_v1.table.size()));
    if (a.prophecy_v1.table.size() == b.prophecy_v1.table.size()) {
        for (std::size_t i = 0; i < a.prophecy_v1.table.size(); ++i) {
            c.integer("prophecy_v1.k[" + std::to_string(i) + "]", a.prophecy_v1.table[i].second,
                      b.prophecy_v1.table[i].second);
        }
    }

    c.num("pm.sem_v1", a.pm.sem_v1, b.pm.sem_v1);
    c.num("pm.sem_v2", a.pm.sem_v2, b.pm.sem_v2);
    c.num("pm.s_diff", a.pm.s_diff, b.pm.s_diff);
    c.num("pm.min_detectable_delta", a.pm.min_detectable_delta, b.pm.min_detectable_delta);
    c.num("pm.sd_p_v1", a.pm.sd_p_v1, b.pm.sd_p_v1);
    c.num("pm.sd_p_v2", a.pm.sd_p_v2, b.pm.sd_p_v2);

    c.integer("classifications.size", static_cast<long long>(a.classifications.size()),
              static_cast<long long>(b.classifications.size()));
    if (a.classifications.size() == b.classifications.size()) {
        for (std::size_t i = 0; i < a.classifications.size(); ++i) {
            const auto tag = "cls[" + std::to_string(i) + "]";
            c.str(tag + ".item_id", a.classifications[i].item_id, b.classifications[i].item_id);
            c.str(tag + ".category", category_name(a.classifications[i].category),
                  category_name(b.classifications[i].category));
            c.num(tag + ".delta_p", a.classifications[i].delta_p, b.classifications[i].delta_p);
            c.num(tag + ".rci", a.classifications[i].rci, b.classifications[i].rci);
        }
    }

    compare_churn(c, "churn", a.churn, b.churn);

    c.integer("null.present", a.null_calibration.has_value(), b.null_calibration.has_value());
    if (a.null_calibration && b.null_calibration) {
        const auto& x = *a.null_calibration;
        const auto& y = *b.null_calibration;
        c.integer("null.observed_improved", static_cast<long long>(x.observed_improved),
                  static_cast<long long>(y.observed_improved));
        c.integer("null.observed_deteriorated", static_cast<long long>(x.observed_deteriorated),
                  static_cast<long long>(y.observed_deteriorated));
        c.integer("null.p95_improved", static_cast<long long>(x.null_improved_p95),
                  static_cast<long long>(y.null_improved_p95));
        c.integer("null.p95_deteriorated", static_cast<long long>(x.null_deteriorated_p95),
                  static_cast<long long>(y.null_deteriorated_p95));
        c.integer("null.exceeds_improved", x.exceeds_improved, y.exceeds_improved);
        c.integer("null.exceeds_deteriorated", x.exceeds_deteriorated, y.exceeds_deteriorated);
        c.integer("null.samples", static_cast<long long>(x.null_improved_samples.size()),
                  static_cast<long long>(y.null_improved_samples.size()));
        if (x.null_improved_samples.size() == y.null_improved_samples.size()) {
            for (std::size_t i = 0; i < x.null_improved_samples.size(); ++i) {
                c.integer("null.improved[" + std::to_string(i) + "]",
                          static_cast<long long>(x.null_improved_samples[i]),
                          static_cast<long long>(y.null_improved_samples[i]));
                c.integer("null.deteriorated[" + std::to_string(i) + "]",
                          static_cast<long long>(x.null_deteriorated_samples[i]),
                          static_cast<long long>(y.null_deteriorated_samples[i]));
            }
        }
    }

    c.integer("bins.size", static_cast<long long>(a.bins.bins.size()),
              static_cast<long long>(b.bins.bins.size()));
    if (a.bins.bins.size() == b.bins.bins.size()) {
        for (std::size_t i = 0; i < a.bins.bins.size(); ++i) {
            const auto tag = "bin[" + std::to_string(i) + "]";
            c.integer(tag + ".n", static_cast<long long>(a.bins.bins[i].n),
                      static_cast<long long>(b.bins.bins[i].n));
            c.integer(tag + ".improved", static_cast<long long>(a.bins.bins[i].n_improved),
                      static_cast<long long>(b.bins.bins[i].n_improved));
            c.integer(tag + ".deteriorated", static_cast<long long>(a.bins.bins[i].n_deteriorated),
                      static_cast<long long>(b.bins.bins[i].n_deteriorated));
            c.num(tag + ".churn", a.bins.bins[i].churn_rate, b.bins.bins[i].churn_rate);
        }
    }

    c.integer("contingency.present", a.contingency.has_value(), b.contingency.has_value());
    if (a.contingency && b.contingency) {
        c.num("contingency.chi2", a.contingency->chi2, b.contingency->chi2);
        c.integer("contingency.df", a.contingency->df, b.contingency->df);
        c.num("contingency.p", a.contingency->p_value, b.contingency->p_value);
        c.num("contingency.v", a.contingency->cramers_v, b.contingency->cramers_v);
    }

    c.integer("strata.size", static_cast<long long>(a.strata.size()),
              static_cast<long long>(b.strata.size()));
    if (a.strata.size() == b.strata.size()) {
        for (std::size_t i = 0; i < a.strata.size(); ++i) {
            const auto tag = "stratum[" + std::to_string(i) + "]";
            c.integer(tag + ".skipped", a.strata[i].skipped, b.strata[i].skipped);
            c.integer(tag + ".n", static_cast<long long>(a.strata[i].n),
                      static_cast<long long>(b.strata[i].n));
            if (!a.strata[i].skipped && !b.strata[i].skipped) {
                c.num(tag + ".s_diff", a.strata[i].pm.s_diff, b.strata[i].pm.s_diff);
                c.integer(tag + ".improved", static_cast<long long>(a.strata[i].n_improved),
                          static_cast<long long>(b.strata[i].n_improved));
                c.integer(tag + ".deteriorated",
                          static_cast<long long>(a.strata[i].n_deteriorated),
                          static_cast<long long>(b.strata[i].n_deteriorated));
                c.num(tag + ".churn", a.strata[i].churn_rate, b.strata[i].churn_rate);
                c.num(tag + ".global_churn", a.strata[i].global_churn_rate,
                      b.strata[i].global_churn_rate);
            }
        }
    }

    return c.diffs;
}

}  // namespace rcb
