#include "rcb/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "rcb/errors.hpp"

namespace rcb {

GreedyRun parse_greedy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open greedy file: " + path);
    GreedyRun run;
    std::string line;
    std::size_t line_no = 0;
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    if (csv) {
        std::getline(in, line);  // header: item_id,correct[,model_id]
        ++line_no;
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string item_id;
        bool correct = false;
        if (csv) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) {
                throw ValidationError(path + " line " + std::to_string(line_no) +
                                      ": malformed row");
            }
            item_id = line.substr(0, comma);
            std::string rest = line.substr(comma + 1);
            const auto comma2 = rest.find(',');
            std::string val = comma2 == std::string::npos ? rest : rest.substr(0, comma2);
            if (val == "true" || val == "1") {
                correct = true;
            } else if (val == "false" || val == "0") {
                correct = false;
            } else {
                throw ValidationError(path + " line " + std::to_string(line_no) +
                                      ": invalid boolean '" + val + "'");
            }
            if (comma2 != std::string::npos && run.model_id.empty()) {
                run.model_id = rest.substr(comma2 + 1);
            }
        } else {
            auto j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                throw ValidationError(path + " line " + std::to_string(line_no) +
                                      ": malformed JSON");
            }
            try {
                item_id = j.at("item_id").get<std::string>();
                correct = j.at("correct").get<bool>();
                if (run.model_id.empty()) run.model_id = j.value("model_id", std::string{});
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(path + " line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (run.correct.count(item_id)) {
            throw ValidationError(path + ": duplicate greedy item '" + item_id + "'");
        }
        run.correct[item_id] = correct;
    }
    return run;
}

DifficultyBinTable difficulty_bins(const std::vector<RciClassification>& classifications,
                                   const std::vector<double>& edges) {
    if (edges.size() < 2 || edges.front() != 0.0 || edges.back() != 1.0 ||
        std::adjacent_find(edges.begin(), edges.end(),
                          [](double a, double b) { return a >= b; }) != edges.end()) {
        throw AnalysisError("difficulty_bins: edges must strictly increase from 0 to 1");
    }
    DifficultyBinTable table;
    table.bins.resize(edges.size() - 1);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        table.bins[b].lo = edges[b];
        table.bins[b].hi = edges[b + 1];
    }
    for (const auto& c : classifications) {
        if (is_excluded(c.category)) continue;
        if (!c.p_v1) {
            throw AnalysisError("difficulty_bins: analysable item '" + c.item_id +
                                "' has undefined p_v1");
        }
        const double p = *c.p_v1;
        std::size_t b = edges.size() - 2;
        for (std::size_t i = 0; i + 2 < edges.size(); ++i) {
            if (p >= edges[i] && p < edges[i + 1]) {
                b = i;
                break;
            }
        }
        auto& bin = table.bins[b];
        ++bin.n;
        switch (c.category) {
            case Category::Improved: ++bin.n_improved; break;
            case Category::Deteriorated: ++bin.n_deteriorated; break;
            default: ++bin.n_nochange; break;
        }
    }
    for (auto& bin : table.bins) {
        if (bin.n > 0) {
            bin.churn_rate = static_cast<double>(bin.n_improved + bin.n_deteriorated) /
                             static_cast<double>(bin.n);
        }
    }
    return table;
}

ContingencyResult domain_contingency(const std::vector<RciClassification>& classifications) {
    std::map<std::string, DomainRow> rows;
    std::size_t n = 0;
    for (const auto& c : classifications) {
        if (is_excluded(c.category)) continue;
        auto& row = rows[c.domain];
        row.domain = c.domain;
        switch (c.category) {
            case Category::Improved: ++row.n_improved; break;
            case Category::NoChange: ++row.n_nochange; break;
            case Category::Deteriorated: ++row.n_deteriorated; break;
            default: break;
        }
        ++n;
    }
    if (rows.size() < 2) {
        throw AnalysisError("domain_contingency: need at least 2 domains with analysable items");
    }

    ContingencyResult res;
    res.n = n;
    std::array<std::size_t, 3> col_totals{};
    for (auto& [name, row] : rows) {
        col_totals[0] += row.n_improved;
        col_totals[1] += row.n_nochange;
        col_totals[2] += row.n_deteriorated;
        if (row.n_deteriorated > 0) {
            row.improvement_deterioration_ratio =
                static_cast<double>(row.n_improved) / static_cast<double>(row.n_deteriorated);
        }
        res.table.push_back(row);
    }

    double chi2 = 0.0;
    for (const auto& row : res.table) {
        const std::size_t row_total = row.n_improved + row.n_nochange + row.n_deteriorated;
        const std::array<std::size_t, 3> observed{row.n_improved, row.n_nochange,
                                                  row.n_deteriorated};
        for (int j = 0; j < 3; ++j) {
            const double expected = static_cast<double>(row_total) *
                                    static_cast<double>(col_totals[static_cast<std::size_t>(j)]) /
                                    static_cast<double>(n);
            if (expected == 0.0) {
                throw AnalysisError(
                    "domain_contingency: expected cell count 0 (domain '" + row.domain +
                    "'); merge sparse categories before testing");
            }
            const double d = static_cast<double>(observed[static_cast<std::size_t>(j)]) - expected;
            chi2 += d * d / expected;
        }
    }
    res.chi2 = chi2;
    res.df = (static_cast<int>(res.table.size()) - 1) * 2;
    res.p_value = stats::chi2_sf(chi2, res.df);
    res.cramers_v = stats::cramers_v(chi2, n, static_cast<int>(res.table.size()), 3);
    return res;
}

stats::ZTestResult churn_rate_z_test(const ChurnReport& a, const ChurnReport& b,
                                     ChurnDenominator denom) {
    const bool post = denom == ChurnDenominator::post_exclusion;
    const double pa = post ? a.churn_rate_post : a.churn_rate_full;
    const double pb = post ? b.churn_rate_post : b.churn_rate_full;
    const std::size_t na = post ? a.n_analysable : a.n_total;
    const std::size_t nb = post ? b.n_analysable : b.n_total;
    if (na == 0 || nb == 0) throw AnalysisError("churn_rate_z_test: empty denominator");
    return stats::two_proportion_z(pa, na, pb, nb);
}

CrossPairResult cross_pair_correlation(const std::vector<RciClassification>& class_a,
                                       const std::vector<RciClassification>& class_b) {
    std::map<std::string, double> rci_b;
    for (const auto& c : class_b) {
        if (!is_excluded(c.category)) rci_b[c.item_id] = c.rci;
    }
    std::vector<double> xs, ys;
    for (const auto& c : class_a) {
        if (is_excluded(c.category)) continue;
        auto it = rci_b.find(c.item_id);
        if (it == rci_b.end()) continue;
        xs.push_back(c.rci);
        ys.push_back(it->second);
    }
    CrossPairResult res;
    res.n_shared = xs.size();
    if (res.n_shared < 3) {
        throw AnalysisError("cross_pair_correlation: fewer than 3 shared analysable items");
    }
    bool defined = false;
    res.pearson_r = stats::pearson(xs, ys, &defined);
    if (!defined) throw AnalysisError("cross_pair_correlation: zero variance in RCI values");
    if (res.pearson_r >= 1.0 || res.pearson_r <= -1.0) {
        res.p_value = 0.0;
    } else {
        const double n = static_cast<double>(res.n_shared);
        const double t = res.pearson_r *
                         std::sqrt((n - 2.0) / (1.0 - res.pearson_r * res.pearson_r));
        res.p_value = stats::t_two_sided_p(t, static_cast<int>(res.n_shared) - 2);
    }
    return res;
}

GreedyComparison greedy_compare(const GreedyRun& greedy_v1, const GreedyRun& greedy_v2,
                                const std::vector<RciClassification>& classifications,
                                bool post_exclusion_only) {
    GreedyComparison cmp;
    std::set<std::string> seen;
    for (const auto& c : classifications) {
        seen.insert(c.item_id);
        if (post_exclusion_only && is_excluded(c.category)) continue;
        const auto it1 = greedy_v1.correct.find(c.item_id);
        const auto it2 = greedy_v2.correct.find(c.item_id);
        if (it1 == greedy_v1.correct.end() || it2 == greedy_v2.correct.end()) {
            ++cmp.n_unmatched;
            continue;
        }
        int greedy_dir = 1;  // no change
        if (!it1->second && it2->second) greedy_dir = 0;  // improved
        if (it1->second && !it2->second) greedy_dir = 2;  // deteriorated
        int rci_dir = 1;
        if (c.category == Category::Improved) rci_dir = 0;
        if (c.category == Category::Deteriorated) rci_dir = 2;
        ++cmp.confusion[static_cast<std::size_t>(greedy_dir)][static_cast<std::size_t>(rci_dir)];
        ++cmp.n_matched;
    }
    // Greedy-only items are unmatched too, not silently dropped.
    for (const auto& [id, unused] : greedy_v1.correct) {
        if (!seen.count(id)) ++cmp.n_unmatched;
    }
    for (const auto& [id, unused] : greedy_v2.correct) {
        if (!seen.count(id) && !greedy_v1.correct.count(id)) ++cmp.n_unmatched;
    }
    if (cmp.n_matched == 0) throw AnalysisError("greedy_compare: no matched items");

    std::size_t agree = 0, greedy_changed = 0, rci_changed = 0;
    for (int g = 0; g < 3; ++g) {
        for (int r = 0; r < 3; ++r) {
            const std::size_t v = cmp.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(r)];
            if (g == r) agree += v;
            if (g != 1) greedy_changed += v;
            if (r != 1) rci_changed += v;
            if (g != 1 && r == 1) cmp.greedy_changed_rci_nochange_count += v;
            if (g == 1 && r != 1) cmp.rci_changed_greedy_nochange_count += v;
        }
    }
    cmp.exact_agreement_rate = static_cast<double>(agree) / static_cast<double>(cmp.n_matched);
    if (greedy_changed > 0) {
        cmp.greedy_changed_rci_nochange_rate =
            static_cast<double>(cmp.greedy_changed_rci_nochange_count) /
            static_cast<double>(greedy_changed);
    }
    if (rci_changed > 0) {
        cmp.rci_changed_greedy_nochange_rate =
            static_cast<double>(cmp.rci_changed_greedy_nochange_count) /
            static_cast<double>(rci_changed);
    }
    return cmp;
}

}  // namespace rcb
