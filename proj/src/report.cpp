#include "rcb/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rcb/errors.hpp"
#include "rcb/plots.hpp"

namespace rcb {

using nlohmann::json;

namespace {

json config_to_json(const RunConfig& c) {
    return json{
        {"trials_v1_path", c.trials_v1_path},
        {"trials_v2_path", c.trials_v2_path},
        {"greedy_v1_path", c.greedy_v1_path},
        {"greedy_v2_path", c.greedy_v2_path},
        {"pair_b_v1_path", c.pair_b_v1_path},
        {"pair_b_v2_path", c.pair_b_v2_path},
        {"k", c.k},
        {"min_valid", c.min_valid},
        {"threshold", c.threshold},
        {"n_splits", c.n_splits},
        {"n_permutations", c.n_permutations},
        {"seed", c.seed},
        {"bin_edges", c.bin_edges},
        {"sd_convention", c.sd_convention == SdConvention::population ? "population" : "sample"},
        {"floor_ceiling_rule",
         c.floor_ceiling == FloorCeilingRule::same_extreme ? "same_extreme" : "both_extreme"},
        {"prophecy_targets", c.prophecy_targets},
        {"store_null_samples", c.store_null_samples},
    };
}

json reliability_to_json(const ReliabilityEstimate& r) {
    return json{
        {"model_id", r.model_id},
        {"r_xx", r.r_xx},
        {"ci_low", r.ci_low},
        {"ci_high", r.ci_high},
        {"n_splits", r.n_splits},
        {"n_skipped_splits", r.n_skipped_splits},
        {"icc", r.icc},
        {"n_items_used", r.n_items_used},
        {"seed", r.seed},
        {"unequal_halves", r.unequal_halves},
    };
}

json prophecy_to_json(const ProphecyResult& p) {
    json table = json::array();
    for (const auto& [target, k] : p.table) {
        table.push_back({{"target_r", target}, {"k_needed", k}});
    }
    return json{{"r_single", p.r_single}, {"table", table}};
}

json measurement_to_json(const PairMeasurement& pm) {
    return json{
        {"sem_v1", pm.sem_v1},
        {"sem_v2", pm.sem_v2},
        {"s_diff", pm.s_diff},
        {"min_detectable_delta", pm.min_detectable_delta},
        {"alpha_threshold", pm.alpha_threshold},
        {"r_xx_v1", pm.r_xx_v1},
        {"r_xx_v2", pm.r_xx_v2},
        {"sd_p_v1", pm.sd_p_v1},
        {"sd_p_v2", pm.sd_p_v2},
        {"degenerate", pm.degenerate},
    };
}

json effect_to_json(const EffectSizes& e) {
    return json{
        {"n", e.n},
        {"mean_abs_delta", e.mean_abs_delta},
        {"median_abs_delta", e.median_abs_delta},
        {"frac_abs_delta_ge_02", e.frac_abs_delta_ge_02},
        {"frac_abs_delta_ge_04", e.frac_abs_delta_ge_04},
    };
}

json churn_to_json(const ChurnReport& r) {
    return json{
        {"n_total", r.n_total},
        {"n_excluded_insufficient", r.n_excluded_insufficient},
        {"n_excluded_floorceiling", r.n_excluded_floorceiling},
        {"n_analysable", r.n_analysable},
        {"n_improved", r.n_improved},
        {"n_nochange", r.n_nochange},
        {"n_deteriorated", r.n_deteriorated},
        {"full_improved_rate", r.full_improved_rate},
        {"full_nochange_rate", r.full_nochange_rate},
        {"full_deteriorated_rate", r.full_deteriorated_rate},
        {"churn_rate_full", r.churn_rate_full},
        {"post_improved_rate", r.post_improved_rate},
        {"post_nochange_rate", r.post_nochange_rate},
        {"post_deteriorated_rate", r.post_deteriorated_rate},
        {"churn_rate_post", r.churn_rate_post},
        {"net_surplus", r.net_surplus},
        {"effect_analysable", effect_to_json(r.effect_analysable)},
        {"effect_changed", effect_to_json(r.effect_changed)},
    };
}

json pair_to_json(const PairAnalysis& p, bool store_null_samples) {
    json cls = json::array();
    for (const auto& c : p.classifications) {
        json jc{
            {"item_id", c.item_id},
            {"domain", c.domain},
            {"p_v1", c.p_v1 ? json(*c.p_v1) : json(nullptr)},
            {"p_v2", c.p_v2 ? json(*c.p_v2) : json(nullptr)},
            {"delta_p", c.delta_p},
            {"rci", c.rci},
            {"category", category_name(c.category)},
        };
        cls.push_back(std::move(jc));
    }

    json bins = json::array();
    for (const auto& b : p.bins.bins) {
        bins.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"n", b.n},
                        {"n_improved", b.n_improved},
                        {"n_deteriorated", b.n_deteriorated},
                        {"n_nochange", b.n_nochange},
                        {"churn_rate", b.churn_rate}});
    }

    json strata = json::array();
    for (const auto& s : p.strata) {
        json js{{"lo", s.lo},
                {"hi", s.hi},
                {"skipped", s.skipped},
                {"n", s.n},
                {"n_improved", s.n_improved},
                {"n_deteriorated", s.n_deteriorated},
                {"churn_rate", s.churn_rate},
                {"global_churn_rate", s.global_churn_rate}};
        if (!s.skipped) js["measurement"] = measurement_to_json(s.pm);
        strata.push_back(std::move(js));
    }

    json out{
        {"model_v1", p.acc_v1.model_id},
        {"model_v2", p.acc_v2.model_id},
        {"mean_acc_v1", p.mean_acc_v1},
        {"mean_acc_v2", p.mean_acc_v2},
        {"reliability_v1", reliability_to_json(p.rel_v1)},
        {"reliability_v2", reliability_to_json(p.rel_v2)},
        {"prophecy_v1", prophecy_to_json(p.prophecy_v1)},
        {"prophecy_v2", prophecy_to_json(p.prophecy_v2)},
        {"measurement", measurement_to_json(p.pm)},
        {"classifications", cls},
        {"churn", churn_to_json(p.churn)},
        {"difficulty_bins", bins},
        {"strata", strata},
    };

    if (p.null_calibration) {
        const auto& n = *p.null_calibration;
        json jn{
            {"n_permutations", n.n_permutations},
            {"seed", n.seed},
            {"observed_improved", n.observed_improved},
            {"observed_deteriorated", n.observed_deteriorated},
            {"null_improved_p95", n.null_improved_p95},
            {"null_deteriorated_p95", n.null_deteriorated_p95},
            {"null_improved_mean", n.null_improved_mean},
            {"null_deteriorated_mean", n.null_deteriorated_mean},
            {"exceeds_improved", n.exceeds_improved},
            {"exceeds_deteriorated", n.exceeds_deteriorated},
        };
        if (store_null_samples) {
            jn["null_improved_samples"] = n.null_improved_samples;
            jn["null_deteriorated_samples"] = n.null_deteriorated_samples;
        }
        out["null_calibration"] = std::move(jn);
    } else {
        out["null_calibration"] = nullptr;
    }

    if (p.contingency) {
        json rows = json::array();
        for (const auto& r : p.contingency->table) {
            rows.push_back({{"domain", r.domain},
                            {"n_improved", r.n_improved},
                            {"n_nochange", r.n_nochange},
                            {"n_deteriorated", r.n_deteriorated},
                            {"improvement_deterioration_ratio",
                             r.improvement_deterioration_ratio
                                 ? json(*r.improvement_deterioration_ratio)
                                 : json(nullptr)}});
        }
        out["contingency"] = json{{"table", rows},
                                  {"chi2", p.contingency->chi2},
                                  {"df", p.contingency->df},
                                  {"p_value", p.contingency->p_value},
                                  {"cramers_v", p.contingency->cramers_v},
                                  {"n", p.contingency->n}};
    } else {
        out["contingency"] = nullptr;
    }
    return out;
}

}  // namespace

json bundle_to_json(const AnalysisBundle& bundle) {
    json out;
    out["config"] = config_to_json(bundle.config);
    out["pair"] = pair_to_json(bundle.pair, bundle.config.store_null_samples);
    out["pair_b"] = bundle.pair_b
                        ? pair_to_json(*bundle.pair_b, bundle.config.store_null_samples)
                        : json(nullptr);
    out["churn_z"] = bundle.churn_z
                         ? json{{"z", bundle.churn_z->z}, {"p", bundle.churn_z->p}}
                         : json(nullptr);
    if (bundle.cross_pair) {
        out["cross_pair"] = json{{"n_shared", bundle.cross_pair->n_shared},
                                 {"pearson_r", bundle.cross_pair->pearson_r},
                                 {"p_value", bundle.cross_pair->p_value},
                                 {"normal_approximation", bundle.cross_pair->normal_approximation}};
    } else {
        out["cross_pair"] = nullptr;
    }
    if (bundle.greedy) {
        const auto& g = *bundle.greedy;
        json conf = json::array();
        for (const auto& row : g.confusion) conf.push_back(row);
        out["greedy"] = json{
            {"n_matched", g.n_matched},
            {"n_unmatched", g.n_unmatched},
            {"exact_agreement_rate", g.exact_agreement_rate},
            {"greedy_changed_rci_nochange_count", g.greedy_changed_rci_nochange_count},
            {"greedy_changed_rci_nochange_rate", g.greedy_changed_rci_nochange_rate},
            {"rci_changed_greedy_nochange_count", g.rci_changed_greedy_nochange_count},
            {"rci_changed_greedy_nochange_rate", g.rci_changed_greedy_nochange_rate},
            {"confusion", conf},
        };
    } else {
        out["greedy"] = nullptr;
    }
    return out;
}

namespace {

std::string pct1(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", rate * 100.0);
    return buf;
}

std::string f3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string pval(double p) {
    char buf[48];
    if (p < 1e-3) {
        std::snprintf(buf, sizeof(buf), "< .001 (%.3g)", p);
    } else {
        std::snprintf(buf, sizeof(buf), "%.3f", p);
    }
    return buf;
}

void render_pair_markdown(std::ostringstream& md, const json& pair, const json& config,
                          const std::string& heading) {
    md << "## " << heading << ": " << pair["model_v1"].get<std::string>() << " -> "
       << pair["model_v2"].get<std::string>() << "\n\n";

    md << "### Reliability\n\n";
    md << "| Model | r_xx | 95% CI | ICC | SD(p) | SEM | Items used |\n";
    md << "|---|---|---|---|---|---|---|\n";
    const json& m = pair["measurement"];
    for (int v = 1; v <= 2; ++v) {
        const json& r = pair[v == 1 ? "reliability_v1" : "reliability_v2"];
        md << "| " << r["model_id"].get<std::string>() << " | " << f3(r["r_xx"].get<double>())
           << " | [" << f3(r["ci_low"].get<double>()) << ", " << f3(r["ci_high"].get<double>())
           << "] | " << f3(r["icc"].get<double>()) << " | "
           << f3(m[v == 1 ? "sd_p_v1" : "sd_p_v2"].get<double>()) << " | "
           << f3(m[v == 1 ? "sem_v1" : "sem_v2"].get<double>()) << " | "
           << r["n_items_used"].get<int>() << " |\n";
    }
    md << "\nProphecy (" << pair["model_v1"].get<std::string>() << "): ";
    for (const auto& row : pair["prophecy_v1"]["table"]) {
        md << "k = " << row["k_needed"].get<int>() << " for r >= "
           << f3(row["target_r"].get<double>()) << "; ";
    }
    md << "\n\n### Measurement\n\n";
    md << "S_diff = " << f3(m["s_diff"].get<double>()) << ", minimum detectable delta = "
       << f3(m["min_detectable_delta"].get<double>()) << " (threshold "
       << m["alpha_threshold"].get<double>() << ").\n\n";

    const json& ch = pair["churn"];
    md << "### Classification\n\n";
    md << "Aggregate accuracy: " << pct1(pair["mean_acc_v1"].get<double>()) << " -> "
       << pct1(pair["mean_acc_v2"].get<double>()) << ".\n\n";
    md << "Items: " << ch["n_total"].get<std::size_t>() << " total, "
       << ch["n_excluded_insufficient"].get<std::size_t>() << " excluded (insufficient valid), "
       << ch["n_excluded_floorceiling"].get<std::size_t>() << " excluded (floor/ceiling), "
       << ch["n_analysable"].get<std::size_t>() << " analysable.\n\n";
    md << "| Denominator | Improved | No change | Deteriorated | Churn |\n";
    md << "|---|---|---|---|---|\n";
    md << "| Full benchmark (" << ch["n_total"].get<std::size_t>() << ") | "
       << pct1(ch["full_improved_rate"].get<double>()) << " | "
       << pct1(ch["full_nochange_rate"].get<double>()) << " | "
       << pct1(ch["full_deteriorated_rate"].get<double>()) << " | "
       << pct1(ch["churn_rate_full"].get<double>()) << " |\n";
    md << "| Post-exclusion (" << ch["n_analysable"].get<std::size_t>() << ") | "
       << pct1(ch["post_improved_rate"].get<double>()) << " | "
       << pct1(ch["post_nochange_rate"].get<double>()) << " | "
       << pct1(ch["post_deteriorated_rate"].get<double>()) << " | "
       << pct1(ch["churn_rate_post"].get<double>()) << " |\n\n";
    md << "Net surplus (improved - deteriorated): " << ch["net_surplus"].get<long long>()
       << ".\n\n";

    md << "### Effect sizes\n\n";
    const json& ea = ch["effect_analysable"];
    const json& ec = ch["effect_changed"];
    md << "Analysable items (n = " << ea["n"].get<std::size_t>() << "): mean |dp| = "
       << f3(ea["mean_abs_delta"].get<double>()) << ", median = "
       << f3(ea["median_abs_delta"].get<double>()) << ", "
       << pct1(ea["frac_abs_delta_ge_02"].get<double>()) << " with |dp| >= 0.2, "
       << pct1(ea["frac_abs_delta_ge_04"].get<double>()) << " with |dp| >= 0.4.\n\n";
    md << "Reliably changed items (n = " << ec["n"].get<std::size_t>() << "): mean |dp| = "
       << f3(ec["mean_abs_delta"].get<double>()) << ", median = "
       << f3(ec["median_abs_delta"].get<double>()) << ", "
       << pct1(ec["frac_abs_delta_ge_04"].get<double>()) << " with |dp| >= 0.4.\n\n";

    md << "### Churn by baseline difficulty\n\n";
    md << "| p_v1 bin | n | Improved | No change | Deteriorated | Churn |\n";
    md << "|---|---|---|---|---|---|\n";
    for (const auto& b : pair["difficulty_bins"]) {
        md << "| [" << b["lo"].get<double>() << ", " << b["hi"].get<double>() << "] | "
           << b["n"].get<std::size_t>() << " | " << b["n_improved"].get<std::size_t>() << " | "
           << b["n_nochange"].get<std::size_t>() << " | "
           << b["n_deteriorated"].get<std::size_t>() << " | "
           << pct1(b["churn_rate"].get<double>()) << " |\n";
    }
    md << "\n### Empirical null calibration\n\n";
    if (pair["null_calibration"].is_null()) {
        md << "Not computed (n_permutations = 0).\n\n";
    } else {
        const json& nc = pair["null_calibration"];
        md << nc["n_permutations"].get<int>() << " block-level version-label permutations (seed "
           << nc["seed"].get<std::uint64_t>() << ").\n\n";
        md << "- Improved: observed " << nc["observed_improved"].get<std::size_t>()
           << " vs null p95 " << nc["null_improved_p95"].get<std::size_t>() << " -> "
           << (nc["exceeds_improved"].get<bool>() ? "exceeds chance" : "within chance") << "\n";
        md << "- Deteriorated: observed " << nc["observed_deteriorated"].get<std::size_t>()
           << " vs null p95 " << nc["null_deteriorated_p95"].get<std::size_t>() << " -> "
           << (nc["exceeds_deteriorated"].get<bool>() ? "exceeds chance" : "within chance")
           << "\n\n";
    }

    md << "### Difficulty-stratified sensitivity\n\n";
    md << "| p_v1 bin | n | S_diff | Churn | Global churn (same items) |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& s : pair["strata"]) {
        md << "| [" << s["lo"].get<double>() << ", " << s["hi"].get<double>() << "] | "
           << s["n"].get<std::size_t>() << " | ";
        if (s["skipped"].get<bool>()) {
            md << "skipped | - | - |\n";
        } else {
            md << f3(s["measurement"]["s_diff"].get<double>()) << " | "
               << pct1(s["churn_rate"].get<double>()) << " | "
               << pct1(s["global_churn_rate"].get<double>()) << " |\n";
        }
    }

    md << "\n### Domain analysis\n\n";
    if (pair["contingency"].is_null()) {
        md << "Not computed (fewer than 2 domains, or a category with no items).\n\n";
    } else {
        const json& ct = pair["contingency"];
        md << "chi2 = " << f3(ct["chi2"].get<double>()) << ", df = " << ct["df"].get<int>()
           << ", p = " << pval(ct["p_value"].get<double>()) << ", Cramer's V = "
           << f3(ct["cramers_v"].get<double>()) << " (n = " << ct["n"].get<std::size_t>()
           << ").\n\n";
        md << "| Domain | Improved | No change | Deteriorated | Impr./Deter. ratio |\n";
        md << "|---|---|---|---|---|\n";
        for (const auto& row : ct["table"]) {
            md << "| " << row["domain"].get<std::string>() << " | "
               << row["n_improved"].get<std::size_t>() << " | "
               << row["n_nochange"].get<std::size_t>() << " | "
               << row["n_deteriorated"].get<std::size_t>() << " | ";
            if (row["improvement_deterioration_ratio"].is_null()) {
                md << "-";
            } else {
                md << f3(row["improvement_deterioration_ratio"].get<double>());
            }
            md << " |\n";
        }
        md << "\n";
    }
    (void)config;
}

}  // namespace

std::string render_markdown(const json& bundle) {
    std::ostringstream md;
    md << "# Reliable-change analysis report\n\n";
    const json& config = bundle["config"];
    md << "Configuration: K = " << config["k"].get<int>() << ", min_valid = "
       << config["min_valid"].get<int>() << ", threshold = " << config["threshold"].get<double>()
       << ", n_splits = " << config["n_splits"].get<int>() << ", n_permutations = "
       << config["n_permutations"].get<int>() << ", seed = "
       << config["seed"].get<std::uint64_t>() << ", SD convention = "
       << config["sd_convention"].get<std::string>() << ", floor/ceiling rule = "
       << config["floor_ceiling_rule"].get<std::string>() << ".\n\n";

    render_pair_markdown(md, bundle["pair"], config, "Pair A");
    if (!bundle["pair_b"].is_null()) {
        render_pair_markdown(md, bundle["pair_b"], config, "Pair B");
    }

    md << "## Cross-pair comparison\n\n";
    if (bundle["churn_z"].is_null()) {
        md << "Not computed (no second pair).\n\n";
    } else {
        const json& z = bundle["churn_z"];
        md << "Post-exclusion churn-rate difference: z = " << f3(z["z"].get<double>())
           << ", p = " << pval(z["p"].get<double>()) << ".\n\n";
        const json& cp = bundle["cross_pair"];
        md << "Item-level RCI correlation over shared analysable items: r = "
           << f3(cp["pearson_r"].get<double>()) << ", p = " << pval(cp["p_value"].get<double>())
           << " (n = " << cp["n_shared"].get<std::size_t>() << ").\n\n";
    }

    md << "## Greedy comparison\n\n";
    if (bundle["greedy"].is_null()) {
        md << "Not computed (no greedy files).\n\n";
    } else {
        const json& g = bundle["greedy"];
        md << "Matched items: " << g["n_matched"].get<std::size_t>() << " (unmatched "
           << g["n_unmatched"].get<std::size_t>() << "). Exact agreement: "
           << pct1(g["exact_agreement_rate"].get<double>()) << ".\n\n";
        md << "- Greedy-flagged changes with no reliable RCI change: "
           << g["greedy_changed_rci_nochange_count"].get<std::size_t>() << " ("
           << pct1(g["greedy_changed_rci_nochange_rate"].get<double>()) << " of greedy changes)\n";
        md << "- Reliable RCI changes missed by greedy: "
           << g["rci_changed_greedy_nochange_count"].get<std::size_t>() << " ("
           << pct1(g["rci_changed_greedy_nochange_rate"].get<double>()) << " of RCI changes)\n\n";
        md << "| greedy \\\\ RCI | improved | no change | deteriorated |\n";
        md << "|---|---|---|---|\n";
        const char* names[3] = {"improved", "no change", "deteriorated"};
        const json& conf = g["confusion"];
        for (int i = 0; i < 3; ++i) {
            md << "| " << names[i] << " | " << conf[i][0].get<std::size_t>() << " | "
               << conf[i][1].get<std::size_t>() << " | " << conf[i][2].get<std::size_t>()
               << " |\n";
        }
        md << "\n";
    }
    return md.str();
}

std::string classifications_csv(const json& bundle) {
    std::ostringstream out;
    out << "item_id,domain,p_v1,p_v2,delta_p,rci,category,exclusion_reason\n";
    for (const auto& c : bundle["pair"]["classifications"]) {
        const std::string cat = c["category"].get<std::string>();
        const bool excluded = cat.rfind("excluded", 0) == 0;
        out << c["item_id"].get<std::string>() << ',' << c["domain"].get<std::string>() << ',';
        if (c["p_v1"].is_null()) {
            out << ',';
        } else {
            out << c["p_v1"].get<double>() << ',';
        }
        if (c["p_v2"].is_null()) {
            out << ',';
        } else {
            out << c["p_v2"].get<double>() << ',';
        }
        if (excluded) {
            out << ",," << "excluded," << cat << '\n';
        } else {
            out << c["delta_p"].get<double>() << ',' << c["rci"].get<double>() << ',' << cat
                << ",\n";
        }
    }
    return out.str();
}

std::string bins_csv(const json& bundle) {
    std::ostringstream out;
    out << "lo,hi,n,n_improved,n_nochange,n_deteriorated,churn_rate\n";
    for (const auto& b : bundle["pair"]["difficulty_bins"]) {
        out << b["lo"].get<double>() << ',' << b["hi"].get<double>() << ','
            << b["n"].get<std::size_t>() << ',' << b["n_improved"].get<std::size_t>() << ','
            << b["n_nochange"].get<std::size_t>() << ','
            << b["n_deteriorated"].get<std::size_t>() << ',' << b["churn_rate"].get<double>()
            << '\n';
    }
    return out.str();
}

std::string contingency_csv(const json& bundle) {
    std::ostringstream out;
    out << "domain,n_improved,n_nochange,n_deteriorated\n";
    if (bundle["pair"]["contingency"].is_null()) return out.str();
    for (const auto& row : bundle["pair"]["contingency"]["table"]) {
        out << row["domain"].get<std::string>() << ',' << row["n_improved"].get<std::size_t>()
            << ',' << row["n_nochange"].get<std::size_t>() << ','
            << row["n_deteriorated"].get<std::size_t>() << '\n';
    }
    return out.str();
}

std::string null_samples_csv(const json& bundle) {
    std::ostringstream out;
    out << "permutation,n_improved,n_deteriorated\n";
    const json& nc = bundle["pair"]["null_calibration"];
    if (nc.is_null() || !nc.contains("null_improved_samples")) return out.str();
    const auto& imp = nc["null_improved_samples"];
    const auto& det = nc["null_deteriorated_samples"];
    for (std::size_t i = 0; i < imp.size(); ++i) {
        out << i << ',' << imp[i].get<std::size_t>() << ',' << det[i].get<std::size_t>() << '\n';
    }
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

}  // namespace

void write_outputs(const json& bundle, const std::string& out_dir, bool emit_plots,
                   bool emit_csv) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

    write_file(fs::path(out_dir) / "bundle.json", bundle.dump(2) + "\n");
    write_file(fs::path(out_dir) / "report.md", render_markdown(bundle));
    if (emit_csv) {
        write_file(fs::path(out_dir) / "classifications.csv", classifications_csv(bundle));
        write_file(fs::path(out_dir) / "bins.csv", bins_csv(bundle));
        write_file(fs::path(out_dir) / "contingency.csv", contingency_csv(bundle));
        const auto nulls = null_samples_csv(bundle);
        if (nulls.find('\n') != nulls.size() - 1) {
            write_file(fs::path(out_dir) / "null_samples.csv", nulls);
        }
    }
    if (emit_plots) {
        const fs::path plot_dir = fs::path(out_dir) / "plots";
        fs::create_directories(plot_dir, ec);
        if (ec) throw IoError("cannot create plot directory: " + ec.message());
        struct PlotSpec {
            const char* name;
            std::string (*fn)(const json&);
        };
        const PlotSpec specs[] = {
            {"rci_histogram.svg", plots::rci_histogram_svg},
            {"churn_by_difficulty.svg", plots::difficulty_bins_svg},
            {"domain_heatmap.svg", plots::domain_heatmap_svg},
            {"scatter_v1_v2.svg", plots::scatter_svg},
        };
        for (const auto& spec : specs) {
            const auto svg = spec.fn(bundle["pair"]);
            if (svg.empty()) continue;  // skipped with notice at the CLI layer
            write_file(plot_dir / spec.name, svg);
        }
    }
}

}  // namespace rcb
