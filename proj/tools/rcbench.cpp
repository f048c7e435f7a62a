// rcbench: reliable-change decomposition of benchmark score differences.
//
// Subcommands:
//   validate  check a trial-file pair for structural faults
//   analyze   run the full pipeline and write report + bundle + plots
//   simulate  generate a synthetic trial pair from a spec file
//   report    re-render report/CSV/plots from a saved bundle.json

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcb/analysis.hpp"
#include "rcb/core_model.hpp"
#include "rcb/errors.hpp"
#include "rcb/report.hpp"
#include "rcb/synth.hpp"

namespace {

using rcb::RunConfig;

std::vector<double> parse_edges(const std::string& s) {
    std::vector<double> edges;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) edges.push_back(std::stod(tok));
    return edges;
}

// Declarative key=value config file; '#' starts a comment.
void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw rcb::IoError("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos) {
            throw rcb::ValidationError(path + " line " + std::to_string(line_no) +
                                       ": expected key=value");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "trials_v1") cfg.trials_v1_path = value;
        else if (key == "trials_v2") cfg.trials_v2_path = value;
        else if (key == "greedy_v1") cfg.greedy_v1_path = value;
        else if (key == "greedy_v2") cfg.greedy_v2_path = value;
        else if (key == "pair_b_v1") cfg.pair_b_v1_path = value;
        else if (key == "pair_b_v2") cfg.pair_b_v2_path = value;
        else if (key == "k") cfg.k = std::stoi(value);
        else if (key == "min_valid") cfg.min_valid = std::stoi(value);
        else if (key == "threshold") cfg.threshold = std::stod(value);
        else if (key == "n_splits") cfg.n_splits = std::stoi(value);
        else if (key == "n_permutations") cfg.n_permutations = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "bin_edges") cfg.bin_edges = parse_edges(value);
        else if (key == "sd_convention")
            cfg.sd_convention = value == "sample" ? rcb::SdConvention::sample
                                                  : rcb::SdConvention::population;
        else if (key == "floor_ceiling_rule")
            cfg.floor_ceiling = value == "both_extreme" ? rcb::FloorCeilingRule::both_extreme
                                                        : rcb::FloorCeilingRule::same_extreme;
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "emit_plots") cfg.emit_plots = value == "true" || value == "1";
        else if (key == "emit_csv") cfg.emit_csv = value == "true" || value == "1";
        else if (key == "store_null_samples")
            cfg.store_null_samples = value == "true" || value == "1";
        else
            throw rcb::ValidationError(path + " line " + std::to_string(line_no) +
                                       ": unknown key '" + key + "'");
    }
}

struct CommonOpts {
    std::string config_path;
    RunConfig flags;  // flag values; applied over the file when counted
    CLI::Option* opt_v1 = nullptr;
    CLI::Option* opt_v2 = nullptr;
    CLI::Option* opt_greedy_v1 = nullptr;
    CLI::Option* opt_greedy_v2 = nullptr;
    CLI::Option* opt_pair_b_v1 = nullptr;
    CLI::Option* opt_pair_b_v2 = nullptr;
    CLI::Option* opt_k = nullptr;
    CLI::Option* opt_min_valid = nullptr;
    CLI::Option* opt_threshold = nullptr;
    CLI::Option* opt_splits = nullptr;
    CLI::Option* opt_perms = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_edges = nullptr;
    CLI::Option* opt_sd = nullptr;
    CLI::Option* opt_fc = nullptr;
    CLI::Option* opt_out = nullptr;
    CLI::Option* opt_no_plots = nullptr;
    CLI::Option* opt_no_csv = nullptr;
    CLI::Option* opt_null_samples = nullptr;
    std::string edges_str;
    std::string sd_str;
    std::string fc_str;
    bool no_plots = false;
    bool no_csv = false;
    bool null_samples = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "key=value config file");
    o.opt_v1 = cmd->add_option("--v1", o.flags.trials_v1_path, "trial file for version 1");
    o.opt_v2 = cmd->add_option("--v2", o.flags.trials_v2_path, "trial file for version 2");
    o.opt_greedy_v1 = cmd->add_option("--greedy-v1", o.flags.greedy_v1_path, "greedy run, v1");
    o.opt_greedy_v2 = cmd->add_option("--greedy-v2", o.flags.greedy_v2_path, "greedy run, v2");
    o.opt_pair_b_v1 = cmd->add_option("--pair-b-v1", o.flags.pair_b_v1_path,
                                      "second pair trial file, v1");
    o.opt_pair_b_v2 = cmd->add_option("--pair-b-v2", o.flags.pair_b_v2_path,
                                      "second pair trial file, v2");
    o.opt_k = cmd->add_option("--k", o.flags.k, "samples per item");
    o.opt_min_valid = cmd->add_option("--min-valid", o.flags.min_valid,
                                      "minimum valid samples per model");
    o.opt_threshold = cmd->add_option("--threshold", o.flags.threshold, "RCI threshold");
    o.opt_splits = cmd->add_option("--n-splits", o.flags.n_splits, "split-half resamples");
    o.opt_perms = cmd->add_option("--n-permutations", o.flags.n_permutations,
                                  "null permutations (0 disables)");
    o.opt_seed = cmd->add_option("--seed", o.flags.seed, "master seed");
    o.opt_edges = cmd->add_option("--bin-edges", o.edges_str, "difficulty bin edges, e.g. 0,0.2,...,1");
    o.opt_sd = cmd->add_option("--sd-convention", o.sd_str, "population|sample");
    o.opt_fc = cmd->add_option("--floor-ceiling-rule", o.fc_str, "same_extreme|both_extreme");
    o.opt_out = cmd->add_option("--out", o.flags.output_dir, "output directory");
    o.opt_no_plots = cmd->add_flag("--no-plots", o.no_plots, "skip SVG plots");
    o.opt_no_csv = cmd->add_flag("--no-csv", o.no_csv, "skip CSV exports");
    o.opt_null_samples = cmd->add_flag("--store-null-samples", o.null_samples,
                                       "keep raw per-permutation counts");
}

RunConfig resolve_config(const CommonOpts& o) {
    RunConfig cfg;
    if (const char* env = std::getenv("RCBENCH_OUT_DIR")) cfg.output_dir = env;
    if (!o.config_path.empty()) load_config_file(o.config_path, cfg);
    // Flags win over the file.
    if (o.opt_v1->count()) cfg.trials_v1_path = o.flags.trials_v1_path;
    if (o.opt_v2->count()) cfg.trials_v2_path = o.flags.trials_v2_path;
    if (o.opt_greedy_v1->count()) cfg.greedy_v1_path = o.flags.greedy_v1_path;
    if (o.opt_greedy_v2->count()) cfg.greedy_v2_path = o.flags.greedy_v2_path;
    if (o.opt_pair_b_v1->count()) cfg.pair_b_v1_path = o.flags.pair_b_v1_path;
    if (o.opt_pair_b_v2->count()) cfg.pair_b_v2_path = o.flags.pair_b_v2_path;
    if (o.opt_k->count()) cfg.k = o.flags.k;
    if (o.opt_min_valid->count()) cfg.min_valid = o.flags.min_valid;
    if (o.opt_threshold->count()) cfg.threshold = o.flags.threshold;
    if (o.opt_splits->count()) cfg.n_splits = o.flags.n_splits;
    if (o.opt_perms->count()) cfg.n_permutations = o.flags.n_permutations;
    if (o.opt_seed->count()) cfg.seed = o.flags.seed;
    if (o.opt_edges->count()) cfg.bin_edges = parse_edges(o.edges_str);
    if (o.opt_sd->count())
        cfg.sd_convention = o.sd_str == "sample" ? rcb::SdConvention::sample
                                                 : rcb::SdConvention::population;
    if (o.opt_fc->count())
        cfg.floor_ceiling = o.fc_str == "both_extreme" ? rcb::FloorCeilingRule::both_extreme
                                                       : rcb::FloorCeilingRule::same_extreme;
    if (o.opt_out->count()) cfg.output_dir = o.flags.output_dir;
    if (o.opt_no_plots->count()) cfg.emit_plots = false;
    if (o.opt_no_csv->count()) cfg.emit_csv = false;
    if (o.opt_null_samples->count()) cfg.store_null_samples = true;

    if (cfg.trials_v1_path.empty() || cfg.trials_v2_path.empty()) {
        throw rcb::ValidationError("both --v1 and --v2 trial files are required");
    }
    if (!cfg.pair_b_v1_path.empty() != !cfg.pair_b_v2_path.empty()) {
        throw rcb::ValidationError("second pair needs both --pair-b-v1 and --pair-b-v2");
    }
    if (!cfg.greedy_v1_path.empty() != !cfg.greedy_v2_path.empty()) {
        throw rcb::ValidationError("greedy comparison needs both --greedy-v1 and --greedy-v2");
    }
    return cfg;
}

int cmd_validate(const CommonOpts& o) {
    const RunConfig cfg = resolve_config(o);
    const auto t1 = rcb::parse_trials_file(cfg.trials_v1_path, cfg.k);
    const auto t2 = rcb::parse_trials_file(cfg.trials_v2_path, cfg.k);
    rcb::require_matched_items(t1, t2);
    for (const auto* t : {&t1, &t2}) {
        const auto rep = rcb::validate_trials(*t, cfg.min_valid);
        std::cout << t->model_id << ": " << rep.n_items << " items, " << rep.n_trials
                  << " trial slots, " << rep.n_invalid << " invalid/missing, "
                  << rep.items_below_min_valid.size() << " items below min_valid="
                  << cfg.min_valid << "\n";
    }
    std::cout << "validation OK\n";
    return 0;
}

int cmd_analyze(const CommonOpts& o) {
    const RunConfig cfg = resolve_config(o);
    const auto bundle = rcb::run_analysis(cfg);
    const auto j = rcb::bundle_to_json(bundle);
    rcb::write_outputs(j, cfg.output_dir, cfg.emit_plots, cfg.emit_csv);
    if (cfg.n_permutations == 0) {
        std::cout << "notice: empirical null section not computed (n_permutations = 0)\n";
    }
    std::cout << "wrote " << cfg.output_dir << "/report.md and bundle.json\n";
    return 0;
}

int cmd_simulate(const std::string& spec_path, const std::string& out_dir) {
    const auto spec = rcb::parse_synth_spec_file(spec_path);
    const auto result = rcb::generate_pair(spec);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw rcb::IoError("cannot create " + out_dir + ": " + ec.message());
    auto write = [&](const rcb::TrialSet& t, const std::string& name) {
        std::ofstream out(fs::path(out_dir) / name);
        if (!out) throw rcb::IoError("cannot write " + name);
        rcb::write_trials_jsonl(t, out);
    };
    write(result.trials_v1, "trials_v1.jsonl");
    write(result.trials_v2, "trials_v2.jsonl");
    rcb::write_ground_truth_json(result.truth, (fs::path(out_dir) / "ground_truth.json").string());
    std::cout << "wrote " << out_dir << "/trials_v{1,2}.jsonl and ground_truth.json\n";
    return 0;
}

int cmd_report(const std::string& bundle_path, const std::string& out_dir, bool no_plots,
               bool no_csv) {
    std::ifstream in(bundle_path);
    if (!in) throw rcb::IoError("cannot open bundle: " + bundle_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw rcb::ValidationError(bundle_path + ": " + std::string(e.what()));
    }
    rcb::write_outputs(j, out_dir, !no_plots, !no_csv);
    std::cout << "re-rendered " << out_dir << " from " << bundle_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Item-level reliable-change decomposition of benchmark score differences"};
    app.require_subcommand(1);

    CommonOpts validate_opts, analyze_opts;
    auto* validate = app.add_subcommand("validate", "validate a trial-file pair");
    add_common(validate, validate_opts);
    auto* analyze = app.add_subcommand("analyze", "run the full analysis pipeline");
    add_common(analyze, analyze_opts);

    std::string spec_path, sim_out = "sim_out";
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic trial pair");
    simulate->add_option("spec", spec_path, "synthetic spec JSON")->required();
    simulate->add_option("--out", sim_out, "output directory");

    std::string bundle_path, report_out = "out";
    bool report_no_plots = false, report_no_csv = false;
    auto* report = app.add_subcommand("report", "re-render from a bundle.json");
    report->add_option("bundle", bundle_path, "bundle.json path")->required();
    report->add_option("--out", report_out, "output directory");
    report->add_flag("--no-plots", report_no_plots, "skip SVG plots");
    report->add_flag("--no-csv", report_no_csv, "skip CSV exports");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_opts);
        if (analyze->parsed()) return cmd_analyze(analyze_opts);
        if (simulate->parsed()) return cmd_simulate(spec_path, sim_out);
        if (report->parsed()) return cmd_report(bundle_path, report_out, report_no_plots,
                                                report_no_csv);
    } catch (const rcb::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const rcb::AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 2;
    } catch (const rcb::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
