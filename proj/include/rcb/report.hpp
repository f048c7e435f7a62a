#pragma once

#include <string>

#include <json.hpp>

#include "rcb/analysis.hpp"

namespace rcb {

// The machine-readable bundle is the single source of truth: markdown, CSV
// and SVG are all rendered from the JSON document, never from the structs,
// so `report` can re-render from a saved bundle.json.
nlohmann::json bundle_to_json(const AnalysisBundle& bundle);

std::string render_markdown(const nlohmann::json& bundle);

std::string classifications_csv(const nlohmann::json& bundle);
std::string bins_csv(const nlohmann::json& bundle);
std::string contingency_csv(const nlohmann::json& bundle);
std::string null_samples_csv(const nlohmann::json& bundle);

// Writes report.md, bundle.json, the CSV exports and plots/*.svg under
// out_dir (created if missing).
void write_outputs(const nlohmann::json& bundle, const std::string& out_dir, bool emit_plots,
                   bool emit_csv);

}  // namespace rcb
