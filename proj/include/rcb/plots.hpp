#pragma once

#include <string>

#include <json.hpp>

namespace rcb::plots {

// All plots are static SVG rendered from the pair section of the JSON
// bundle. Each returns an empty string when the relevant data is empty, and
// the caller skips the file with a notice.
std::string rci_histogram_svg(const nlohmann::json& pair);
std::string difficulty_bins_svg(const nlohmann::json& pair);
std::string domain_heatmap_svg(const nlohmann::json& pair);
std::string scatter_svg(const nlohmann::json& pair);

}  // namespace rcb::plots
