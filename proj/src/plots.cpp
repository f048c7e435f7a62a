#include "rcb/plots.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace rcb::plots {

using nlohmann::json;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 440.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 50.0;

const char* kColorImproved = "#2a9d4e";
const char* kColorNoChange = "#9a9a9a";
const char* kColorDeteriorated = "#d03a3a";

struct Frame {
    double x_min, x_max, y_min, y_max;

    double px(double x) const {
        return kMarginLeft + (x - x_min) / (x_max - x_min) * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kHeight - kMarginBottom -
               (y - y_min) / (y_max - y_min) * (kHeight - kMarginTop - kMarginBottom);
    }
};

std::string svg_open(const std::string& title) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
       << title << "</text>\n";
    return os.str();
}

void axis_labels(std::ostringstream& os, const Frame& f, const std::string& xlab,
                 const std::string& ylab) {
    os << "<line x1=\"" << f.px(f.x_min) << "\" y1=\"" << f.py(f.y_min) << "\" x2=\""
       << f.px(f.x_max) << "\" y2=\"" << f.py(f.y_min) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << f.px(f.x_min) << "\" y1=\"" << f.py(f.y_min) << "\" x2=\""
       << f.px(f.x_min) << "\" y2=\"" << f.py(f.y_max) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlab
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << kHeight / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
       << kHeight / 2 << ")\">" << ylab << "</text>\n";
}

const char* category_color(const std::string& cat) {
    if (cat == "improved") return kColorImproved;
    if (cat == "deteriorated") return kColorDeteriorated;
    return kColorNoChange;
}

}  // namespace

std::string rci_histogram_svg(const json& pair) {
    std::vector<double> values;
    for (const auto& c : pair["classifications"]) {
        const std::string cat = c["category"].get<std::string>();
        if (cat == "improved" || cat == "no_change" || cat == "deteriorated") {
            values.push_back(c["rci"].get<double>());
        }
    }
    if (values.empty()) return {};
    const double threshold = pair["measurement"]["alpha_threshold"].get<double>();

    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    lo = std::min(lo, -threshold) - 0.5;
    hi = std::max(hi, threshold) + 0.5;
    const int n_bins = 40;
    std::vector<int> counts(n_bins, 0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * n_bins);
        b = std::clamp(b, 0, n_bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    const int max_count = *std::max_element(counts.begin(), counts.end());

    Frame f{lo, hi, 0.0, static_cast<double>(max_count) * 1.05};
    std::ostringstream os;
    os << svg_open("RCI value distribution (analysable items)");
    for (int b = 0; b < n_bins; ++b) {
        const double x0 = lo + (hi - lo) * b / n_bins;
        const double x1 = lo + (hi - lo) * (b + 1) / n_bins;
        const double c = counts[static_cast<std::size_t>(b)];
        if (c == 0) continue;
        os << "<rect class=\"bar\" x=\"" << f.px(x0) << "\" y=\"" << f.py(c) << "\" width=\""
           << f.px(x1) - f.px(x0) << "\" height=\"" << f.py(0) - f.py(c)
           << "\" fill=\"#5b7fb5\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
    for (double t : {-threshold, threshold}) {
        os << "<line class=\"threshold\" x1=\"" << f.px(t) << "\" y1=\"" << f.py(f.y_min)
           << "\" x2=\"" << f.px(t) << "\" y2=\"" << f.py(f.y_max)
           << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    }
    axis_labels(os, f, "RCI", "items");
    os << "</svg>\n";
    return os.str();
}

std::string difficulty_bins_svg(const json& pair) {
    const auto& bins = pair["difficulty_bins"];
    if (bins.empty()) return {};
    std::size_t max_n = 0;
    for (const auto& b : bins) max_n = std::max(max_n, b["n"].get<std::size_t>());
    if (max_n == 0) return {};

    Frame f{0.0, static_cast<double>(bins.size()), 0.0, static_cast<double>(max_n) * 1.05};
    std::ostringstream os;
    os << svg_open("Churn by baseline difficulty (p in v1)");
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto& b = bins[i];
        const double x0 = static_cast<double>(i) + 0.12;
        const double x1 = static_cast<double>(i) + 0.88;
        double y = 0.0;
        struct Part {
            const char* cls;
            const char* color;
            std::size_t n;
        };
        const Part parts[] = {
            {"improved", kColorImproved, b["n_improved"].get<std::size_t>()},
            {"nochange", kColorNoChange, b["n_nochange"].get<std::size_t>()},
            {"deteriorated", kColorDeteriorated, b["n_deteriorated"].get<std::size_t>()},
        };
        for (const auto& part : parts) {
            if (part.n == 0) continue;
            os << "<rect class=\"seg " << part.cls << "\" x=\"" << f.px(x0) << "\" y=\""
               << f.py(y + static_cast<double>(part.n)) << "\" width=\"" << f.px(x1) - f.px(x0)
               << "\" height=\"" << f.py(y) - f.py(y + static_cast<double>(part.n)) << "\" fill=\""
               << part.color << "\"/>\n";
            y += static_cast<double>(part.n);
        }
        os << "<text x=\"" << f.px((x0 + x1) / 2) << "\" y=\"" << kHeight - kMarginBottom + 16
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
           << b["lo"].get<double>() << "-" << b["hi"].get<double>() << "</text>\n";
    }
    axis_labels(os, f, "baseline accuracy bin", "items");
    os << "</svg>\n";
    return os.str();
}

std::string domain_heatmap_svg(const json& pair) {
    if (pair["contingency"].is_null()) return {};
    const auto& table = pair["contingency"]["table"];
    if (table.empty()) return {};
    std::size_t max_cell = 1;
    for (const auto& row : table) {
        max_cell = std::max({max_cell, row["n_improved"].get<std::size_t>(),
                             row["n_nochange"].get<std::size_t>(),
                             row["n_deteriorated"].get<std::size_t>()});
    }

    const double cell_w = (kWidth - kMarginLeft - kMarginRight) / 3.0;
    const double cell_h = (kHeight - kMarginTop - kMarginBottom) / static_cast<double>(table.size());
    std::ostringstream os;
    os << svg_open("Domain x RCI category");
    const char* cols[3] = {"n_improved", "n_nochange", "n_deteriorated"};
    const char* col_names[3] = {"improved", "no change", "deteriorated"};
    for (std::size_t r = 0; r < table.size(); ++r) {
        const auto& row = table[r];
        for (int ccol = 0; ccol < 3; ++ccol) {
            const std::size_t n = row[cols[ccol]].get<std::size_t>();
            const double shade = 1.0 - 0.85 * static_cast<double>(n) / static_cast<double>(max_cell);
            const int grey = static_cast<int>(std::lround(shade * 255.0));
            const double x = kMarginLeft + ccol * cell_w;
            const double y = kMarginTop + static_cast<double>(r) * cell_h;
            os << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w
               << "\" height=\"" << cell_h << "\" fill=\"rgb(" << grey << "," << grey << ","
               << grey << ")\" stroke=\"white\"/>\n";
            const char* text_color = shade < 0.5 ? "white" : "black";
            os << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
               << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
               << text_color << "\">" << n << "</text>\n";
        }
        os << "<text x=\"" << kMarginLeft - 6 << "\" y=\""
           << kMarginTop + static_cast<double>(r) * cell_h + cell_h / 2 + 4
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << row["domain"].get<std::string>() << "</text>\n";
    }
    for (int ccol = 0; ccol < 3; ++ccol) {
        os << "<text x=\"" << kMarginLeft + ccol * cell_w + cell_w / 2 << "\" y=\""
           << kHeight - kMarginBottom + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << col_names[ccol] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string scatter_svg(const json& pair) {
    bool any = false;
    for (const auto& c : pair["classifications"]) {
        const std::string cat = c["category"].get<std::string>();
        if (cat == "improved" || cat == "no_change" || cat == "deteriorated") {
            any = true;
            break;
        }
    }
    if (!any) return {};
    const double band = pair["measurement"]["min_detectable_delta"].get<double>();

    Frame f{-0.02, 1.02, -0.02, 1.02};
    std::ostringstream os;
    os << svg_open("Per-item accuracy: v1 vs v2");
    // identity diagonal
    os << "<line class=\"diagonal\" x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\""
       << f.px(1) << "\" y2=\"" << f.py(1) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    // detection band at +/- min detectable delta around the diagonal
    for (double off : {band, -band}) {
        const double x0 = std::max(0.0, -off);
        const double x1 = std::min(1.0, 1.0 - off);
        if (x0 > x1) continue;
        os << "<line class=\"band\" x1=\"" << f.px(x0) << "\" y1=\"" << f.py(x0 + off)
           << "\" x2=\"" << f.px(x1) << "\" y2=\"" << f.py(x1 + off)
           << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
    }
    for (const auto& c : pair["classifications"]) {
        const std::string cat = c["category"].get<std::string>();
        if (cat != "improved" && cat != "no_change" && cat != "deteriorated") continue;
        os << "<circle class=\"pt " << cat << "\" cx=\"" << f.px(c["p_v1"].get<double>())
           << "\" cy=\"" << f.py(c["p_v2"].get<double>()) << "\" r=\"3.2\" fill=\""
           << category_color(cat) << "\" fill-opacity=\"0.7\"/>\n";
    }
    axis_labels(os, f, "p in v1", "p in v2");
    os << "</svg>\n";
    return os.str();
}

}  // namespace rcb::plots
