#ifndef NAMLITE_SVG_HPP
#define NAMLITE_SVG_HPP

#include <string>
#include <string_view>

#include "namlite/config.hpp"

namespace namlite {

enum class PlotKind { kImportanceBars, kShapeLine, kShapeCategoryBars, kPairHeatmap, kCalibration };

std::string_view to_string(PlotKind kind);
PlotKind plot_kind_from_string(std::string_view text);  // ConfigError if unknown

struct SvgOptions {
  int top_n = 10;  // importance bars
  int width = 640;
  int height = 400;
};

// Standalone SVG 1.1 document for an export produced by exports.hpp. Error
// bars and bands span mean +/- 1.96 SE. ConfigError for an empty export or
// one whose kind does not fit the plot.
std::string render_svg(const Json& export_json, PlotKind kind, const SvgOptions& options = {});

// Plot kind suited to a shape export: line for continuous features, bars
// otherwise.
PlotKind default_shape_plot(const Json& shape_json);

}  // namespace namlite

#endif  // NAMLITE_SVG_HPP
