#include "namlite/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "namlite/error.hpp"

namespace namlite {
namespace {

constexpr double kZ = 1.96;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  std::string s = buffer;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string tick_text(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buffer;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double margin = 0.05 * (hi - lo);
    lo -= margin;
    hi += margin;
  }
};

Range empty_range() { return {1e300, -1e300}; }

class Canvas {
 public:
  Canvas(int width, int height, double left, double right, double top, double bottom)
      : width_(width), height_(height), left_(left), right_(width - right), top_(top),
        bottom_(height - bottom) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
         << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
         << "\" fill=\"white\"/>\n";
  }

  double px(double x) const { return left_ + (x - xr.lo) / (xr.hi - xr.lo) * (right_ - left_); }
  double py(double y) const { return bottom_ - (y - yr.lo) / (yr.hi - yr.lo) * (bottom_ - top_); }
  double left() const { return left_; }
  double right() const { return right_; }
  double top() const { return top_; }
  double bottom() const { return bottom_; }

  void raw(const std::string& s) { out_ << s; }
  void line(double x1, double y1, double x2, double y2, const char* cls, const char* stroke,
            double width = 1.0) {
    out_ << "<line class=\"" << cls << "\" x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
         << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
         << fmt(width) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* cls, const std::string& fill) {
    out_ << "<rect class=\"" << cls << "\" x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
         << fmt(std::max(w, 0.0)) << "\" height=\"" << fmt(std::max(h, 0.0)) << "\" fill=\"" << fill
         << "\"/>\n";
  }
  void circle(double x, double y, double r, const char* cls, const char* fill) {
    out_ << "<circle class=\"" << cls << "\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\""
         << fmt(r) << "\" fill=\"" << fill << "\"/>\n";
  }
  void text(double x, double y, std::string_view s, const char* anchor = "middle", int size = 11,
            double rotate = 0.0) {
    out_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"sans-serif\" font-size=\""
         << size << "\" text-anchor=\"" << anchor << "\"";
    if (rotate != 0.0) out_ << " transform=\"rotate(" << fmt(rotate) << " " << fmt(x) << " " << fmt(y) << ")\"";
    out_ << ">" << escape(s) << "</text>\n";
  }
  void title(std::string_view s) { text(width_ / 2.0, 20.0, s, "middle", 14); }

  void x_axis(std::string_view label) {
    line(left_, bottom_, right_, bottom_, "axis", "black");
    for (int i = 0; i <= 4; ++i) {
      const double v = xr.lo + (xr.hi - xr.lo) * i / 4.0;
      line(px(v), bottom_, px(v), bottom_ + 4, "tick", "black");
      text(px(v), bottom_ + 16, tick_text(v));
    }
    text((left_ + right_) / 2.0, height_ - 6.0, label);
  }
  void y_axis(std::string_view label) {
    line(left_, top_, left_, bottom_, "axis", "black");
    for (int i = 0; i <= 4; ++i) {
      const double v = yr.lo + (yr.hi - yr.lo) * i / 4.0;
      line(left_ - 4, py(v), left_, py(v), "tick", "black");
      text(left_ - 6, py(v) + 4, tick_text(v), "end");
    }
    text(14.0, (top_ + bottom_) / 2.0, label, "middle", 11, -90.0);
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

  Range xr;
  Range yr;

 private:
  std::ostringstream out_;
  int width_;
  int height_;
  double left_;
  double right_;
  double top_;
  double bottom_;
};

void require(const Json& j, const char* kind) {
  if (!j.is_object() || !j.contains("kind") || j["kind"] != kind) {
    throw ConfigError(std::string("export is not a ") + kind + " export");
  }
}

std::string time_suffix(const Json& block) {
  if (!block.contains("time") || block["time"].is_null()) return "";
  return " (t = " + tick_text(block["time"].get<double>()) + ")";
}

std::string importance_bars(const Json& j, const SvgOptions& options) {
  require(j, "importance");
  const auto& entries = j.at("entries");
  if (entries.empty()) throw ConfigError("empty export");
  const std::size_t n = std::min<std::size_t>(entries.size(), static_cast<std::size_t>(std::max(options.top_n, 1)));
  const bool stratify = j.at("metadata").value("mode", "") == "stratify";
  Canvas c(options.width, options.height, 150, 30, 40, 40);
  c.xr = {0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = entries[i];
    c.xr.include(e.at("score").get<double>() + kZ * e.at("se").get<double>());
    if (stratify) c.xr.include(e.at("missing_score").get<double>() + kZ * e.at("missing_se").get<double>());
  }
  if (c.xr.hi <= 0.0) c.xr.hi = 1.0;
  c.xr.hi *= 1.05;
  c.title("Feature importance (" + j.at("metadata").value("mode", std::string("include")) + ")");
  const double row = (c.bottom() - c.top()) / static_cast<double>(n);
  const double bar = stratify ? row * 0.35 : row * 0.7;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = entries[i];
    std::string name = e.at("feature").get<std::string>();
    if (e.contains("feature_b")) name += " x " + e.at("feature_b").get<std::string>();
    const double y0 = c.top() + row * static_cast<double>(i) + row * 0.15;
    const double score = e.at("score").get<double>();
    const double se = e.at("se").get<double>();
    c.rect(c.px(0), y0, c.px(score) - c.px(0), bar, "bar", "#1f77b4");
    c.line(c.px(std::max(score - kZ * se, 0.0)), y0 + bar / 2, c.px(score + kZ * se), y0 + bar / 2,
           "errorbar", "black");
    if (stratify) {
      const double ms = e.at("missing_score").get<double>();
      const double mse = e.at("missing_se").get<double>();
      c.rect(c.px(0), y0 + bar, c.px(ms) - c.px(0), bar, "bar-missing", "#ff7f0e");
      c.line(c.px(std::max(ms - kZ * mse, 0.0)), y0 + 1.5 * bar, c.px(ms + kZ * mse), y0 + 1.5 * bar,
             "errorbar", "black");
    }
    c.text(c.left() - 6, y0 + (stratify ? bar : bar / 2) + 4, name, "end");
  }
  c.x_axis(stratify ? "score (blue: observed, orange: missing bin)" : "mean |centered shape|");
  c.line(c.left(), c.top(), c.left(), c.bottom(), "axis", "black");
  return c.finish();
}

std::string shape_line(const Json& j, const SvgOptions& options) {
  require(j, "shape");
  if (j.at("feature_kind") != "continuous") throw ConfigError("shape-line needs a continuous feature");
  const auto& blocks = j.at("blocks");
  if (blocks.empty() || blocks[0].at("bins").empty()) throw ConfigError("empty export");
  const bool has_missing = j.at("include_missing").get<bool>();
  Canvas c(options.width, options.height, 60, has_missing ? 80 : 30, 40, 40);
  c.xr = empty_range();
  c.yr = empty_range();
  for (const auto& block : blocks) {
    for (const auto& b : block.at("bins")) {
      const double m = b.at("mean").get<double>();
      const double se = b.at("se").get<double>();
      c.yr.include(m - kZ * se);
      c.yr.include(m + kZ * se);
      if (b.contains("lower")) {
        c.xr.include(b.at("lower").get<double>());
        c.xr.include(b.at("upper").get<double>());
      }
    }
  }
  if (c.xr.lo > c.xr.hi) c.xr = {0.0, 1.0};
  if (c.xr.hi - c.xr.lo < 1e-12) c.xr = {c.xr.lo - 0.5, c.xr.hi + 0.5};
  c.yr.pad();
  c.title("Shape function: " + j.at("feature").get<std::string>());
  if (c.yr.lo < 0.0 && c.yr.hi > 0.0) c.line(c.left(), c.py(0), c.right(), c.py(0), "zero", "#999999");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const char* color = kPalette[k % 6];
    std::string band_upper;
    std::string band_lower;
    std::string path;
    for (const auto& b : blocks[k].at("bins")) {
      if (!b.contains("lower")) continue;
      const double x0 = c.px(b.at("lower").get<double>());
      const double x1 = c.px(b.at("upper").get<double>());
      const double m = b.at("mean").get<double>();
      const double se = b.at("se").get<double>();
      path += (path.empty() ? "M" : " L") + fmt(x0) + " " + fmt(c.py(m)) + " L" + fmt(x1) + " " + fmt(c.py(m));
      band_upper += (band_upper.empty() ? "" : " ") + fmt(x0) + "," + fmt(c.py(m + kZ * se)) + " " + fmt(x1) +
                    "," + fmt(c.py(m + kZ * se));
      band_lower = fmt(x1) + "," + fmt(c.py(m - kZ * se)) + " " + fmt(x0) + "," + fmt(c.py(m - kZ * se)) +
                   (band_lower.empty() ? "" : " ") + band_lower;
    }
    c.raw("<polygon class=\"band\" points=\"" + band_upper + " " + band_lower + "\" fill=\"" + color +
          "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n");
    c.raw("<path class=\"shape\" d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
          "\" stroke-width=\"2.00\"/>\n");
    if (blocks.size() > 1) {
      c.text(c.right() - 4, c.top() + 14.0 * static_cast<double>(k + 1), time_suffix(blocks[k]), "end");
    }
    for (const auto& b : blocks[k].at("bins")) {
      if (b.at("index").get<int>() != 0) continue;
      const double m = b.at("mean").get<double>();
      const double se = b.at("se").get<double>();
      const double x = c.right() + 40.0;
      c.line(x, c.py(m - kZ * se), x, c.py(m + kZ * se), "errorbar", color);
      c.circle(x, c.py(m), 4.0, "missing", color);
      c.text(x, c.bottom() + 16, "missing");
    }
  }
  c.x_axis(j.at("feature").get<std::string>());
  c.y_axis("contribution");
  return c.finish();
}

std::string shape_category_bars(const Json& j, const SvgOptions& options) {
  require(j, "shape");
  const auto& blocks = j.at("blocks");
  if (blocks.empty() || blocks[0].at("bins").empty()) throw ConfigError("empty export");
  const auto& bins = blocks[0].at("bins");
  Canvas c(options.width, options.height, 60, 30, 40, 60);
  c.yr = {0.0, 0.0};
  for (const auto& b : bins) {
    const double m = b.at("mean").get<double>();
    const double se = b.at("se").get<double>();
    c.yr.include(m - kZ * se);
    c.yr.include(m + kZ * se);
  }
  c.yr.pad();
  c.title("Shape function: " + j.at("feature").get<std::string>() + time_suffix(blocks[0]));
  const double n = static_cast<double>(bins.size()) + 0.5;
  const double slot = (c.right() - c.left()) / n;
  double x = c.left() + slot * 0.25;
  for (const auto& b : bins) {
    const bool missing = b.at("index").get<int>() == 0;
    if (missing) x += slot * 0.25;
    const double m = b.at("mean").get<double>();
    const double se = b.at("se").get<double>();
    const double top = c.py(std::max(m, 0.0));
    const double bottom = c.py(std::min(m, 0.0));
    c.rect(x + slot * 0.15, top, slot * 0.7, bottom - top, missing ? "missing" : "bar",
           missing ? "#ff7f0e" : "#1f77b4");
    c.line(x + slot * 0.5, c.py(m - kZ * se), x + slot * 0.5, c.py(m + kZ * se), "errorbar", "black");
    c.text(x + slot * 0.5, c.bottom() + 16, b.at("label").get<std::string>());
    x += slot;
  }
  c.line(c.left(), c.py(0), c.right(), c.py(0), "axis", "black");
  c.y_axis("contribution");
  return c.finish();
}

std::string heat_color(double t) {
  // t in [-1, 1]: blue through white to red.
  t = std::clamp(t, -1.0, 1.0);
  const int white[3] = {247, 247, 247};
  const int blue[3] = {33, 102, 172};
  const int red[3] = {178, 24, 43};
  const int* end = t < 0 ? blue : red;
  const double a = std::abs(t);
  char buffer[16];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x",
                static_cast<int>(std::lround(white[0] + a * (end[0] - white[0]))),
                static_cast<int>(std::lround(white[1] + a * (end[1] - white[1]))),
                static_cast<int>(std::lround(white[2] + a * (end[2] - white[2]))));
  return buffer;
}

std::string pair_heatmap(const Json& j, const SvgOptions& options) {
  require(j, "pair_shape");
  const auto& blocks = j.at("blocks");
  if (blocks.empty() || blocks[0].at("mean").empty()) throw ConfigError("empty export");
  const auto& mean = blocks[0].at("mean");
  const auto labels_a = j.at("labels_a").get<std::vector<std::string>>();
  const auto labels_b = j.at("labels_b").get<std::vector<std::string>>();
  const std::size_t rows = mean.size();
  const std::size_t cols = mean[0].size();
  Canvas c(options.width, options.height, 120, 80, 40, 90);
  double scale = 0.0;
  for (const auto& r : mean) {
    for (const auto& v : r) scale = std::max(scale, std::abs(v.get<double>()));
  }
  if (scale == 0.0) scale = 1.0;
  c.title("Interaction: " + j.at("feature_a").get<std::string>() + " x " +
          j.at("feature_b").get<std::string>() + time_suffix(blocks[0]));
  const double w = (c.right() - c.left()) / static_cast<double>(cols);
  const double h = (c.bottom() - c.top()) / static_cast<double>(rows);
  const std::size_t every_a = std::max<std::size_t>(1, rows / 12);
  const std::size_t every_b = std::max<std::size_t>(1, cols / 12);
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      // Row 0 of feature a is drawn at the top.
      c.rect(c.left() + w * static_cast<double>(b), c.top() + h * static_cast<double>(a), w, h, "cell",
             heat_color(mean[a][b].get<double>() / scale));
    }
    if (a % every_a == 0) c.text(c.left() - 4, c.top() + h * (static_cast<double>(a) + 0.5) + 4, labels_a[a], "end", 9);
  }
  for (std::size_t b = 0; b < cols; b += every_b) {
    const double x = c.left() + w * (static_cast<double>(b) + 0.5);
    c.text(x, c.bottom() + 10, labels_b[b], "end", 9, -45.0);
  }
  c.text((c.left() + c.right()) / 2.0, static_cast<double>(options.height) - 6.0, j.at("feature_b").get<std::string>());
  c.text(14.0, (c.top() + c.bottom()) / 2.0, j.at("feature_a").get<std::string>(), "middle", 11, -90.0);
  // Colour scale.
  const double lx = c.right() + 30.0;
  for (int i = 0; i < 20; ++i) {
    const double t = 1.0 - 2.0 * i / 19.0;
    c.rect(lx, c.top() + i * 10.0, 14.0, 10.0, "legend", heat_color(t));
  }
  c.text(lx + 18, c.top() + 8, tick_text(scale), "start", 9);
  c.text(lx + 18, c.top() + 200, tick_text(-scale), "start", 9);
  return c.finish();
}

std::string calibration_plot(const Json& j, const SvgOptions& options) {
  require(j, "calibration");
  const auto& times = j.at("times");
  if (times.empty() || times[0].at("points").empty()) throw ConfigError("empty export");
  Canvas c(options.width, options.height, 60, 30, 40, 40);
  c.xr = {0.0, 1.0};
  c.yr = {0.0, 1.0};
  c.title("Calibration");
  c.line(c.px(0), c.py(0), c.px(1), c.py(1), "diagonal", "#999999");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const char* color = kPalette[k % 6];
    std::string path;
    for (const auto& p : times[k].at("points")) {
      const double x = c.px(p.at("mean_pred").get<double>());
      const double y = c.py(p.at("km_cdf").get<double>());
      path += (path.empty() ? "M" : " L") + fmt(x) + " " + fmt(y);
    }
    c.raw("<path class=\"calibration\" d=\"" + path + "\" fill=\"none\" stroke=\"" + color + "\"/>\n");
    for (const auto& p : times[k].at("points")) {
      c.circle(c.px(p.at("mean_pred").get<double>()), c.py(p.at("km_cdf").get<double>()), 3.5, "point", color);
    }
    c.text(c.right() - 4, c.bottom() - 10 - 14.0 * static_cast<double>(k), "t = " + tick_text(times[k].at("time").get<double>()), "end");
  }
  c.x_axis("mean predicted CDF");
  c.y_axis("Kaplan-Meier CDF");
  return c.finish();
}

}  // namespace

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::kImportanceBars: return "importance-bars";
    case PlotKind::kShapeLine: return "shape-line";
    case PlotKind::kShapeCategoryBars: return "shape-category-bars";
    case PlotKind::kPairHeatmap: return "pair-heatmap";
    case PlotKind::kCalibration: return "calibration";
  }
  return "importance-bars";
}

PlotKind plot_kind_from_string(std::string_view text) {
  for (PlotKind k : {PlotKind::kImportanceBars, PlotKind::kShapeLine, PlotKind::kShapeCategoryBars,
                     PlotKind::kPairHeatmap, PlotKind::kCalibration}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown plot kind '" + std::string(text) + "'");
}

PlotKind default_shape_plot(const Json& shape_json) {
  return shape_json.value("feature_kind", std::string()) == "continuous" ? PlotKind::kShapeLine
                                                                         : PlotKind::kShapeCategoryBars;
}

std::string render_svg(const Json& export_json, PlotKind kind, const SvgOptions& options) {
  if (options.width < 200 || options.height < 200) throw ConfigError("plot size too small");
  try {
    switch (kind) {
      case PlotKind::kImportanceBars: return importance_bars(export_json, options);
      case PlotKind::kShapeLine: return shape_line(export_json, options);
      case PlotKind::kShapeCategoryBars: return shape_category_bars(export_json, options);
      case PlotKind::kPairHeatmap: return pair_heatmap(export_json, options);
      case PlotKind::kCalibration: return calibration_plot(export_json, options);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed export: ") + e.what());
  }
  throw ConfigError("unknown plot kind");
}

}  // namespace namlite
