#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "namlite/binning.hpp"
#include "namlite/ensemble.hpp"
#include "namlite/error.hpp"
#include "namlite/explain.hpp"
#include "namlite/exports.hpp"
#include "namlite/svg.hpp"
#include "namlite/table.hpp"

namespace namlite {
namespace {

// Hand-built ensemble over features x, y, z with four bins each (cut points
// 1.75, 2.5, 3.25) and an optional x-y pair. Every term is an identity network
// on a one-dimensional embedding without smoothing, so the term output of a
// cell is its embedding value.
class HandModel {
 public:
  explicit HandModel(int n_splits, bool with_pair = false) {
    ensemble_.task = Task::kRegression;
    const std::vector<double> v{1, 2, 3, 4};
    for (const char* name : {"x", "y", "z"}) {
      const Column column = Column::numeric(name, v);
      const FeatureSchema schema{name, FeatureKind::kContinuous};
      ensemble_.schema.push_back(schema);
      ensemble_.bins.push_back(fit_bins(column, schema, 4, 1));
      ensemble_.monotone.push_back(0);
    }
    if (with_pair) ensemble_.pairs.emplace_back(0, 1);
    Architecture arch;
    arch.embedding_dim = 1;
    arch.hidden = {1};
    arch.activation = Activation::kIdentity;
    arch.kernel = {0.0, 0};
    for (int s = 0; s < n_splits; ++s) {
      SplitModel split;
      split.model = make_model(ensemble_.bins, ensemble_.monotone, ensemble_.pairs, 1, arch, 1.0, 0.25);
      AdditiveModel& m = split.model;
      std::fill(m.params().begin(), m.params().end(), 0.0);
      for (int t = 0; t < m.term_count(); ++t) {
        const Term& term = m.term(t);
        m.params()[term.mlp_offset + m.mlp_shape().weight_offset(0)] = 1.0;
        m.params()[term.mlp_offset + m.mlp_shape().weight_offset(1)] = 1.0;
        m.set_mu(t, m.term_gamma(t) / 2.0);
        split.train_counts.emplace_back(term.cells(), 1);
        split.train_counts.back()[0] = 0;
      }
      ensemble_.splits.push_back(std::move(split));
    }
  }

  // Embedding values of a term over its cells, in one split.
  void set_term(int split, int term, const std::vector<double>& values) {
    AdditiveModel& m = ensemble_.splits[split].model;
    const Term& t = m.term(term);
    ASSERT_EQ(static_cast<int>(values.size()), t.cells());
    std::copy(values.begin(), values.end(), m.params().begin() + static_cast<long>(t.embedding_offset));
  }
  void set_counts(int split, int term, std::vector<std::int64_t> counts) {
    ensemble_.splits[split].train_counts[term] = std::move(counts);
  }
  void close_gate(int split, int term) { ensemble_.splits[split].model.set_mu(term, -1.0); }

  EnsembleModel& get() { return ensemble_; }

 private:
  EnsembleModel ensemble_;
};

const ImportanceEntry& Entry(const ImportanceReport& r, const std::string& name) {
  for (const auto& e : r.entries) {
    if (e.name() == name) return e;
  }
  throw std::runtime_error("no entry " + name);
}

TEST(ImportanceTest, MeanAbsoluteOutput) {
  HandModel hand(1);
  hand.set_term(0, 0, {0, 1, -1, 2, 0});
  const auto r = feature_importance(hand.get(), ImportanceMode::kInclude);
  EXPECT_DOUBLE_EQ(Entry(r, "x").mean, 1.0);
  EXPECT_EQ(Entry(r, "x").se, 0.0);
  EXPECT_EQ(r.entries.front().feature, "x");
}

TEST(ImportanceTest, ModesOnMissingValues) {
  HandModel hand(1);
  hand.set_term(0, 0, {3, 1, -1, 2, 0});
  hand.set_counts(0, 0, {2, 1, 1, 1, 1});
  const auto include = feature_importance(hand.get(), ImportanceMode::kInclude);
  const auto ignore = feature_importance(hand.get(), ImportanceMode::kIgnore);
  const auto stratify = feature_importance(hand.get(), ImportanceMode::kStratify);
  EXPECT_DOUBLE_EQ(Entry(include, "x").mean, 10.0 / 6.0);
  EXPECT_DOUBLE_EQ(Entry(ignore, "x").mean, 1.0);
  EXPECT_DOUBLE_EQ(Entry(stratify, "x").mean, Entry(ignore, "x").mean);
  EXPECT_DOUBLE_EQ(Entry(stratify, "x").missing_mean, 3.0);
}

TEST(ImportanceTest, NoMissingMeansIncludeEqualsIgnore) {
  HandModel hand(2);
  hand.set_term(0, 1, {9, 0.5, -0.5, 1, 2});
  hand.set_term(1, 1, {9, 1, -1, 0, 2});
  const auto include = feature_importance(hand.get(), ImportanceMode::kInclude);
  const auto ignore = feature_importance(hand.get(), ImportanceMode::kIgnore);
  const auto stratify = feature_importance(hand.get(), ImportanceMode::kStratify);
  EXPECT_EQ(Entry(include, "y").per_split, Entry(ignore, "y").per_split);
  // Never-missing feature: missing score 0 although the missing row is 9.
  EXPECT_EQ(Entry(stratify, "y").missing_mean, 0.0);
}

TEST(ImportanceTest, ClosedGateScoresZeroEverywhere) {
  HandModel hand(2);
  for (int s = 0; s < 2; ++s) {
    hand.set_term(s, 2, {5, 1, 2, 3, 4});
    hand.set_counts(s, 2, {3, 1, 1, 1, 1});
    hand.close_gate(s, 2);
  }
  for (auto mode : {ImportanceMode::kInclude, ImportanceMode::kIgnore, ImportanceMode::kStratify}) {
    const auto r = feature_importance(hand.get(), mode);
    EXPECT_EQ(Entry(r, "z").mean, 0.0);
    EXPECT_EQ(Entry(r, "z").missing_mean, 0.0);
  }
}

TEST(ImportanceTest, StandardErrorAcrossSplits) {
  HandModel hand(2);
  hand.set_term(0, 0, {0, 1, 1, 1, 1});
  hand.set_term(1, 0, {0, 2, 2, 2, 2});
  const auto r = feature_importance(hand.get(), ImportanceMode::kInclude);
  EXPECT_DOUBLE_EQ(Entry(r, "x").mean, 1.5);
  EXPECT_DOUBLE_EQ(Entry(r, "x").se, 0.5);
  EXPECT_THROW(importance_mode_from_string("median"), ConfigError);
}

TEST(ImportanceTest, PooledScoresIgnoreRowOrder) {
  HandModel hand(1);
  hand.set_term(0, 0, {0, 1, -1, 2, 0});
  BinnedMatrix x;
  x.n_samples = 4;
  x.columns = {{1, 2, 3, 4}, {4, 3, 0, 1}, {2, 2, 2, 2}};
  BinnedMatrix reversed = x;
  for (auto& c : reversed.columns) std::reverse(c.begin(), c.end());
  const auto a = feature_importance(hand.get(), ImportanceMode::kInclude, &x);
  const auto b = feature_importance(hand.get(), ImportanceMode::kInclude, &reversed);
  EXPECT_TRUE(a.pooled);
  for (const char* f : {"x", "y", "z"}) EXPECT_EQ(Entry(a, f).mean, Entry(b, f).mean);
  EXPECT_DOUBLE_EQ(Entry(a, "x").mean, 1.0);
}

TEST(ShapeTest, ZeroModelIsFlat) {
  HandModel hand(1);
  const ShapeExport shape = shape_function(hand.get(), "y", true);
  ASSERT_EQ(shape.blocks.size(), 1u);
  ASSERT_EQ(shape.blocks[0].bins.size(), 5u);
  for (const auto& bin : shape.blocks[0].bins) {
    EXPECT_EQ(bin.mean, 0.0);
    EXPECT_EQ(bin.se, 0.0);
  }
  EXPECT_EQ(shape_function(hand.get(), "y", false).blocks[0].bins.size(), 4u);
  EXPECT_THROW(shape_function(hand.get(), "w", false), ConfigError);
}

TEST(ShapeTest, CenteredAcrossSplits) {
  HandModel hand(2);
  hand.set_term(0, 0, {0, 1, 2, 3, 4});
  hand.set_term(1, 0, {0, 3, 4, 5, 6});
  hand.get().splits[0].model.centering(0) = {2.5};
  hand.get().splits[1].model.centering(0) = {4.5};
  const ShapeExport shape = shape_function(hand.get(), "x", false);
  const auto& bins = shape.blocks[0].bins;
  EXPECT_DOUBLE_EQ(bins[0].mean, -1.5);
  EXPECT_EQ(bins[0].se, 0.0);
  EXPECT_DOUBLE_EQ(bins[0].lower, 1.0);
  EXPECT_DOUBLE_EQ(bins[0].upper, 1.75);
}

TEST(PairShapeTest, GridAndErrors) {
  HandModel plain(1);
  try {
    pair_shape_function(plain.get(), "x", "y");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("pair not selected"), std::string::npos);
  }
  HandModel hand(1, true);
  const PairShapeExport grid = pair_shape_function(hand.get(), "x", "y");
  EXPECT_EQ(grid.rows_a, 5);
  EXPECT_EQ(grid.rows_b, 5);
  EXPECT_EQ(grid.blocks[0].mean.size(), 25u);
  EXPECT_EQ(grid.labels_a.front(), "missing");
}

TEST(NearestTimeTest, EarlierOnTies) {
  const std::vector<double> grid{1, 3, 5};
  EXPECT_EQ(nearest_time_index(grid, 2.0), 0);
  EXPECT_EQ(nearest_time_index(grid, 4.1), 2);
  EXPECT_EQ(nearest_time_index(grid, 100), 2);
}

// SVG --------------------------------------------------------------------

HandModel SvgModel() {
  HandModel hand(2, true);
  hand.set_term(0, 0, {1.5, -1, -0.25, 0.5, 1});
  hand.set_term(1, 0, {1.2, -0.8, -0.35, 0.4, 1.1});
  hand.set_term(0, 1, {0, 0.2, 0.1, -0.1, -0.2});
  hand.set_term(1, 1, {0, 0.25, 0.05, -0.15, -0.1});
  hand.set_term(0, 2, {0, 0.6, -0.6, 0.3, -0.3});
  hand.set_term(1, 2, {0, 0.5, -0.5, 0.2, -0.4});
  std::vector<double> pair(25, 0.0);
  for (int a = 1; a < 5; ++a) {
    for (int b = 1; b < 5; ++b) pair[a * 5 + b] = (a - 2.5) * (b - 2.5) / 2.25;
  }
  hand.set_term(0, 3, pair);
  hand.set_term(1, 3, pair);
  for (int s = 0; s < 2; ++s) hand.set_counts(s, 0, {2, 1, 1, 1, 1});
  return hand;
}

std::size_t Count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void CheckGolden(const std::string& name, const std::string& svg) {
  const std::filesystem::path path = std::filesystem::path(NAMLITE_GOLDEN_DIR) / name;
  if (std::getenv("NAMLITE_UPDATE_GOLDEN")) {
    std::ofstream(path) << svg;
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(ReadFile(path), svg) << "golden mismatch: " << name;
}

TEST(SvgTest, ImportanceBarsPerFeature) {
  HandModel hand = SvgModel();
  const ExportMeta meta = export_meta(hand.get());
  const Json json = importance_to_json(feature_importance(hand.get(), ImportanceMode::kIgnore), meta);
  HandModel mains(1);
  mains.set_term(0, 0, {0, 1, 2, 3, 4});
  const Json three = importance_to_json(feature_importance(mains.get(), ImportanceMode::kInclude),
                                        export_meta(mains.get()));
  const std::string svg = render_svg(three, PlotKind::kImportanceBars);
  EXPECT_EQ(Count(svg, "class=\"bar\""), 3u);
  EXPECT_EQ(svg, render_svg(three, PlotKind::kImportanceBars));
  EXPECT_EQ(Count(render_svg(json, PlotKind::kImportanceBars, {2, 640, 400}), "class=\"bar\""), 2u);
}

TEST(SvgTest, StratifyAddsMissingBars) {
  HandModel hand = SvgModel();
  const Json json = importance_to_json(feature_importance(hand.get(), ImportanceMode::kStratify),
                                       export_meta(hand.get()));
  const std::string svg = render_svg(json, PlotKind::kImportanceBars);
  EXPECT_EQ(Count(svg, "class=\"bar-missing\""), 4u);
  CheckGolden("importance_stratify.svg", svg);
}

TEST(SvgTest, ShapeLineGolden) {
  HandModel hand = SvgModel();
  const Json json = shape_to_json(shape_function(hand.get(), "x", true), export_meta(hand.get()));
  EXPECT_EQ(default_shape_plot(json), PlotKind::kShapeLine);
  const std::string svg = render_svg(json, PlotKind::kShapeLine);
  EXPECT_EQ(Count(svg, "class=\"missing\""), 1u);
  CheckGolden("shape_x.svg", svg);
}

TEST(SvgTest, HeatmapGolden) {
  HandModel hand = SvgModel();
  const Json json = pair_shape_to_json(pair_shape_function(hand.get(), "x", "y"), export_meta(hand.get()));
  const std::string svg = render_svg(json, PlotKind::kPairHeatmap);
  EXPECT_EQ(Count(svg, "class=\"cell\""), 25u);
  CheckGolden("pair_x_y.svg", svg);
}

TEST(SvgTest, Errors) {
  HandModel hand = SvgModel();
  const Json shape = shape_to_json(shape_function(hand.get(), "x", false), export_meta(hand.get()));
  EXPECT_THROW(render_svg(shape, PlotKind::kImportanceBars), ConfigError);
  Json empty = importance_to_json(feature_importance(hand.get(), ImportanceMode::kInclude),
                                  export_meta(hand.get()));
  empty["entries"] = Json::array();
  EXPECT_THROW(render_svg(empty, PlotKind::kImportanceBars), ConfigError);
  EXPECT_THROW(plot_kind_from_string("pie"), ConfigError);
}

}  // namespace
}  // namespace namlite
