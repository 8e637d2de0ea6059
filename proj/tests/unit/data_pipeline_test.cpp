#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "namlite/binning.hpp"
#include "namlite/error.hpp"
#include "namlite/folds.hpp"
#include "namlite/schema.hpp"
#include "namlite/table.hpp"

namespace namlite {
namespace {

Column Numbers(const std::string& name, std::vector<double> values) {
  return Column::numeric(name, values);
}

// Brute force: the q-quantile of a sorted sample by the (n - 1) q position rule.
double BruteQuantile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

TEST(TableTest, MissingTokens) {
  for (const char* token : {"", "NA", "na", " NaN ", "null", "NULL"}) {
    EXPECT_TRUE(is_missing_token(token)) << token;
  }
  EXPECT_FALSE(is_missing_token("0"));
  EXPECT_FALSE(is_missing_token("N"));
}

TEST(TableTest, ParseNumberRejectsPartialTokens) {
  EXPECT_EQ(parse_number("2.5"), 2.5);
  EXPECT_EQ(parse_number(" -1e3 "), -1000.0);
  EXPECT_FALSE(parse_number("2.5x").has_value());
  EXPECT_FALSE(parse_number("NA").has_value());
}

TEST(TableTest, ParsesQuotedCsv) {
  const Table t = parse_csv("a,b\r\n1,\"x, \"\"y\"\"\"\n2,\n");
  ASSERT_EQ(t.rows(), 2u);
  ASSERT_EQ(t.cols(), 2u);
  EXPECT_EQ(t.column("b").cells[0], "x, \"y\"");
  EXPECT_TRUE(t.column("b").is_missing(1));
}

TEST(TableTest, CsvErrors) {
  EXPECT_THROW(parse_csv(""), DataError);
  EXPECT_THROW(parse_csv("a,a\n1,2\n"), DataError);
  EXPECT_THROW(parse_csv("a,b\n1\n"), DataError);
  EXPECT_THROW(parse_csv("a\n\"1\n"), DataError);
}

TEST(TableTest, CsvEscapeRoundTrips) {
  const std::string field = "he said \"hi\", twice";
  const Table t = parse_csv("h\n" + csv_escape(field) + "\n");
  EXPECT_EQ(t.column("h").cells[0], field);
  EXPECT_EQ(csv_escape("plain"), "plain");
}

TEST(TableTest, UnknownColumnNamesTheColumn) {
  const Table t({Numbers("a", {1.0})});
  try {
    t.column("target");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("target"), std::string::npos);
  }
}

TEST(SchemaTest, TwoDistinctStringsAreBinary) {
  const FeatureSchema s = infer_feature(Column::text("sex", {"F", "F", "M"}));
  EXPECT_EQ(s.kind, FeatureKind::kBinary);
}

TEST(SchemaTest, NumericColumnIsContinuous) {
  EXPECT_EQ(infer_feature(Numbers("age", {74.0, 23.0, 20.0})).kind, FeatureKind::kContinuous);
}

TEST(SchemaTest, MixedTextIsCategorical) {
  EXPECT_EQ(infer_feature(Column::text("c", {"A", "B", "C", "1"})).kind,
            FeatureKind::kCategorical);
}

TEST(SchemaTest, AllMissingIsAnError) {
  try {
    infer_feature(Column::text("x", {"", "NA", "null"}));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("all-missing feature"), std::string::npos);
  }
}

TEST(SchemaTest, OverridesReplaceInferredKind) {
  const Table t({Numbers("a", {1.0, 2.0, 3.0}), Numbers("b", {0.0, 1.0, 0.0})});
  const auto schema = infer_schema(t, {{"a", FeatureKind::kCategorical}});
  EXPECT_EQ(schema[0].kind, FeatureKind::kCategorical);
  EXPECT_EQ(schema[1].kind, FeatureKind::kBinary);
  EXPECT_THROW(feature_kind_from_string("ordinal"), ConfigError);
}

TEST(BinningTest, QuartileEdgesOnOneToHundred) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const BinMap map = fit_bins(Numbers("x", v), {"x", FeatureKind::kContinuous}, 4, 1);
  ASSERT_EQ(map.edges.size(), 3u);
  for (int k = 1; k <= 3; ++k) {
    EXPECT_DOUBLE_EQ(map.edges[k - 1], BruteQuantile(v, k / 4.0));
  }
  EXPECT_DOUBLE_EQ(map.edges[0], 25.75);
  EXPECT_DOUBLE_EQ(map.edges[1], 50.5);
  EXPECT_DOUBLE_EQ(map.edges[2], 75.25);
  EXPECT_EQ(map.n_bins, 4);
}

TEST(BinningTest, CategoriesGetOneBinEach) {
  const BinMap map =
      fit_bins(Column::text("c", {"B", "A", "C", "A"}), {"c", FeatureKind::kCategorical}, 32, 1);
  EXPECT_EQ(map.n_bins, 3);
  EXPECT_EQ(map.index_space(), 4);
  EXPECT_EQ(map.transform_value("A"), 1);
  EXPECT_EQ(map.transform_value("C"), 3);
  EXPECT_EQ(map.transform_value("Z"), kMissingBin);
  EXPECT_EQ(map.transform_value(""), kMissingBin);
}

TEST(BinningTest, ConstantColumnCollapsesToOneBin) {
  const BinMap map = fit_bins(Numbers("x", std::vector<double>(20, 5.0)),
                              {"x", FeatureKind::kContinuous}, 8, 1);
  EXPECT_TRUE(map.edges.empty());
  EXPECT_EQ(map.n_bins, 1);
  EXPECT_EQ(map.transform_value("5"), 1);
}

TEST(BinningTest, TransformCountsEdgesBelow) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const BinMap map = fit_bins(Numbers("x", v), {"x", FeatureKind::kContinuous}, 4, 1);
  EXPECT_EQ(map.transform_value("-10"), 1);
  EXPECT_EQ(map.transform_value("25.75"), 1);  // equal to a cut point: lower bin
  EXPECT_EQ(map.transform_value("25.76"), 2);
  EXPECT_EQ(map.transform_value("1000"), 4);
  EXPECT_EQ(map.transform_value("NA"), 0);
  EXPECT_THROW(map.transform_value("abc"), DataError);
}

TEST(BinningTest, MergedBinsMeetMinimumCount) {
  std::vector<double> v;
  for (int i = 0; i < 90; ++i) v.push_back(0.0);
  for (int i = 0; i < 10; ++i) v.push_back(1.0 + i);
  const BinMap map = fit_bins(Numbers("x", v), {"x", FeatureKind::kContinuous}, 16, 8);
  std::vector<int> counts(map.index_space(), 0);
  for (const auto& cell : Numbers("x", v).cells) ++counts[map.transform_value(cell)];
  for (int b = 1; b <= map.n_bins; ++b) EXPECT_GE(counts[b], 8) << "bin " << b;
}

TEST(BinningTest, RareCategoriesFallIntoMissingBin) {
  std::vector<std::string> cells(10, "A");
  cells.push_back("B");
  const BinMap map = fit_bins(Column::text("c", cells), {"c", FeatureKind::kCategorical}, 32, 2);
  EXPECT_EQ(map.n_bins, 1);
  EXPECT_EQ(map.transform_value("B"), kMissingBin);
}

TEST(BinningTest, DefaultMinSamples) {
  EXPECT_EQ(default_min_samples_per_bin(10), 1);
  EXPECT_EQ(default_min_samples_per_bin(1000), 10);
  EXPECT_EQ(default_min_samples_per_bin(1000000), 50);
}

TEST(FoldsTest, PartitionOfTen) {
  const auto folds = split_folds(10, 5, 7);
  ASSERT_EQ(folds.size(), 5u);
  std::set<std::size_t> seen;
  for (const Fold& f : folds) {
    EXPECT_EQ(f.validation.size(), 2u);
    EXPECT_EQ(f.train.size(), 8u);
    for (auto i : f.validation) EXPECT_TRUE(seen.insert(i).second) << "index " << i << " reused";
    EXPECT_TRUE(std::is_sorted(f.train.begin(), f.train.end()));
    std::vector<std::size_t> all = f.train;
    all.insert(all.end(), f.validation.begin(), f.validation.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(FoldsTest, Deterministic) {
  const auto a = split_folds(37, 5, 11);
  const auto b = split_folds(37, 5, 11);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(a[k].validation, b[k].validation);
  const auto c = split_folds(37, 5, 12);
  bool differs = false;
  for (int k = 0; k < 5; ++k) differs = differs || a[k].validation != c[k].validation;
  EXPECT_TRUE(differs);
}

TEST(FoldsTest, LeaveOneOut) {
  for (const Fold& f : split_folds(5, 5, 3)) EXPECT_EQ(f.validation.size(), 1u);
  EXPECT_THROW(split_folds(4, 5, 3), ConfigError);
  EXPECT_THROW(split_folds(4, 1, 3), ConfigError);
}

}  // namespace
}  // namespace namlite
