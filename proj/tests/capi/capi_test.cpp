// Exercises the shared library through its C header only.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "namlite/namlite.h"

namespace {

// y = 2 x1 - x2 + noise, with x3 a two-level text column.
std::string RegressionCsv(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::ostringstream out;
  out << "x1,x2,x3,target\n";
  out.precision(17);
  for (int i = 0; i < n; ++i) {
    const double x1 = u(gen), x2 = u(gen);
    const bool b = u(gen) < 0.5;
    out << x1 << "," << (u(gen) < 0.1 ? std::string("NA") : std::to_string(x2)) << "," << (b ? "yes" : "no")
        << "," << 2 * x1 - x2 + (b ? 0.5 : 0.0) + noise(gen) << "\n";
  }
  return out.str();
}

std::string SurvivalCsv(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream out;
  out << "x1,x2,time,event\n";
  out.precision(17);
  for (int i = 0; i < n; ++i) {
    const double x1 = u(gen), x2 = u(gen);
    const double t = -std::log(u(gen)) / (0.5 * std::exp(x1 - x2));
    const double c = -std::log(u(gen)) / 0.2;
    out << x1 << "," << x2 << "," << std::min(t, c) << "," << (t <= c ? 1 : 0) << "\n";
  }
  return out.str();
}

// Owns a library string.
struct Str {
  char* p = nullptr;
  ~Str() { namlite_string_free(p); }
  std::string s() const { return p ? p : ""; }
};

class CapiTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(namlite_dataset_parse_csv(RegressionCsv(400, 1).c_str(), &data_), NAMLITE_OK);
    ASSERT_EQ(namlite_train(data_, R"({"task": "regression", "n_val_splits": 2, "max_epochs": 3, "seed": 5})",
                            &model_, &report_.p),
              NAMLITE_OK)
        << namlite_last_error();
  }
  void TearDown() override {
    namlite_model_free(model_);
    namlite_dataset_free(data_);
  }
  namlite_dataset* data_ = nullptr;
  namlite_model* model_ = nullptr;
  Str report_;
};

TEST_F(CapiTest, DatasetShape) {
  EXPECT_EQ(namlite_dataset_rows(data_), 400u);
  EXPECT_EQ(namlite_dataset_cols(data_), 4u);
  EXPECT_NE(std::string(namlite_version()), "");
}

TEST_F(CapiTest, ReportHasSplits) {
  EXPECT_NE(report_.s().find("\"splits\""), std::string::npos);
}

TEST_F(CapiTest, PredictShapeThenValues) {
  size_t rows = 0, cols = 0;
  ASSERT_EQ(namlite_predict(model_, data_, nullptr, 0, &rows, &cols), NAMLITE_OK);
  EXPECT_EQ(rows, 400u);
  EXPECT_EQ(cols, 1u);
  std::vector<double> out(rows * cols);
  EXPECT_EQ(namlite_predict(model_, data_, out.data(), 10, &rows, &cols), NAMLITE_ERR_ARGUMENT);
  ASSERT_EQ(namlite_predict(model_, data_, out.data(), out.size(), &rows, &cols), NAMLITE_OK);
  for (double v : out) EXPECT_TRUE(std::isfinite(v));
}

TEST_F(CapiTest, JsonRoundTripKeepsHashAndPredictions) {
  Str json, hash_a, hash_b;
  ASSERT_EQ(namlite_model_to_json(model_, &json.p), NAMLITE_OK);
  namlite_model* copy = nullptr;
  ASSERT_EQ(namlite_model_from_json(json.p, &copy), NAMLITE_OK);
  ASSERT_EQ(namlite_model_hash(model_, &hash_a.p), NAMLITE_OK);
  ASSERT_EQ(namlite_model_hash(copy, &hash_b.p), NAMLITE_OK);
  EXPECT_EQ(hash_a.s(), hash_b.s());
  EXPECT_EQ(hash_a.s().size(), 16u);
  std::vector<double> a(400), b(400);
  size_t rows, cols;
  namlite_predict(model_, data_, a.data(), a.size(), &rows, &cols);
  namlite_predict(copy, data_, b.data(), b.size(), &rows, &cols);
  EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
  namlite_model_free(copy);
}

TEST_F(CapiTest, SaveAndLoad) {
  const std::string path = ::testing::TempDir() + "namlite_capi_model.json";
  ASSERT_EQ(namlite_model_save(model_, path.c_str()), NAMLITE_OK);
  namlite_model* loaded = nullptr;
  ASSERT_EQ(namlite_model_load(path.c_str(), &loaded), NAMLITE_OK);
  Str info;
  ASSERT_EQ(namlite_model_info(loaded, &info.p), NAMLITE_OK);
  EXPECT_NE(info.s().find("regression"), std::string::npos);
  namlite_model_free(loaded);
  std::remove(path.c_str());
  EXPECT_EQ(namlite_model_load("/nonexistent/dir/model.json", &loaded), NAMLITE_ERR_DATA);
}

TEST_F(CapiTest, Explanations) {
  Str imp, shape, svg, csv;
  ASSERT_EQ(namlite_importance(model_, "stratify", nullptr, nullptr, 0, NAMLITE_FORMAT_JSON, &imp.p), NAMLITE_OK);
  EXPECT_NE(imp.s().find("missing_score"), std::string::npos);
  ASSERT_EQ(namlite_render_svg(imp.p, nullptr, 0, &svg.p), NAMLITE_OK) << namlite_last_error();
  EXPECT_NE(svg.s().find("<svg"), std::string::npos);
  ASSERT_EQ(namlite_shape(model_, "x3", 1, nullptr, 0, NAMLITE_FORMAT_CSV, &csv.p), NAMLITE_OK);
  EXPECT_NE(csv.s().find("missing"), std::string::npos);
  ASSERT_EQ(namlite_shape(model_, "x1", 0, nullptr, 0, NAMLITE_FORMAT_JSON, &shape.p), NAMLITE_OK);
  Str none;
  EXPECT_EQ(namlite_pair_shape(model_, "x1", "x2", nullptr, 0, NAMLITE_FORMAT_JSON, &none.p), NAMLITE_ERR_CONFIG);
  EXPECT_NE(std::string(namlite_last_error()).find("pair not selected"), std::string::npos);
  EXPECT_EQ(namlite_importance(model_, "median", nullptr, nullptr, 0, NAMLITE_FORMAT_JSON, &none.p),
            NAMLITE_ERR_CONFIG);
}

TEST_F(CapiTest, Evaluate) {
  Str metrics;
  ASSERT_EQ(namlite_evaluate(model_, data_, nullptr, &metrics.p), NAMLITE_OK) << namlite_last_error();
  EXPECT_NE(metrics.s().find("rmse"), std::string::npos);
}

TEST(CapiErrorTest, StatusCodes) {
  namlite_dataset* data = nullptr;
  EXPECT_EQ(namlite_dataset_parse_csv(nullptr, &data), NAMLITE_ERR_ARGUMENT);
  EXPECT_EQ(namlite_dataset_parse_csv("a,a\n1,2\n", &data), NAMLITE_ERR_DATA);
  EXPECT_EQ(namlite_dataset_read_csv("/nonexistent.csv", &data), NAMLITE_ERR_DATA);
  ASSERT_EQ(namlite_dataset_parse_csv(RegressionCsv(50, 2).c_str(), &data), NAMLITE_OK);
  namlite_model* model = nullptr;
  EXPECT_EQ(namlite_train(data, "{not json", &model, nullptr), NAMLITE_ERR_CONFIG);
  EXPECT_EQ(namlite_train(data, R"({"learning_rte": 1})", &model, nullptr), NAMLITE_ERR_CONFIG);
  EXPECT_EQ(namlite_train(data, R"({"target": "y"})", &model, nullptr), NAMLITE_ERR_DATA);
  EXPECT_NE(std::string(namlite_last_error()).find("'y'"), std::string::npos);
  EXPECT_EQ(model, nullptr);
  namlite_dataset_free(data);
}

TEST(CapiSurvivalTest, CalibrateAtGridMedian) {
  namlite_dataset* data = nullptr;
  ASSERT_EQ(namlite_dataset_parse_csv(SurvivalCsv(400, 3).c_str(), &data), NAMLITE_OK);
  namlite_model* model = nullptr;
  ASSERT_EQ(namlite_train(data, R"({"task": "survival", "n_val_splits": 2, "max_epochs": 2, "n_eval_times": 5})",
                          &model, nullptr),
            NAMLITE_OK)
      << namlite_last_error();
  size_t rows, cols;
  ASSERT_EQ(namlite_predict(model, data, nullptr, 0, &rows, &cols), NAMLITE_OK);
  EXPECT_EQ(cols, 5u);
  Str cal, svg;
  ASSERT_EQ(namlite_calibrate(model, data, nullptr, nullptr, 0, 4, NAMLITE_FORMAT_JSON, &cal.p), NAMLITE_OK)
      << namlite_last_error();
  EXPECT_NE(cal.s().find("km_cdf"), std::string::npos);
  ASSERT_EQ(namlite_render_svg(cal.p, "calibration", 0, &svg.p), NAMLITE_OK) << namlite_last_error();
  EXPECT_NE(svg.s().find("class=\"point\""), std::string::npos);
  Str bad;
  EXPECT_EQ(namlite_calibrate(model, data, nullptr, nullptr, 0, 1, NAMLITE_FORMAT_JSON, &bad.p), NAMLITE_ERR_CONFIG);
  namlite_model_free(model);
  namlite_dataset_free(data);
}

}  // namespace
