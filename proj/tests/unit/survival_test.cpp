#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "namlite/error.hpp"
#include "namlite/rng.hpp"
#include "namlite/survival.hpp"

namespace namlite {
namespace {

std::vector<SurvivalLabel> Events(std::vector<double> times) {
  std::vector<SurvivalLabel> out;
  for (double t : times) out.push_back({true, t});
  return out;
}

TEST(KaplanMeierTest, AllCensoredStaysAtOne) {
  const std::vector<SurvivalLabel> labels{{false, 1.0}, {false, 2.0}};
  const auto km = kaplan_meier(labels);
  EXPECT_EQ(km.at(0.5), 1.0);
  EXPECT_EQ(km.at(10.0), 1.0);
}

TEST(KaplanMeierTest, AllEvents) {
  const auto km = kaplan_meier(Events({1, 2, 3}));
  EXPECT_DOUBLE_EQ(km.at(1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(km.at(2.5), 1.0 / 3.0);
  EXPECT_EQ(km.at(3.0), 0.0);
  EXPECT_EQ(km.left_limit(1.0), 1.0);
  EXPECT_DOUBLE_EQ(km.left_limit(3.0), 1.0 / 3.0);
}

TEST(KaplanMeierTest, ClassicToy) {
  const std::vector<SurvivalLabel> labels{{true, 1.0}, {false, 2.0}, {true, 3.0}};
  const auto km = kaplan_meier(labels);
  EXPECT_DOUBLE_EQ(km.at(1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(km.at(2.5), 2.0 / 3.0);
  EXPECT_EQ(km.at(3.0), 0.0);
  const auto g = censoring_kaplan_meier(labels);
  EXPECT_EQ(g.at(1.5), 1.0);
  EXPECT_DOUBLE_EQ(g.at(2.0), 0.5);
}

TEST(KaplanMeierTest, CensoredTieStaysAtRisk) {
  // Event and censoring at 2: risk set at 2 has both.
  const std::vector<SurvivalLabel> labels{{true, 1.0}, {true, 2.0}, {false, 2.0}, {true, 4.0}};
  const auto km = kaplan_meier(labels);
  EXPECT_DOUBLE_EQ(km.at(2.0), 0.75 * (1.0 - 1.0 / 3.0));
}

TEST(EvalGridTest, QuartilesOfOneToNinetyNine) {
  std::vector<double> t(99);
  std::iota(t.begin(), t.end(), 1.0);
  EXPECT_EQ(eval_time_grid(Events(t), 3), (std::vector<double>{25, 50, 75}));
}

TEST(EvalGridTest, IdenticalTimesCollapse) {
  EXPECT_EQ(eval_time_grid(Events({4, 4, 4, 4}), 5), (std::vector<double>{4}));
}

TEST(EvalGridTest, CensoredTimesIgnored) {
  std::vector<SurvivalLabel> labels = Events({1, 2, 3});
  labels.push_back({false, 100.0});
  const auto grid = eval_time_grid(labels, 1);
  EXPECT_EQ(grid, (std::vector<double>{2}));
  EXPECT_THROW(eval_time_grid(std::vector<SurvivalLabel>{{false, 1.0}}, 2), DataError);
}

TEST(CoxTest, ConstantCovariateGetsZero) {
  Rng rng(1);
  std::vector<SurvivalLabel> labels;
  std::vector<double> design;
  for (int i = 0; i < 50; ++i) {
    labels.push_back({rng.bernoulli(0.7), rng.uniform(0.1, 5.0)});
    design.push_back(1.0);
    design.push_back(rng.normal());
  }
  const CoxModel cox = cox_fit(design, 2, labels);
  EXPECT_EQ(cox.beta[0], 0.0);
  EXPECT_LT(cox.gradient_norm, 1e-8);
}

TEST(CoxTest, GradientMatchesFiniteDifferences) {
  Rng rng(2);
  std::vector<SurvivalLabel> labels;
  std::vector<double> design;
  for (int i = 0; i < 30; ++i) {
    labels.push_back({rng.bernoulli(0.6), std::round(rng.uniform(1.0, 6.0))});  // ties
    design.push_back(rng.normal());
    design.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  const std::vector<double> beta{0.3, -0.4};
  const CoxDerivatives d = cox_derivatives(design, 2, labels, beta);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> up = beta, down = beta;
    up[j] += h;
    down[j] -= h;
    const double numeric = (cox_derivatives(design, 2, labels, up).log_likelihood -
                            cox_derivatives(design, 2, labels, down).log_likelihood) / (2 * h);
    EXPECT_NEAR(d.gradient[j], numeric, 1e-6);
  }
}

TEST(CoxTest, RankDeficientDesignIsDataError) {
  std::vector<SurvivalLabel> labels = Events({1, 2, 3, 4});
  const std::vector<double> design{0, 0, 1, 2, 2, 4, 3, 6};
  EXPECT_THROW(cox_fit(design, 2, labels), DataError);
  EXPECT_THROW(cox_fit(design, 2, std::vector<SurvivalLabel>(4, {false, 1.0})), DataError);
}

// With zero coefficients the Breslow survival is exp(-Nelson-Aalen). It sits
// above Kaplan-Meier by at most sum h^2 / (1 - h) over the hazards h = d/n.
TEST(CoxTest, NullModelIsNelsonAalen) {
  Rng rng(3);
  std::vector<SurvivalLabel> labels;
  std::vector<double> design;
  for (int i = 0; i < 200; ++i) {
    labels.push_back({rng.bernoulli(0.7), std::round(rng.uniform(1.0, 20.0))});
    design.push_back(1.0);  // constant, so beta stays 0
  }
  const CoxModel cox = cox_fit(design, 1, labels);
  ASSERT_EQ(cox.beta[0], 0.0);
  const auto km = kaplan_meier(labels);
  const std::vector<double> x{1.0};
  for (double t = 1.0; t <= 20.0; t += 1.0) {
    double na = 0.0, bound = 0.0;
    for (double s = 1.0; s <= t; s += 1.0) {
      double d = 0, n = 0;
      for (const auto& l : labels) {
        if (l.time >= s) ++n;
        if (l.time == s && l.event) ++d;
      }
      if (n == 0 || d == 0) continue;
      const double h = d / n;
      na += h;
      if (h < 1.0) bound += h * h / (1.0 - h);
    }
    const double g = cox.survival(t, x);
    EXPECT_NEAR(g, std::exp(-na), 1e-12) << "t=" << t;
    EXPECT_GE(g - km.at(t), -1e-12);
    EXPECT_LE(g - km.at(t), bound + 1e-12);
  }
}

TEST(CalibrationTest, HandToyTwoBins) {
  const std::vector<double> pred{0.8, 0.1, 0.7, 0.2};
  const std::vector<SurvivalLabel> labels{{true, 2.2}, {true, 1.0}, {true, 2.0}, {false, 3.0}};
  const auto points = calibration_table(pred, labels, 2.5, 2);
  ASSERT_EQ(points.size(), 2u);
  // Low bin {0.1: event at 1, 0.2: censored at 3}: KM 1/2 at 2.5.
  EXPECT_DOUBLE_EQ(points[0].mean_predicted, 0.15);
  EXPECT_DOUBLE_EQ(points[0].observed, 0.5);
  // High bin {0.7: event at 2, 0.8: event at 2.2}: KM 0 at 2.5.
  EXPECT_DOUBLE_EQ(points[1].mean_predicted, 0.75);
  EXPECT_DOUBLE_EQ(points[1].observed, 1.0);
  EXPECT_EQ(points[0].size + points[1].size, 4u);
}

TEST(CalibrationTest, ConstantPredictorPoolsIntoOnePoint) {
  std::vector<SurvivalLabel> labels = Events({1, 2, 3, 4, 5, 6});
  const auto points = calibration_table(std::vector<double>(6, 0.4), labels, 3.5, 3);
  ASSERT_EQ(points.size(), 1u);
  EXPECT_DOUBLE_EQ(points[0].mean_predicted, 0.4);
  EXPECT_DOUBLE_EQ(points[0].observed, 0.5);
  EXPECT_THROW(calibration_table(std::vector<double>(6, 0.4), labels, 3.5, 1), ConfigError);
}

}  // namespace
}  // namespace namlite
