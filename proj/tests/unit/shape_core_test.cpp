#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "namlite/additive_model.hpp"
#include "namlite/engine.hpp"
#include "namlite/error.hpp"
#include "namlite/gates.hpp"
#include "namlite/kernel.hpp"
#include "namlite/mlp.hpp"
#include "namlite/objective.hpp"
#include "namlite/rng.hpp"

namespace namlite {
namespace {

TEST(SmoothStepTest, Endpoints) {
  for (double g : {0.01, 0.3, 1.0, 100.0}) {
    EXPECT_EQ(smooth_step(-g / 2.0, g), 0.0);
    EXPECT_EQ(smooth_step(0.0, g), 0.5);
    EXPECT_EQ(smooth_step(g / 2.0, g), 1.0);
    EXPECT_EQ(smooth_step(-3.0 * g, g), 0.0);
    EXPECT_EQ(smooth_step(3.0 * g, g), 1.0);
  }
}

TEST(SmoothStepTest, QuarterGammaValue) {
  for (double g : {0.01, 1.0, 7.0}) EXPECT_NEAR(smooth_step(g / 4.0, g), 0.84375, 1e-15);
}

TEST(SmoothStepTest, Gradient) {
  const double g = 2.0;
  EXPECT_DOUBLE_EQ(smooth_step_grad(0.0, g), 3.0 / (2.0 * g));
  EXPECT_EQ(smooth_step_grad(g / 2.0, g), 0.0);
  EXPECT_EQ(smooth_step_grad(-g / 2.0, g), 0.0);
  EXPECT_EQ(smooth_step_grad(g, g), 0.0);
  const double mu = 0.3, h = 1e-6;
  EXPECT_NEAR(smooth_step_grad(mu, g), (smooth_step(mu + h, g) - smooth_step(mu - h, g)) / (2 * h),
              1e-9);
}

TEST(SmoothStepTest, RejectsNonPositiveGamma) {
  EXPECT_THROW(smooth_step(0.0, 0.0), ConfigError);
  EXPECT_THROW(smooth_step_grad(0.0, -1.0), ConfigError);
}

TEST(DefaultGammaTest, Formula) {
  EXPECT_DOUBLE_EQ(default_gamma(32000, 128, 16), 1.0);
  EXPECT_DOUBLE_EQ(default_gamma(128, 128, 16), 0.004);
  EXPECT_DOUBLE_EQ(default_gamma(1000000, 128, 16), 1.0);
}

TEST(KernelTest, Weights) {
  const auto one_hot = kernel_weights(2, 0.0);
  EXPECT_EQ(one_hot, (std::vector<double>{0, 0, 1, 0, 0}));
  const auto w = kernel_weights(2, 3.0);
  EXPECT_EQ(w[2], 1.0);
  EXPECT_NEAR(w[1], 0.84648, 1e-5);
  EXPECT_DOUBLE_EQ(w[1], std::exp(-1.0 / 6.0));
  EXPECT_DOUBLE_EQ(w[3], w[1]);
  EXPECT_THROW(kernel_weights(-1, 1.0), ConfigError);
  EXPECT_THROW(kernel_weights(1, -1.0), ConfigError);
}

class SmoothingTest : public ::testing::Test {
 protected:
  static constexpr int kRows = 6;  // missing row + 5 bins
  static constexpr int kDim = 3;
  void SetUp() override {
    Rng rng(5);
    table_.resize(kRows * kDim);
    for (auto& v : table_) v = rng.normal();
  }
  double e(int row, int c) const { return table_[row * kDim + c]; }
  std::vector<double> table_;
};

TEST_F(SmoothingTest, ZeroRadiusIsIdentity) {
  std::vector<double> out(kDim);
  for (int i = 0; i < kRows; ++i) {
    smoothed_embedding(table_, kRows, kDim, i, kernel_weights(0, 3.0), out);
    for (int c = 0; c < kDim; ++c) EXPECT_EQ(out[c], e(i, c));
  }
}

TEST_F(SmoothingTest, MissingRowIsNeverSmoothed) {
  std::vector<double> out(kDim);
  for (int k : {1, 3, 10}) {
    smoothed_embedding(table_, kRows, kDim, 0, kernel_weights(k, 50.0), out);
    for (int c = 0; c < kDim; ++c) EXPECT_EQ(out[c], e(0, c));
  }
}

TEST_F(SmoothingTest, InteriorExpansion) {
  std::vector<double> out(kDim);
  smoothed_embedding(table_, kRows, kDim, 3, kernel_weights(1, 3.0), out);
  const double w = std::exp(-1.0 / 6.0);
  for (int c = 0; c < kDim; ++c) EXPECT_NEAR(out[c], e(3, c) + w * (e(2, c) + e(4, c)), 1e-14);
}

TEST_F(SmoothingTest, EdgesDropMissingRowAndOverflow) {
  std::vector<double> out(kDim);
  const auto w = kernel_weights(2, 3.0);
  smoothed_embedding(table_, kRows, kDim, 1, w, out);
  for (int c = 0; c < kDim; ++c) EXPECT_NEAR(out[c], e(1, c) + w[3] * e(2, c) + w[4] * e(3, c), 1e-14);
  smoothed_embedding(table_, kRows, kDim, 5, w, out);
  for (int c = 0; c < kDim; ++c) EXPECT_NEAR(out[c], e(5, c) + w[1] * e(4, c) + w[0] * e(3, c), 1e-14);
}

TEST_F(SmoothingTest, BackwardIsAdjoint) {
  Rng rng(9);
  const auto w = kernel_weights(2, 2.0);
  std::vector<double> g(kDim), out(kDim), table_grad(kRows * kDim, 0.0);
  for (auto& v : g) v = rng.normal();
  for (int i = 0; i < kRows; ++i) {
    std::fill(table_grad.begin(), table_grad.end(), 0.0);
    smoothed_embedding(table_, kRows, kDim, i, w, out);
    smoothed_embedding_backward(table_grad, kRows, kDim, i, w, g);
    // <g, S e> == <S^T g, e>
    const double lhs = std::inner_product(g.begin(), g.end(), out.begin(), 0.0);
    const double rhs = std::inner_product(table_grad.begin(), table_grad.end(), table_.begin(), 0.0);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(PairKernelTest, SeparableWeights) {
  const int ra = 4, rb = 4, dim = 1;
  std::vector<double> table(ra * rb * dim, 0.0);
  table[2 * rb + 2] = 1.0;  // unit impulse at (2, 2)
  std::vector<double> out(dim);
  pair_smoothed_embedding(table, ra, rb, dim, 3, 3, kernel_weights(1, 3.0), out);
  EXPECT_NEAR(out[0], 0.71653, 1e-5);
  EXPECT_DOUBLE_EQ(out[0], std::exp(-2.0 / 6.0));
  pair_smoothed_embedding(table, ra, rb, dim, 2, 2, kernel_weights(1, 0.0), out);
  EXPECT_EQ(out[0], 1.0);
  pair_smoothed_embedding(table, ra, rb, dim, 0, 2, kernel_weights(1, 3.0), out);
  EXPECT_EQ(out[0], 0.0);  // missing a: no reach across into observed rows
}

TEST(MonotoneTest, CumulativeSquares) {
  // raw[0] is the missing bin.
  EXPECT_EQ(monotone_output(std::vector<double>{0, 1, 2, 3}, 1, 0.0),
            (std::vector<double>{0, 1, 5, 14}));
  EXPECT_EQ(monotone_output(std::vector<double>{0, 1, 1}, -1, 0.0), (std::vector<double>{0, -1, -2}));
  EXPECT_EQ(monotone_output(std::vector<double>{0, 0, 0}, 1, 2.5), (std::vector<double>{2.5, 2.5, 2.5}));
}

TEST(MlpTest, IdentityActivationIsAffine) {
  MlpShape shape{2, {3}, 1, Activation::kIdentity};
  std::vector<double> params(shape.parameter_count());
  Rng rng(1);
  mlp_initialize(shape, params, rng, false);
  auto eval = [&](double a, double b) {
    std::vector<double> in{a, b}, out(1);
    MlpTrace trace;
    mlp_forward(shape, params, in, 1, trace, out);
    return out[0];
  };
  const double f00 = eval(0, 0), f10 = eval(1, 0), f01 = eval(0, 1);
  EXPECT_NEAR(eval(2.5, -1.5), f00 + 2.5 * (f10 - f00) - 1.5 * (f01 - f00), 1e-12);
}

TEST(MlpTest, ZeroOutputLayerGivesZero) {
  MlpShape shape{4, {5}, 2, Activation::kRelu};
  std::vector<double> params(shape.parameter_count());
  Rng rng(2);
  mlp_initialize(shape, params, rng, true);
  std::vector<double> in{1, -2, 3, 0.5}, out(2);
  MlpTrace trace;
  mlp_forward(shape, params, in, 1, trace, out);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[1], 0.0);
}

// Three features with five bins each, identity activation so central
// differences are exact up to rounding.
struct Toy {
  AdditiveModel model;
  BinnedMatrix x;
  std::vector<std::size_t> rows;
};

Toy MakeToy(std::uint64_t seed, bool last_all_missing) {
  Architecture arch;
  arch.embedding_dim = 3;
  arch.hidden = {4};
  arch.activation = Activation::kIdentity;
  arch.kernel = {2.0, 1};
  Toy toy{AdditiveModel(1, arch, 1.0, 0.25), {}, {}};
  Rng rng(seed);
  for (int j = 0; j < 3; ++j) toy.model.add_main(j, 6);
  toy.model.add_pair(0, 6, 1, 6);
  for (int t = 0; t < toy.model.term_count(); ++t) {
    toy.model.initialize_term(t, rng, false);
    toy.model.set_mu(t, rng.uniform(-0.4, 0.4) * toy.model.term_gamma(t));
  }
  toy.x.n_samples = 16;
  toy.x.columns.assign(3, std::vector<std::int32_t>(16));
  for (int j = 0; j < 3; ++j) {
    for (auto& v : toy.x.columns[j]) v = last_all_missing && j == 2 ? 0 : static_cast<std::int32_t>(rng.below(6));
  }
  toy.rows.resize(16);
  std::iota(toy.rows.begin(), toy.rows.end(), 0);
  return toy;
}

TEST(BackwardTest, MatchesCentralDifferences) {
  Toy toy = MakeToy(3, false);
  Rng rng(4);
  std::vector<double> y(16);
  for (auto& v : y) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  const Logistic objective(y);
  PassOptions pass;
  pass.train_gates = true;
  pass.feature_reg = 0.05;
  pass.pair_reg = 0.02;
  std::vector<double> grads(toy.model.params().size(), 0.0);
  evaluate_batch(toy.model, toy.x, toy.rows, objective, pass, grads);
  const double h = 1e-5;
  for (std::size_t p = 0; p < grads.size(); ++p) {
    const double saved = toy.model.params()[p];
    toy.model.params()[p] = saved + h;
    const double up = evaluate_batch(toy.model, toy.x, toy.rows, objective, pass, {}).total();
    toy.model.params()[p] = saved - h;
    const double down = evaluate_batch(toy.model, toy.x, toy.rows, objective, pass, {}).total();
    toy.model.params()[p] = saved;
    EXPECT_NEAR(grads[p], (up - down) / (2 * h), 1e-7 + 1e-5 * std::abs(grads[p])) << "param " << p;
  }
}

TEST(BackwardTest, AllMissingFeatureTouchesOnlyMissingRow) {
  Toy toy = MakeToy(8, true);
  const SquaredError objective(std::vector<double>(16, 1.0));
  std::vector<double> grads(toy.model.params().size(), 0.0);
  evaluate_batch(toy.model, toy.x, toy.rows, objective, {}, grads);
  const Term& term = toy.model.term(2);
  const int dim = toy.model.architecture().embedding_dim;
  bool missing_row_moved = false;
  for (int r = 0; r < term.rows_a; ++r) {
    for (int c = 0; c < dim; ++c) {
      const double g = grads[term.embedding_offset + r * dim + c];
      if (r == 0) {
        missing_row_moved = missing_row_moved || g != 0.0;
      } else {
        EXPECT_EQ(g, 0.0) << "row " << r;
      }
    }
  }
  EXPECT_TRUE(missing_row_moved);
}

TEST(BackwardTest, SaturatedGateHasZeroGradient) {
  Toy toy = MakeToy(5, false);
  toy.model.set_mu(0, 0.5);   // exactly at gamma/2
  toy.model.set_mu(1, -2.0);  // closed
  const SquaredError objective(std::vector<double>(16, 0.3));
  PassOptions pass;
  pass.train_gates = true;
  std::vector<double> grads(toy.model.params().size(), 0.0);
  evaluate_batch(toy.model, toy.x, toy.rows, objective, pass, grads);
  EXPECT_EQ(grads[toy.model.term(0).gate_offset], 0.0);
  EXPECT_EQ(grads[toy.model.term(1).gate_offset], 0.0);
}

TEST(ForwardTest, ClosedGatesLeaveIntercept) {
  Toy toy = MakeToy(6, false);
  for (int t = 0; t < toy.model.term_count(); ++t) toy.model.set_mu(t, -1.0);
  toy.model.intercept() = {0.75};
  for (double v : compute_eta(toy.model, toy.x, toy.rows)) EXPECT_EQ(v, 0.75);
  toy.model.intercept() = {0.0};
  std::vector<double> eta = compute_eta(toy.model, toy.x, toy.rows);
  apply_link(Task::kClassification, eta);
  for (double p : eta) EXPECT_EQ(p, 0.5);
}

TEST(ForwardTest, SingleOpenTermAddsItsOutput) {
  Toy toy = MakeToy(7, false);
  for (int t = 0; t < toy.model.term_count(); ++t) toy.model.set_mu(t, t == 1 ? 1.0 : -1.0);
  const std::vector<double> table = term_table(toy.model, 1);
  const std::vector<double> eta = compute_eta(toy.model, toy.x, toy.rows);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(eta[i], table[toy.x.at(i, 1)]);
}

}  // namespace
}  // namespace namlite
