#ifndef NAMLITE_ADDITIVE_MODEL_HPP
#define NAMLITE_ADDITIVE_MODEL_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "namlite/kernel.hpp"
#include "namlite/mlp.hpp"
#include "namlite/rng.hpp"

namespace namlite {

enum class Task { kRegression, kClassification, kSurvival };

std::string_view to_string(Task task);
Task task_from_string(std::string_view text);

// Architecture hyperparameters shared by every term of a model.
struct Architecture {
  int embedding_dim = 16;
  std::vector<int> hidden{32};
  Activation activation = Activation::kRelu;
  KernelConfig kernel;

  bool operator==(const Architecture&) const = default;
};

// One additive term: a main effect over one feature or an interaction over
// two. Offsets index the model's flat parameter vector.
struct Term {
  int feature_a = -1;
  int feature_b = -1;  // -1 for main effects
  int rows_a = 0;      // index space of feature_a (n_bins + 1)
  int rows_b = 1;      // index space of feature_b, 1 for main effects
  int monotone = 0;    // -1, 0 or +1; main effects with one output only

  std::size_t embedding_offset = 0;  // cells x dim
  std::size_t mlp_offset = 0;
  std::size_t gate_offset = 0;      // gate parameter mu
  std::size_t monotone_offset = 0;  // learnable offset o_j when monotone != 0
  std::size_t end_offset = 0;

  bool is_pair() const { return feature_b >= 0; }
  int cells() const { return rows_a * rows_b; }
  std::size_t begin_offset() const { return embedding_offset; }
};

// Parameters of one additive model:
//
//   eta = intercept + sum_t s(mu_t) * (f_t(x) - centering_t)
//
// where f_t is an MLP applied to the kernel-smoothed bin embedding, gated by
// the smooth-step s. Before finalization the intercept and the centering
// constants are zero.
class AdditiveModel {
 public:
  AdditiveModel() = default;
  AdditiveModel(int output_dim, Architecture architecture, double gamma, double pair_gamma);

  int add_main(int feature, int rows, int monotone = 0);
  int add_pair(int feature_a, int rows_a, int feature_b, int rows_b);

  // Draws embeddings and hidden weights; zeroes the output layer (unless told
  // otherwise, and never for monotone terms) and the monotone offset. Leaves
  // mu untouched.
  void initialize_term(int term, Rng& rng, bool zero_output_layer = true);

  int output_dim() const { return output_dim_; }
  const Architecture& architecture() const { return architecture_; }
  const MlpShape& mlp_shape() const { return mlp_shape_; }
  std::span<const double> kernel() const { return kernel_weights_; }

  double gamma() const { return gamma_; }
  double pair_gamma() const { return pair_gamma_; }
  double term_gamma(int term) const { return terms_[term].is_pair() ? pair_gamma_ : gamma_; }

  const std::vector<Term>& terms() const { return terms_; }
  const Term& term(int index) const { return terms_[index]; }
  int term_count() const { return static_cast<int>(terms_.size()); }
  int main_count() const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::span<const double> term_params(int term) const;

  double mu(int term) const { return params_[terms_[term].gate_offset]; }
  void set_mu(int term, double mu) { params_[terms_[term].gate_offset] = mu; }
  double gate(int term) const;
  double gate_grad(int term) const;

  std::vector<double>& intercept() { return intercept_; }
  const std::vector<double>& intercept() const { return intercept_; }
  std::vector<double>& centering(int term) { return centering_[term]; }
  const std::vector<double>& centering(int term) const { return centering_[term]; }

 private:
  int push_term(Term term);

  int output_dim_ = 1;
  Architecture architecture_;
  MlpShape mlp_shape_;
  std::vector<double> kernel_weights_;
  double gamma_ = 1.0;
  double pair_gamma_ = 0.25;
  std::vector<Term> terms_;
  std::vector<double> params_;
  std::vector<double> intercept_;
  std::vector<std::vector<double>> centering_;
};

// Forward state of one term evaluated on a set of cells.
struct TermPass {
  std::vector<int> cells;        // main: bin index; pair: index_a * rows_b + index_b
  std::vector<double> smoothed;  // cells x dim
  MlpTrace trace;
  std::vector<double> raw;     // cells x out, network output
  std::vector<double> output;  // cells x out, after the monotone transform
};

// Evaluates a term on `cells`. Main effects must be evaluated on every bin
// (0..rows-1 in order) because the monotone transform is cumulative; use
// all_cells() for that.
void term_forward(const AdditiveModel& model, int term, std::vector<int> cells, TermPass& pass);

// Accumulates d(loss)/d(params) for the term given d(loss)/d(output).
void term_backward(const AdditiveModel& model, int term, const TermPass& pass,
                   std::span<const double> grad_output, std::span<double> grads);

std::vector<int> all_cells(const Term& term);

// Raw (ungated, uncentered) outputs on every cell, cells x out.
std::vector<double> term_table(const AdditiveModel& model, int term);

// Monotone transform of raw per-bin outputs r_0..r_{B}: bin 0 (missing) maps to
// offset + r_0; bin i >= 1 maps to offset + direction * sum_{m=1..i} r_m^2.
std::vector<double> monotone_output(std::span<const double> raw, int direction, double offset);

// Link applied to an unlinked prediction: identity, sigmoid or element-wise
// sigmoid.
double sigmoid(double x);
void apply_link(Task task, std::span<double> values);

}  // namespace namlite

#endif  // NAMLITE_ADDITIVE_MODEL_HPP
