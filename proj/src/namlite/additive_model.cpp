#include "namlite/additive_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "namlite/error.hpp"
#include "namlite/gates.hpp"

namespace namlite {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kRegression:
      return "regression";
    case Task::kClassification:
      return "classification";
    case Task::kSurvival:
      return "survival";
  }
  return "regression";
}

Task task_from_string(std::string_view text) {
  if (text == "regression") return Task::kRegression;
  if (text == "classification") return Task::kClassification;
  if (text == "survival") return Task::kSurvival;
  throw ConfigError("unknown task '" + std::string(text) + "'");
}

AdditiveModel::AdditiveModel(int output_dim, Architecture architecture, double gamma,
                             double pair_gamma)
    : output_dim_(output_dim),
      architecture_(std::move(architecture)),
      gamma_(gamma),
      pair_gamma_(pair_gamma) {
  if (output_dim_ < 1) throw ConfigError("output dimension must be positive");
  if (architecture_.embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  for (int h : architecture_.hidden) {
    if (h < 1) throw ConfigError("hidden layer widths must be positive");
  }
  if (!(gamma_ > 0.0) || !(pair_gamma_ > 0.0)) throw ConfigError("gamma must be positive");
  mlp_shape_ = MlpShape{architecture_.embedding_dim, architecture_.hidden, output_dim_,
                        architecture_.activation};
  kernel_weights_ = kernel_weights(architecture_.kernel.size, architecture_.kernel.phi);
  intercept_.assign(output_dim_, 0.0);
}

int AdditiveModel::push_term(Term term) {
  const std::size_t dim = architecture_.embedding_dim;
  term.embedding_offset = params_.size();
  term.mlp_offset = term.embedding_offset + static_cast<std::size_t>(term.cells()) * dim;
  term.gate_offset = term.mlp_offset + mlp_shape_.parameter_count();
  term.monotone_offset = term.gate_offset + 1;
  term.end_offset = term.monotone_offset + 1;
  params_.resize(term.end_offset, 0.0);
  terms_.push_back(term);
  centering_.emplace_back(output_dim_, 0.0);
  return static_cast<int>(terms_.size()) - 1;
}

int AdditiveModel::add_main(int feature, int rows, int monotone) {
  if (rows < 2) throw ConfigError("a feature needs at least one non-missing bin");
  if (monotone < -1 || monotone > 1) throw ConfigError("monotone direction must be -1, 0 or 1");
  if (monotone != 0 && output_dim_ != 1) {
    throw ConfigError("monotone constraints need a single-output task");
  }
  Term term;
  term.feature_a = feature;
  term.rows_a = rows;
  term.monotone = monotone;
  return push_term(term);
}

int AdditiveModel::add_pair(int feature_a, int rows_a, int feature_b, int rows_b) {
  if (rows_a < 2 || rows_b < 2) throw ConfigError("a feature needs at least one non-missing bin");
  Term term;
  term.feature_a = feature_a;
  term.feature_b = feature_b;
  term.rows_a = rows_a;
  term.rows_b = rows_b;
  return push_term(term);
}

void AdditiveModel::initialize_term(int index, Rng& rng, bool zero_output_layer) {
  const Term& t = terms_[index];
  const double bound = 1.0 / std::sqrt(static_cast<double>(architecture_.embedding_dim));
  for (std::size_t i = t.embedding_offset; i < t.mlp_offset; ++i) params_[i] = rng.uniform(-bound, bound);
  // Monotone outputs are o + sum r^2, so r = 0 is a stationary point; those
  // terms keep a random output layer.
  mlp_initialize(mlp_shape_,
                 std::span<double>(params_).subspan(t.mlp_offset, mlp_shape_.parameter_count()),
                 rng, zero_output_layer && t.monotone == 0);
  params_[t.monotone_offset] = 0.0;
}

int AdditiveModel::main_count() const {
  return static_cast<int>(
      std::count_if(terms_.begin(), terms_.end(), [](const Term& t) { return !t.is_pair(); }));
}

std::span<const double> AdditiveModel::term_params(int term) const {
  const Term& t = terms_[term];
  return std::span<const double>(params_).subspan(t.begin_offset(), t.end_offset - t.begin_offset());
}

double AdditiveModel::gate(int term) const { return smooth_step(mu(term), term_gamma(term)); }

double AdditiveModel::gate_grad(int term) const {
  return smooth_step_grad(mu(term), term_gamma(term));
}

std::vector<int> all_cells(const Term& term) {
  std::vector<int> cells(term.cells());
  std::iota(cells.begin(), cells.end(), 0);
  return cells;
}

std::vector<double> monotone_output(std::span<const double> raw, int direction, double offset) {
  if (direction != 1 && direction != -1) throw ConfigError("monotone direction must be -1 or 1");
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  out[0] = offset + raw[0];
  double running = 0.0;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    running += raw[i] * raw[i];
    out[i] = offset + direction * running;
  }
  return out;
}

void term_forward(const AdditiveModel& model, int index, std::vector<int> cells, TermPass& pass) {
  const Term& t = model.term(index);
  const int dim = model.architecture().embedding_dim;
  const int out = model.output_dim();
  const auto& params = model.params();
  const std::span<const double> table(params.data() + t.embedding_offset,
                                      static_cast<std::size_t>(t.cells()) * dim);
  const auto weights = model.kernel();

  if (t.monotone != 0 && static_cast<int>(cells.size()) != t.cells()) {
    throw std::logic_error("monotone terms must be evaluated on every bin");
  }
  pass.cells = std::move(cells);
  const int n = static_cast<int>(pass.cells.size());
  pass.smoothed.assign(static_cast<std::size_t>(n) * dim, 0.0);
  for (int c = 0; c < n; ++c) {
    std::span<double> dst(pass.smoothed.data() + static_cast<std::size_t>(c) * dim, dim);
    const int cell = pass.cells[c];
    if (t.is_pair()) {
      pair_smoothed_embedding(table, t.rows_a, t.rows_b, dim, cell / t.rows_b, cell % t.rows_b,
                              weights, dst);
    } else {
      smoothed_embedding(table, t.rows_a, dim, cell, weights, dst);
    }
  }
  pass.raw.assign(static_cast<std::size_t>(n) * out, 0.0);
  mlp_forward(model.mlp_shape(),
              std::span<const double>(params).subspan(t.mlp_offset, model.mlp_shape().parameter_count()),
              pass.smoothed, n, pass.trace, pass.raw);
  if (t.monotone != 0) {
    pass.output = monotone_output(pass.raw, t.monotone, params[t.monotone_offset]);
  } else {
    pass.output = pass.raw;
  }
}

void term_backward(const AdditiveModel& model, int index, const TermPass& pass,
                   std::span<const double> grad_output, std::span<double> grads) {
  const Term& t = model.term(index);
  const int dim = model.architecture().embedding_dim;
  const int n = static_cast<int>(pass.cells.size());
  const auto& params = model.params();

  std::vector<double> grad_raw(grad_output.begin(), grad_output.begin() + pass.raw.size());
  if (t.monotone != 0) {
    // out_i = o + dir * sum_{m=1..i} r_m^2 for i >= 1, out_0 = o + r_0.
    double offset_grad = 0.0;
    for (double g : grad_output.first(pass.raw.size())) offset_grad += g;
    grads[t.monotone_offset] += offset_grad;
    double tail = 0.0;
    for (int i = n - 1; i >= 1; --i) {
      tail += grad_output[i];
      grad_raw[i] = t.monotone * 2.0 * pass.raw[i] * tail;
    }
    grad_raw[0] = grad_output[0];
  }

  std::vector<double> grad_smoothed(static_cast<std::size_t>(n) * dim, 0.0);
  const std::size_t mlp_size = model.mlp_shape().parameter_count();
  mlp_backward(model.mlp_shape(), std::span<const double>(params).subspan(t.mlp_offset, mlp_size),
               pass.trace, grad_raw, grads.subspan(t.mlp_offset, mlp_size), grad_smoothed);

  const auto weights = model.kernel();
  std::span<double> table_grad = grads.subspan(t.embedding_offset, static_cast<std::size_t>(t.cells()) * dim);
  for (int c = 0; c < n; ++c) {
    std::span<const double> g(grad_smoothed.data() + static_cast<std::size_t>(c) * dim, dim);
    const int cell = pass.cells[c];
    if (t.is_pair()) {
      pair_smoothed_embedding_backward(table_grad, t.rows_a, t.rows_b, dim, cell / t.rows_b,
                                       cell % t.rows_b, weights, g);
    } else {
      smoothed_embedding_backward(table_grad, t.rows_a, dim, cell, weights, g);
    }
  }
}

std::vector<double> term_table(const AdditiveModel& model, int term) {
  TermPass pass;
  term_forward(model, term, all_cells(model.term(term)), pass);
  return std::move(pass.output);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void apply_link(Task task, std::span<double> values) {
  if (task == Task::kRegression) return;
  for (double& v : values) v = sigmoid(v);
}

}  // namespace namlite
