#include "namlite/engine.hpp"

#include <algorithm>
#include <cmath>

#include "namlite/error.hpp"

namespace namlite {
namespace {

bool flag(std::span<const char> flags, int index) {
  return flags.empty() || flags[index] != 0;
}

// Cell list for a term plus the position of each row's cell in that list.
struct CellIndex {
  std::vector<int> cells;
  std::vector<int> position;  // per batch row
};

CellIndex index_cells(const Term& t, const BinnedMatrix& x, std::span<const std::size_t> rows) {
  CellIndex index;
  index.position.resize(rows.size());
  if (!t.is_pair()) {
    index.cells = all_cells(t);
    const auto& col = x.columns[t.feature_a];
    for (std::size_t r = 0; r < rows.size(); ++r) index.position[r] = col[rows[r]];
    return index;
  }
  const auto& col_a = x.columns[t.feature_a];
  const auto& col_b = x.columns[t.feature_b];
  std::vector<int> slot(t.cells(), -1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int cell = col_a[rows[r]] * t.rows_b + col_b[rows[r]];
    if (slot[cell] < 0) {
      slot[cell] = static_cast<int>(index.cells.size());
      index.cells.push_back(cell);
    }
    index.position[r] = slot[cell];
  }
  return index;
}

struct ActiveTerm {
  int term;
  CellIndex index;
  TermPass pass;
};

std::vector<ActiveTerm> forward_terms(const AdditiveModel& model, const BinnedMatrix& x,
                                      std::span<const std::size_t> rows,
                                      const PassOptions& options, std::vector<double>& eta) {
  const int out = model.output_dim();
  eta.assign(rows.size() * out, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int o = 0; o < out; ++o) {
      double v = model.intercept()[o];
      if (!options.base_eta.empty()) v += options.base_eta[rows[r] * out + o];
      eta[r * out + o] = v;
    }
  }
  std::vector<ActiveTerm> active;
  for (int t = 0; t < model.term_count(); ++t) {
    if (!flag(options.active, t)) continue;
    const double gate = model.gate(t);
    ActiveTerm at{t, index_cells(model.term(t), x, rows), {}};
    term_forward(model, t, at.index.cells, at.pass);
    const auto& centering = model.centering(t);
    if (gate != 0.0) {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const double* f = at.pass.output.data() + static_cast<std::size_t>(at.index.position[r]) * out;
        for (int o = 0; o < out; ++o) eta[r * out + o] += gate * (f[o] - centering[o]);
      }
    }
    active.push_back(std::move(at));
  }
  return active;
}

}  // namespace

std::vector<double> compute_eta(const AdditiveModel& model, const BinnedMatrix& x,
                                std::span<const std::size_t> rows, const PassOptions& options) {
  std::vector<double> eta;
  forward_terms(model, x, rows, options, eta);
  return eta;
}

BatchResult evaluate_batch(const AdditiveModel& model, const BinnedMatrix& x,
                           std::span<const std::size_t> rows, const Objective& objective,
                           const PassOptions& options, std::span<double> grads) {
  const int out = model.output_dim();
  std::vector<double> eta;
  std::vector<ActiveTerm> active = forward_terms(model, x, rows, options, eta);

  BatchResult result;
  const bool want_grad = !grads.empty();
  std::vector<double> grad_eta(want_grad ? eta.size() : 0);
  result.data_loss = objective.evaluate(rows, eta, grad_eta);
  if (!std::isfinite(result.data_loss)) throw NumericError("non-finite loss during training");

  if (options.train_gates) {
    for (const auto& at : active) {
      const double reg = model.term(at.term).is_pair() ? options.pair_reg : options.feature_reg;
      result.penalty += reg * model.gate(at.term);
    }
  }
  if (!want_grad) return result;

  for (const auto& at : active) {
    if (!flag(options.trainable, at.term)) continue;
    const Term& t = model.term(at.term);
    const double gate = model.gate(at.term);
    const auto& centering = model.centering(at.term);

    if (options.train_gates) {
      const double slope = model.gate_grad(at.term);
      if (slope != 0.0) {
        double inner = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const double* f = at.pass.output.data() + static_cast<std::size_t>(at.index.position[r]) * out;
          for (int o = 0; o < out; ++o) inner += (f[o] - centering[o]) * grad_eta[r * out + o];
        }
        const double reg = t.is_pair() ? options.pair_reg : options.feature_reg;
        grads[t.gate_offset] += slope * (inner + reg);
      }
    }
    if (gate == 0.0) continue;
    std::vector<double> grad_output(at.pass.output.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double* g = grad_output.data() + static_cast<std::size_t>(at.index.position[r]) * out;
      for (int o = 0; o < out; ++o) g[o] += gate * grad_eta[r * out + o];
    }
    term_backward(model, at.term, at.pass, grad_output, grads);
  }
  for (double g : grads) {
    if (!std::isfinite(g)) throw NumericError("non-finite gradient during training");
  }
  return result;
}

}  // namespace namlite
