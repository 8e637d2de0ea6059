#include "namlite/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "namlite/error.hpp"

namespace namlite {
namespace {

constexpr std::size_t kEvalChunk = 2048;

std::vector<ParamRange> collect_ranges(const AdditiveModel& model, std::span<const char> active,
                                       std::span<const char> trainable, bool with_gate) {
  std::vector<ParamRange> ranges;
  for (int t = 0; t < model.term_count(); ++t) {
    if (!active.empty() && !active[t]) continue;
    if (!trainable.empty() && !trainable[t]) continue;
    const auto r = term_ranges(model, t, with_gate);
    ranges.insert(ranges.end(), r.begin(), r.end());
  }
  return ranges;
}

void zero_ranges(std::vector<double>& grads, std::span<const ParamRange> ranges) {
  for (const auto& [begin, end] : ranges) {
    std::fill(grads.begin() + static_cast<long>(begin), grads.begin() + static_cast<long>(end), 0.0);
  }
}

int count_active(std::span<const char> active, int n_terms) {
  if (active.empty()) return n_terms;
  return static_cast<int>(std::count(active.begin(), active.end(), 1));
}

}  // namespace

Adam::Adam(std::size_t n_params, AdamConfig config)
    : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {
  if (!(config_.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

void Adam::reset() {
  std::fill(m_.begin(), m_.end(), 0.0);
  std::fill(v_.begin(), v_.end(), 0.0);
  step_ = 0;
}

void Adam::step(std::span<double> params, std::span<const double> grads,
                std::span<const ParamRange> ranges) {
  ++step_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  const double lr = config_.learning_rate;
  for (const auto& [begin, end] : ranges) {
    for (std::size_t i = begin; i < end; ++i) {
      const double g = grads[i];
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.epsilon);
    }
  }
}

std::vector<ParamRange> term_ranges(const AdditiveModel& model, int term, bool with_gate) {
  const Term& t = model.term(term);
  if (with_gate) return {{t.begin_offset(), t.end_offset}};
  std::vector<ParamRange> ranges{{t.begin_offset(), t.gate_offset}};
  if (t.monotone != 0) ranges.emplace_back(t.monotone_offset, t.end_offset);
  return ranges;
}

double dataset_loss(const AdditiveModel& model, const BinnedMatrix& x,
                    std::span<const std::size_t> rows, const Objective& objective,
                    const PassOptions& options) {
  if (rows.empty()) return 0.0;
  PassOptions plain = options;
  plain.train_gates = false;
  double total = 0.0;
  for (std::size_t begin = 0; begin < rows.size(); begin += kEvalChunk) {
    const std::size_t len = std::min(kEvalChunk, rows.size() - begin);
    const auto chunk = rows.subspan(begin, len);
    total += evaluate_batch(model, x, chunk, objective, plain, {}).data_loss *
             static_cast<double>(len);
  }
  return total / static_cast<double>(rows.size());
}

TrainResult train_early_stopping(AdditiveModel& model, const BinnedMatrix& x,
                                 std::span<const std::size_t> train,
                                 std::span<const std::size_t> validation,
                                 const Objective& objective, const TrainOptions& options,
                                 const PassOptions& pass, Rng& rng) {
  if (options.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (options.max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
  PassOptions fixed = pass;
  fixed.train_gates = false;

  TrainResult result;
  result.best_epoch = 0;
  result.best_val_loss = dataset_loss(model, x, validation, objective, fixed);
  if (options.max_epochs == 0 || train.empty()) return result;

  const auto ranges = collect_ranges(model, fixed.active, fixed.trainable, false);
  Adam adam(model.params().size(), options.adam);
  std::vector<double> grads(model.params().size(), 0.0);
  std::vector<double> best = model.params();
  std::vector<std::size_t> order(train.begin(), train.end());
  int since_best = 0;
  const auto batch = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    rng.shuffle(order);
    double train_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t len = std::min(batch, order.size() - begin);
      const std::span<const std::size_t> rows(order.data() + begin, len);
      zero_ranges(grads, ranges);
      const BatchResult r = evaluate_batch(model, x, rows, objective, fixed, grads);
      train_sum += r.total() * static_cast<double>(len);
      adam.step(model.params(), grads, ranges);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_sum / static_cast<double>(order.size());
    record.val_loss = dataset_loss(model, x, validation, objective, fixed);
    record.active_terms = count_active(fixed.active, model.term_count());
    result.history.push_back(record);
    if (!std::isfinite(record.val_loss)) throw NumericError("validation loss is not finite");
    if (record.val_loss < result.best_val_loss) {
      result.best_val_loss = record.val_loss;
      result.best_epoch = epoch;
      best = model.params();
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }
  model.params() = std::move(best);
  return result;
}

TrainResult train_gated(AdditiveModel& model, const BinnedMatrix& x,
                        std::span<const std::size_t> train,
                        std::span<const std::size_t> validation, const Objective& objective,
                        const TrainOptions& options, const GatedTraining& gated,
                        std::vector<char>& active, Rng& rng) {
  if (options.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (gated.feature_reg < 0.0 || gated.pair_reg < 0.0) {
    throw ConfigError("regularization parameters must be non-negative");
  }
  if (active.size() != static_cast<std::size_t>(model.term_count())) {
    throw std::invalid_argument("active flags do not match the model");
  }
  PassOptions pass;
  pass.active = active;
  pass.trainable = gated.trainable;
  pass.train_gates = true;
  pass.feature_reg = gated.feature_reg;
  pass.pair_reg = gated.pair_reg;
  pass.base_eta = gated.base_eta;

  auto trainable = [&](int t) { return gated.trainable.empty() || gated.trainable[t]; };
  auto saturated = [&]() {
    for (int t = 0; t < model.term_count(); ++t) {
      if (active[t] && trainable(t) && model.gate_grad(t) != 0.0) return false;
    }
    return true;
  };

  TrainResult result;
  Adam adam(model.params().size(), options.adam);
  std::vector<double> grads(model.params().size(), 0.0);
  std::vector<std::size_t> order(train.begin(), train.end());
  auto ranges = collect_ranges(model, active, gated.trainable, true);
  const auto batch = static_cast<std::size_t>(options.batch_size);

  for (int epoch = 1; epoch <= options.max_epochs && !train.empty(); ++epoch) {
    if (saturated()) break;
    rng.shuffle(order);
    double train_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t len = std::min(batch, order.size() - begin);
      const std::span<const std::size_t> rows(order.data() + begin, len);
      zero_ranges(grads, ranges);
      const BatchResult r = evaluate_batch(model, x, rows, objective, pass, grads);
      train_sum += r.total() * static_cast<double>(len);
      adam.step(model.params(), grads, ranges);
      bool pruned = false;
      for (int t = 0; t < model.term_count(); ++t) {
        if (active[t] && trainable(t) && model.gate(t) == 0.0) {
          active[t] = 0;
          pruned = true;
        }
      }
      if (pruned) ranges = collect_ranges(model, active, gated.trainable, true);
    }
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_sum / static_cast<double>(order.size());
    record.val_loss = dataset_loss(model, x, validation, objective, pass);
    record.active_terms = count_active(active, model.term_count());
    result.history.push_back(record);
  }
  result.best_epoch = result.history.empty() ? -1 : result.history.back().epoch;
  result.best_val_loss = result.history.empty()
                             ? dataset_loss(model, x, validation, objective, pass)
                             : result.history.back().val_loss;
  return result;
}

std::vector<std::vector<std::int64_t>> term_counts(const AdditiveModel& model,
                                                   const BinnedMatrix& x,
                                                   std::span<const std::size_t> rows) {
  std::vector<std::vector<std::int64_t>> counts;
  for (const Term& t : model.terms()) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(t.cells()), 0);
    const auto& a = x.columns[t.feature_a];
    if (t.is_pair()) {
      const auto& b = x.columns[t.feature_b];
      for (std::size_t r : rows) ++c[static_cast<std::size_t>(a[r] * t.rows_b + b[r])];
    } else {
      for (std::size_t r : rows) ++c[static_cast<std::size_t>(a[r])];
    }
    counts.push_back(std::move(c));
  }
  return counts;
}

void finalize(AdditiveModel& model, std::span<const std::vector<std::int64_t>> counts) {
  const int out = model.output_dim();
  std::fill(model.intercept().begin(), model.intercept().end(), 0.0);
  for (int t = 0; t < model.term_count(); ++t) {
    auto& centering = model.centering(t);
    std::fill(centering.begin(), centering.end(), 0.0);
    const double gate = model.gate(t);
    const auto& c = counts[t];
    std::int64_t total = 0;
    for (auto v : c) total += v;
    if (gate == 0.0 || total == 0) continue;
    const std::vector<double> table = term_table(model, t);
    for (std::size_t cell = 0; cell < c.size(); ++cell) {
      if (c[cell] == 0) continue;
      for (int o = 0; o < out; ++o) {
        centering[o] += static_cast<double>(c[cell]) * table[cell * out + o];
      }
    }
    for (int o = 0; o < out; ++o) {
      centering[o] *= gate / static_cast<double>(total);
      model.intercept()[o] += centering[o];
    }
  }
}

}  // namespace namlite
