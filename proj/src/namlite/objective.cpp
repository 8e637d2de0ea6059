#include "namlite/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "namlite/additive_model.hpp"
#include "namlite/error.hpp"

namespace namlite {
namespace {

void check_binary(double y) {
  if (y != 0.0 && y != 1.0) throw ConfigError("classification targets must be 0 or 1");
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

double loss_mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw std::invalid_argument("size mismatch");
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - target[i]) * (pred[i] - target[i]);
  return sum / static_cast<double>(pred.size());
}

double loss_bce(std::span<const double> prob, std::span<const double> target) {
  if (prob.size() != target.size()) throw std::invalid_argument("size mismatch");
  if (prob.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    check_binary(target[i]);
    const double p = target[i] == 1.0 ? prob[i] : 1.0 - prob[i];
    sum -= std::log(p);
  }
  return sum / static_cast<double>(prob.size());
}

IpcwTerms ipcw_terms(std::span<const SurvivalLabel> labels, std::span<const double> times,
                     const CensorSurvival& censor) {
  IpcwTerms terms;
  terms.n_times = times.size();
  terms.target.assign(labels.size() * times.size(), 0.0);
  terms.weight.assign(labels.size() * times.size(), 0.0);
  auto inverse = [&](double g) {
    if (g < kMinCensorSurvival) {
      ++terms.clamped;
      g = kMinCensorSurvival;
    }
    return 1.0 / g;
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double z = labels[i].time;
    // G(Z-) does not depend on k; evaluate lazily once.
    double event_weight = -1.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const std::size_t at = i * times.size() + k;
      if (z > times[k]) {
        terms.weight[at] = inverse(censor.at(i, times[k]));
      } else if (labels[i].event) {
        if (event_weight < 0.0) event_weight = inverse(censor.left_limit(i, z));
        terms.weight[at] = event_weight;
        terms.target[at] = 1.0;
      }
    }
  }
  return terms;
}

double loss_ipcw(std::span<const double> cdf, std::span<const SurvivalLabel> labels,
                 std::span<const double> times, const CensorSurvival& censor) {
  if (cdf.size() != labels.size() * times.size()) throw std::invalid_argument("size mismatch");
  if (cdf.empty()) return 0.0;
  const IpcwTerms terms = ipcw_terms(labels, times, censor);
  double sum = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const double r = cdf[i] - terms.target[i];
    sum += terms.weight[i] * r * r;
  }
  return sum / static_cast<double>(cdf.size());
}

double SquaredError::evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                              std::span<double> grad) const {
  if (rows.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size());
  double sum = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double residual = eta[r] - targets_[rows[r]];
    sum += residual * residual;
    if (!grad.empty()) grad[r] = 2.0 * residual * scale;
  }
  return sum * scale;
}

Logistic::Logistic(std::vector<double> targets) : targets_(std::move(targets)) {
  for (double y : targets_) check_binary(y);
}

double Logistic::evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                          std::span<double> grad) const {
  if (rows.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(rows.size());
  double sum = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double y = targets_[rows[r]];
    // -[y log s(x) + (1-y) log(1-s(x))] = softplus(x) - y x
    sum += softplus(eta[r]) - y * eta[r];
    if (!grad.empty()) grad[r] = (sigmoid(eta[r]) - y) * scale;
  }
  return sum * scale;
}

double IpcwBrier::evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                           std::span<double> grad) const {
  if (rows.empty()) return 0.0;
  const std::size_t k_times = terms_.n_times;
  const double scale = 1.0 / static_cast<double>(rows.size() * k_times);
  double sum = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < k_times; ++k) {
      const std::size_t src = rows[r] * k_times + k;
      const double w = terms_.weight[src];
      const double p = sigmoid(eta[r * k_times + k]);
      const double residual = p - terms_.target[src];
      sum += w * residual * residual;
      if (!grad.empty()) grad[r * k_times + k] = 2.0 * w * residual * p * (1.0 - p) * scale;
    }
  }
  return sum * scale;
}

}  // namespace namlite
