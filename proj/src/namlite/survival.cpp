#include "namlite/survival.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "namlite/error.hpp"

namespace namlite {
namespace {

StepSurvivalCurve product_limit(std::span<const SurvivalLabel> labels, bool flip) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a].time < labels[b].time; });
  std::vector<double> times;
  std::vector<double> values;
  double at_risk = static_cast<double>(labels.size());
  double survival = 1.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = labels[order[i]].time;
    double events = 0.0;
    double removed = 0.0;
    for (; i < order.size() && labels[order[i]].time == t; ++i) {
      if (labels[order[i]].event != flip) events += 1.0;
      removed += 1.0;
    }
    if (events > 0.0) {
      survival *= 1.0 - events / at_risk;
      times.push_back(t);
      values.push_back(survival);
    }
    at_risk -= removed;
  }
  return StepSurvivalCurve(std::move(times), std::move(values));
}

}  // namespace

StepSurvivalCurve::StepSurvivalCurve(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) throw std::invalid_argument("curve size mismatch");
}

double StepSurvivalCurve::at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepSurvivalCurve::left_limit(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

StepSurvivalCurve kaplan_meier(std::span<const SurvivalLabel> labels) {
  return product_limit(labels, false);
}

StepSurvivalCurve censoring_kaplan_meier(std::span<const SurvivalLabel> labels) {
  return product_limit(labels, true);
}

std::vector<double> eval_time_grid(std::span<const SurvivalLabel> labels, int n_times) {
  if (n_times < 1) throw ConfigError("the evaluation grid needs at least one time");
  std::vector<double> events;
  for (const auto& l : labels) {
    if (l.event) events.push_back(l.time);
  }
  if (events.empty()) throw DataError("no uncensored events: cannot build an evaluation grid");
  std::sort(events.begin(), events.end());
  // Order statistic at 1-based position p * (n + 1), clamped to [1, n] and
  // linearly interpolated.
  const double n = static_cast<double>(events.size());
  std::vector<double> grid;
  for (int k = 1; k <= n_times; ++k) {
    const double p = static_cast<double>(k) / (n_times + 1);
    const double pos = std::clamp(p * (n + 1.0), 1.0, n) - 1.0;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, events.size() - 1);
    const double value = events[lo] + (pos - static_cast<double>(lo)) * (events[hi] - events[lo]);
    if (grid.empty() || value > grid.back()) grid.push_back(value);
  }
  return grid;
}

int default_eval_time_count(std::span<const SurvivalLabel> labels) {
  std::set<double> distinct;
  for (const auto& l : labels) {
    if (l.event) distinct.insert(l.time);
  }
  return static_cast<int>(std::min<std::size_t>(50, distinct.size()));
}

double CoxModel::baseline_hazard(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 0.0;
  return cumulative_hazard[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double CoxModel::baseline_hazard_left(double t) const {
  const auto it = std::lower_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 0.0;
  return cumulative_hazard[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double CoxModel::linear_predictor(std::span<const double> x) const {
  double eta = 0.0;
  for (std::size_t j = 0; j < beta.size(); ++j) eta += beta[j] * x[j];
  return eta;
}

double CoxModel::survival(double t, std::span<const double> x) const {
  return std::exp(-baseline_hazard(t) * std::exp(linear_predictor(x)));
}

CoxDerivatives cox_derivatives(std::span<const double> design, std::size_t p,
                               std::span<const SurvivalLabel> labels,
                               std::span<const double> beta) {
  const std::size_t n = labels.size();
  std::vector<double> eta(n, 0.0);
  double max_eta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) eta[i] += design[i * p + j] * beta[j];
    max_eta = i == 0 ? eta[i] : std::max(max_eta, eta[i]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a].time > labels[b].time; });

  CoxDerivatives d;
  d.gradient.assign(p, 0.0);
  d.hessian.assign(p * p, 0.0);
  double s0 = 0.0;
  std::vector<double> s1(p, 0.0);
  std::vector<double> s2(p * p, 0.0);
  std::size_t i = 0;
  while (i < n) {
    const double t = labels[order[i]].time;
    std::size_t group_end = i;
    for (; group_end < n && labels[order[group_end]].time == t; ++group_end) {
      const std::size_t s = order[group_end];
      const double w = std::exp(eta[s] - max_eta);
      s0 += w;
      for (std::size_t a = 0; a < p; ++a) {
        const double xa = design[s * p + a];
        s1[a] += w * xa;
        for (std::size_t b = 0; b < p; ++b) s2[a * p + b] += w * xa * design[s * p + b];
      }
    }
    for (std::size_t g = i; g < group_end; ++g) {
      const std::size_t s = order[g];
      if (!labels[s].event) continue;
      d.log_likelihood += eta[s] - (std::log(s0) + max_eta);
      for (std::size_t a = 0; a < p; ++a) {
        const double mean_a = s1[a] / s0;
        d.gradient[a] += design[s * p + a] - mean_a;
        for (std::size_t b = 0; b < p; ++b) {
          d.hessian[a * p + b] -= s2[a * p + b] / s0 - mean_a * (s1[b] / s0);
        }
      }
    }
    i = group_end;
  }
  return d;
}

CoxModel cox_fit(std::span<const double> design, std::size_t p,
                 std::span<const SurvivalLabel> labels, const CoxOptions& options) {
  const std::size_t n = labels.size();
  if (design.size() != n * p) throw std::invalid_argument("design matrix size mismatch");
  if (std::none_of(labels.begin(), labels.end(), [](const auto& l) { return l.event; })) {
    throw DataError("Cox fit needs at least one event");
  }

  // Constant columns carry no information; they keep a zero coefficient.
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < p; ++j) {
    bool constant = true;
    for (std::size_t i = 1; i < n && constant; ++i) constant = design[i * p + j] == design[j];
    if (!constant) free.push_back(j);
  }
  const std::size_t q = free.size();
  std::vector<double> reduced(n * q);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < q; ++k) reduced[i * q + k] = design[i * p + free[k]];
  }

  CoxModel model;
  std::vector<double> beta(q, 0.0);
  CoxDerivatives d = cox_derivatives(reduced, q, labels, beta);
  auto norm = [](const std::vector<double>& g) {
    double s = 0.0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
  };
  int iteration = 0;
  while (q > 0 && norm(d.gradient) >= options.gradient_tolerance) {
    if (iteration >= options.max_iterations) {
      throw NumericError("Cox fit did not converge in " + std::to_string(options.max_iterations) +
                         " iterations (gradient norm " + std::to_string(norm(d.gradient)) + ")");
    }
    Eigen::MatrixXd info(q, q);
    Eigen::VectorXd grad(q);
    for (std::size_t a = 0; a < q; ++a) {
      grad(a) = d.gradient[a];
      for (std::size_t b = 0; b < q; ++b) info(a, b) = -d.hessian[a * q + b];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-10 * std::max(1.0, info.diagonal().maxCoeff())) {
      throw DataError("Cox design matrix is rank deficient");
    }
    const Eigen::VectorXd step = llt.solve(grad);
    double scale = 1.0;
    CoxDerivatives trial;
    std::vector<double> candidate(q);
    for (int halving = 0; halving < 40; ++halving) {
      for (std::size_t a = 0; a < q; ++a) candidate[a] = beta[a] + scale * step(a);
      trial = cox_derivatives(reduced, q, labels, candidate);
      if (trial.log_likelihood >= d.log_likelihood - 1e-12 * std::abs(d.log_likelihood)) break;
      scale *= 0.5;
    }
    beta = candidate;
    d = std::move(trial);
    ++iteration;
  }

  model.beta.assign(p, 0.0);
  for (std::size_t k = 0; k < q; ++k) model.beta[free[k]] = beta[k];
  model.iterations = iteration;
  model.gradient_norm = norm(d.gradient);
  model.log_likelihood = d.log_likelihood;

  // Breslow baseline: dLambda(t) = d(t) / sum_{risk set} exp(x beta).
  std::vector<double> risk(n);
  for (std::size_t i = 0; i < n; ++i) {
    risk[i] = std::exp(model.linear_predictor(design.subspan(i * p, p)));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a].time < labels[b].time; });
  double at_risk = std::accumulate(risk.begin(), risk.end(), 0.0);
  double cumulative = 0.0;
  std::size_t i = 0;
  while (i < n) {
    const double t = labels[order[i]].time;
    double events = 0.0;
    double leaving = 0.0;
    for (; i < n && labels[order[i]].time == t; ++i) {
      if (labels[order[i]].event) events += 1.0;
      leaving += risk[order[i]];
    }
    if (events > 0.0) {
      cumulative += events / at_risk;
      model.jump_times.push_back(t);
      model.cumulative_hazard.push_back(cumulative);
    }
    at_risk -= leaving;
  }
  return model;
}

CoxCensor::CoxCensor(CoxModel model, std::vector<double> design, std::size_t n_cols)
    : model_(std::move(model)) {
  const std::size_t n = n_cols == 0 ? 0 : design.size() / n_cols;
  risk_.resize(n_cols == 0 ? 0 : n);
  for (std::size_t i = 0; i < risk_.size(); ++i) {
    risk_[i] = std::exp(model_.linear_predictor(std::span<const double>(design).subspan(i * n_cols, n_cols)));
  }
}

double CoxCensor::at(std::size_t sample, double t) const {
  return std::exp(-model_.baseline_hazard(t) * risk_[sample]);
}

double CoxCensor::left_limit(std::size_t sample, double t) const {
  return std::exp(-model_.baseline_hazard_left(t) * risk_[sample]);
}

std::vector<CalibrationPoint> calibration_table(std::span<const double> predicted,
                                                std::span<const SurvivalLabel> labels,
                                                double time, int n_bins) {
  if (n_bins < 2) throw ConfigError("calibration needs at least 2 bins");
  if (predicted.size() != labels.size()) throw std::invalid_argument("prediction/label size mismatch");
  const std::size_t n = predicted.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return predicted[a] < predicted[b]; });

  std::vector<std::vector<std::size_t>> groups;
  const auto bins = static_cast<std::size_t>(n_bins);
  for (std::size_t g = 0; g < bins; ++g) {
    const std::size_t begin = g * n / bins;
    const std::size_t end = (g + 1) * n / bins;
    if (begin == end) continue;
    std::vector<std::size_t> members(order.begin() + static_cast<long>(begin),
                                     order.begin() + static_cast<long>(end));
    const bool constant = predicted[members.front()] == predicted[members.back()];
    if (!groups.empty() && constant) {
      const auto& prev = groups.back();
      if (predicted[prev.front()] == predicted[prev.back()] &&
          predicted[prev.front()] == predicted[members.front()]) {
        groups.back().insert(groups.back().end(), members.begin(), members.end());
        continue;
      }
    }
    groups.push_back(std::move(members));
  }

  std::vector<CalibrationPoint> points;
  for (const auto& members : groups) {
    CalibrationPoint point;
    point.size = members.size();
    std::vector<SurvivalLabel> subset;
    double sum = 0.0;
    for (std::size_t s : members) {
      sum += predicted[s];
      subset.push_back(labels[s]);
    }
    point.mean_predicted = sum / static_cast<double>(members.size());
    point.observed = 1.0 - kaplan_meier(subset).at(time);
    points.push_back(point);
  }
  return points;
}

}  // namespace namlite
