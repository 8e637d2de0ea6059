#include "testkit/synthetic.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "namlite/rng.hpp"

namespace namlite::testing {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string name(const char* prefix, int i) { return prefix + std::to_string(i); }

Labels regression_labels(std::vector<double> y) {
  Labels l;
  l.task = Task::kRegression;
  l.targets = std::move(y);
  return l;
}

Labels classification_labels(std::vector<double> y) {
  Labels l;
  l.task = Task::kClassification;
  l.targets = std::move(y);
  return l;
}

}  // namespace

double truth_x1(double x) { return std::sin(2.0 * M_PI * x); }
double truth_x2(double x) { return x > 0.5 ? 1.0 : 0.0; }
double truth_x3(double x) { return 0.5 * x; }
double truth_x4(double x) { return (2.0 * x - 1.0) * (2.0 * x - 1.0); }
double truth_x5(double x) { return -0.6 * x; }

Synthetic additive_regression(std::size_t n, std::uint64_t seed, int informative, int noise) {
  Rng rng(seed);
  const int p = informative + noise;
  std::vector<std::vector<double>> x(p, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x[j][i] = rng.uniform();
    double v = truth_x1(x[0][i]) + truth_x2(x[1][i]) + truth_x3(x[2][i]);
    if (informative >= 5) v += truth_x4(x[3][i]) + truth_x5(x[4][i]);
    y[i] = v + 0.1 * rng.normal();
  }
  std::vector<Column> cols;
  for (int j = 0; j < p; ++j) cols.push_back(Column::numeric(name("x", j + 1), x[j]));
  return {Table(std::move(cols)), regression_labels(std::move(y))};
}

Synthetic xor_classification(std::size_t n, std::uint64_t seed, int noise) {
  Rng rng(seed);
  const int p = 2 + noise;
  std::vector<std::vector<double>> x(p, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x[j][i] = rng.uniform(-1.0, 1.0);
    bool label = (x[0][i] > 0.0) != (x[1][i] > 0.0);
    if (rng.bernoulli(0.05)) label = !label;
    y[i] = label ? 1.0 : 0.0;
  }
  std::vector<Column> cols;
  for (int j = 0; j < p; ++j) cols.push_back(Column::numeric(name("x", j + 1), x[j]));
  return {Table(std::move(cols)), classification_labels(std::move(y))};
}

Synthetic monotone_classification(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), x3(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = rng.uniform();
    x2[i] = rng.uniform();
    x3[i] = rng.uniform();
    const double logit = 3.0 * std::tanh(3.0 * (x1[i] - 0.5)) - 2.0 * x2[i] * x2[i] +
                         std::sin(2.0 * M_PI * x3[i]) + 0.5;
    y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1.0 : 0.0;
  }
  return {Table({Column::numeric("x1", x1), Column::numeric("x2", x2), Column::numeric("x3", x3)}),
          classification_labels(std::move(y))};
}

Synthetic missing_classification(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x1(n), x2(n), x3(n), y(n);
  std::vector<std::vector<double>> noise(4, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = rng.normal();
    x2[i] = rng.normal();
    x3[i] = rng.normal();
    const double logit = 0.3 * x1[i] + 1.2 * x2[i] + 0.6 * x3[i];
    y[i] = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1.0 : 0.0;
    if (rng.bernoulli(y[i] > 0.5 ? 0.5 : 0.1)) x1[i] = kNaN;
    for (auto& col : noise) col[i] = rng.bernoulli(0.3) ? kNaN : rng.normal();
  }
  std::vector<Column> cols{Column::numeric("x1", x1), Column::numeric("x2", x2), Column::numeric("x3", x3)};
  for (int j = 0; j < 4; ++j) cols.push_back(Column::numeric(name("n", j + 1), noise[j]));
  return {Table(std::move(cols)), classification_labels(std::move(y))};
}

double exponential_survival_rate(double x1, double x2) { return 0.5 * std::exp(1.2 * x1 - 0.8 * x2); }

Synthetic exponential_survival(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x1(n), x2(n);
  Labels labels;
  labels.task = Task::kSurvival;
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = rng.uniform();
    x2[i] = rng.uniform();
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    const double t = -std::log(u) / exponential_survival_rate(x1[i], x2[i]);
    double v = rng.uniform();
    while (v <= 0.0) v = rng.uniform();
    const double c = -std::log(v) / 0.25;
    labels.survival.push_back({t <= c, std::max(std::min(t, c), kMinSurvivalTime)});
  }
  return {Table({Column::numeric("x1", x1), Column::numeric("x2", x2)}), std::move(labels)};
}

Synthetic noisy_curve(std::size_t n, std::uint64_t seed, double sd) {
  Rng rng(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = std::sin(2.0 * M_PI * x[i]) + 0.5 * std::cos(6.0 * M_PI * x[i]) + sd * rng.normal();
  }
  return {Table({Column::numeric("x", x)}), regression_labels(std::move(y))};
}

Synthetic noisy_line(std::size_t n, std::uint64_t seed, double sd) {
  Rng rng(seed);
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform();
    y[i] = x[i] + sd * rng.normal();
  }
  return {Table({Column::numeric("x", x)}), regression_labels(std::move(y))};
}

std::string to_csv(const Synthetic& data) {
  std::ostringstream out;
  const auto& cols = data.features.columns();
  for (const auto& c : cols) out << csv_escape(c.name) << ",";
  out << (data.labels.task == Task::kSurvival ? "time,event" : "target") << "\n";
  for (std::size_t r = 0; r < data.features.rows(); ++r) {
    for (const auto& c : cols) out << csv_escape(c.cells[r]) << ",";
    if (data.labels.task == Task::kSurvival) {
      out << format_number(data.labels.survival[r].time) << "," << (data.labels.survival[r].event ? 1 : 0);
    } else {
      out << format_number(data.labels.targets[r]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace namlite::testing
