#ifndef NAMLITE_OBJECTIVE_HPP
#define NAMLITE_OBJECTIVE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "namlite/engine.hpp"
#include "namlite/survival.hpp"

namespace namlite {

// Smallest censoring survival used as an IPCW denominator.
inline constexpr double kMinCensorSurvival = 1e-3;

// Mean squared error.
double loss_mse(std::span<const double> pred, std::span<const double> target);

// Mean negative Bernoulli log-likelihood of probabilities. Targets must be 0
// or 1 (ConfigError otherwise).
double loss_bce(std::span<const double> prob, std::span<const double> target);

// IPCW Brier loss of a predicted CDF matrix (n x K, row-major) averaged over
// samples and times. Censoring survival below kMinCensorSurvival is clamped.
double loss_ipcw(std::span<const double> cdf, std::span<const SurvivalLabel> labels,
                 std::span<const double> times, const CensorSurvival& censor);

// Per-sample IPCW targets and weights: for sample i and time k the loss term
// is weight * (p - target)^2.
struct IpcwTerms {
  std::size_t n_times = 0;
  std::vector<double> target;  // n x K
  std::vector<double> weight;  // n x K
  std::size_t clamped = 0;     // weights whose denominator hit the clamp
};
IpcwTerms ipcw_terms(std::span<const SurvivalLabel> labels, std::span<const double> times,
                     const CensorSurvival& censor);

class SquaredError final : public Objective {
 public:
  explicit SquaredError(std::vector<double> targets) : targets_(std::move(targets)) {}
  int output_dim() const override { return 1; }
  double evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                  std::span<double> grad) const override;

 private:
  std::vector<double> targets_;
};

// Binary cross-entropy on logits.
class Logistic final : public Objective {
 public:
  explicit Logistic(std::vector<double> targets);
  int output_dim() const override { return 1; }
  double evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                  std::span<double> grad) const override;

 private:
  std::vector<double> targets_;
};

// IPCW Brier loss on logits; the sigmoid is part of the loss.
class IpcwBrier final : public Objective {
 public:
  explicit IpcwBrier(IpcwTerms terms) : terms_(std::move(terms)) {}
  int output_dim() const override { return static_cast<int>(terms_.n_times); }
  double evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                  std::span<double> grad) const override;
  const IpcwTerms& terms() const { return terms_; }

 private:
  IpcwTerms terms_;
};

}  // namespace namlite

#endif  // NAMLITE_OBJECTIVE_HPP
