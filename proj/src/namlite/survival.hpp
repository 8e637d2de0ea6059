#ifndef NAMLITE_SURVIVAL_HPP
#define NAMLITE_SURVIVAL_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace namlite {

inline constexpr double kMinSurvivalTime = 1e-5;

struct SurvivalLabel {
  bool event = false;  // true when the event was observed
  double time = 0.0;   // min(event time, censoring time), > 0
};

// Right-continuous, nonincreasing step function with value 1 before the first
// jump.
class StepSurvivalCurve {
 public:
  StepSurvivalCurve() = default;
  StepSurvivalCurve(std::vector<double> times, std::vector<double> values);

  double at(double t) const;          // S(t)
  double left_limit(double t) const;  // S(t-)
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

// Product-limit estimator on the event indicators. At tied times events are
// counted before censorings, so a censored sample at t is still at risk at t.
StepSurvivalCurve kaplan_meier(std::span<const SurvivalLabel> labels);

// Kaplan-Meier of the censoring distribution P(C > t): indicators flipped.
StepSurvivalCurve censoring_kaplan_meier(std::span<const SurvivalLabel> labels);

// Evaluation times at quantiles k/(K+1), k = 1..K, of the uncensored event
// times, deduplicated. The quantile at p is the order statistic at 1-based
// position p*(n+1), clamped to [1, n] and linearly interpolated, so the grid
// of {1..99} with K=3 is {25, 50, 75}. DataError without events.
std::vector<double> eval_time_grid(std::span<const SurvivalLabel> labels, int n_times);

// min(50, number of distinct uncensored times).
int default_eval_time_count(std::span<const SurvivalLabel> labels);

// Cox proportional hazards fit with Breslow ties.
struct CoxOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
};

struct CoxModel {
  std::vector<double> beta;        // zero for dropped (constant) columns
  std::vector<double> jump_times;  // distinct event times
  std::vector<double> cumulative_hazard;  // Breslow baseline at jump_times
  int iterations = 0;
  double gradient_norm = 0.0;
  double log_likelihood = 0.0;

  double baseline_hazard(double t) const;       // Lambda_0(t)
  double baseline_hazard_left(double t) const;  // Lambda_0(t-)
  double linear_predictor(std::span<const double> x) const;
  double survival(double t, std::span<const double> x) const;  // exp(-Lambda_0(t) e^{x b})
};

// `design` is row-major n x p. Constant columns get coefficient 0; collinear
// columns raise DataError; failure to converge raises NumericError.
CoxModel cox_fit(std::span<const double> design, std::size_t n_cols,
                 std::span<const SurvivalLabel> labels, const CoxOptions& options = {});

// Partial log-likelihood, gradient and Hessian at beta (exposed for tests).
struct CoxDerivatives {
  double log_likelihood = 0.0;
  std::vector<double> gradient;
  std::vector<double> hessian;  // p x p row-major
};
CoxDerivatives cox_derivatives(std::span<const double> design, std::size_t n_cols,
                               std::span<const SurvivalLabel> labels,
                               std::span<const double> beta);

// Censoring survival G(t | X_i) for sample i of the data it was built for.
class CensorSurvival {
 public:
  virtual ~CensorSurvival() = default;
  virtual double at(std::size_t sample, double t) const = 0;
  virtual double left_limit(std::size_t sample, double t) const = 0;
};

class KaplanMeierCensor final : public CensorSurvival {
 public:
  explicit KaplanMeierCensor(StepSurvivalCurve curve) : curve_(std::move(curve)) {}
  double at(std::size_t, double t) const override { return curve_.at(t); }
  double left_limit(std::size_t, double t) const override { return curve_.left_limit(t); }

 private:
  StepSurvivalCurve curve_;
};

class CoxCensor final : public CensorSurvival {
 public:
  CoxCensor(CoxModel model, std::vector<double> design, std::size_t n_cols);
  double at(std::size_t sample, double t) const override;
  double left_limit(std::size_t sample, double t) const override;

 private:
  CoxModel model_;
  std::vector<double> risk_;  // exp(x_i beta)
};

// One calibration point: mean predicted CDF of a bin against the Kaplan-Meier
// CDF 1 - S_bin(t) of the same samples.
struct CalibrationPoint {
  std::size_t size = 0;
  double mean_predicted = 0.0;
  double observed = 0.0;
};

// Sorts samples by predicted CDF at `time` and cuts them into n_bins groups
// whose sizes differ by at most one. Adjacent groups that both hold a single
// repeated prediction value are pooled, so a constant predictor yields one
// point.
std::vector<CalibrationPoint> calibration_table(std::span<const double> predicted,
                                                std::span<const SurvivalLabel> labels,
                                                double time, int n_bins);

}  // namespace namlite

#endif  // NAMLITE_SURVIVAL_HPP
