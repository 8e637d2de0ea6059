#ifndef NAMLITE_ENSEMBLE_HPP
#define NAMLITE_ENSEMBLE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "namlite/additive_model.hpp"
#include "namlite/binning.hpp"
#include "namlite/engine.hpp"
#include "namlite/folds.hpp"
#include "namlite/schema.hpp"
#include "namlite/survival.hpp"
#include "namlite/table.hpp"
#include "namlite/trainer.hpp"

namespace namlite {

enum class CensorEstimator { kKaplanMeier, kCox };

std::string_view to_string(CensorEstimator estimator);
CensorEstimator censor_estimator_from_string(std::string_view text);

struct Labels {
  Task task = Task::kRegression;
  std::vector<double> targets;           // regression and classification
  std::vector<SurvivalLabel> survival;   // survival

  std::size_t size() const { return task == Task::kSurvival ? survival.size() : targets.size(); }
  Labels select(std::span<const std::size_t> rows) const;
};

// Reads the label columns of `table`. Classification targets accept 0/1 and
// true/false; survival times are clipped below at kMinSurvivalTime. Missing
// or unparseable labels raise DataError.
Labels extract_labels(const Table& table, Task task, const std::string& target,
                      const std::string& time_column, const std::string& event_column);

struct TrainConfig {
  Task task = Task::kRegression;
  int n_val_splits = 5;
  TrainOptions train;
  int num_pairs = 0;
  Architecture architecture;
  std::uint64_t seed = 0;
  std::optional<double> gamma;       // default_gamma when unset
  std::optional<double> pair_gamma;  // gamma / 4 when unset
  int max_bins = kDefaultMaxBins;
  std::optional<int> min_samples_per_bin;
  std::map<std::string, FeatureKind, std::less<>> kinds;  // schema overrides
  std::map<std::string, int, std::less<>> monotone;       // feature -> -1 / +1
  int threads = 0;  // 0: one per split
  CensorEstimator censor_estimator = CensorEstimator::kKaplanMeier;
  std::optional<int> n_eval_times;  // survival grid size
  double pair_selection_reg = 1e-4;  // pair gate penalty used to rank pairs
  int selection_epochs = 100;
  // Interactions to fit as given (feature names); skips pair selection.
  std::vector<std::pair<std::string, std::string>> pairs;

  void validate() const;  // ConfigError on invalid values
};

// Data ready for training: schema, bins, bin indices, labels and the
// objective over all rows.
struct PreparedData {
  Task task = Task::kRegression;
  std::vector<FeatureSchema> schema;
  std::vector<BinMap> bins;
  BinnedMatrix x;
  Labels labels;
  std::vector<double> eval_times;  // survival only
  std::size_t clamped_weights = 0;
  std::shared_ptr<const Objective> objective;
};

PreparedData prepare_data(const Table& features, const Labels& labels, const TrainConfig& config);

// Design matrix for the Cox censoring model: standardized continuous columns
// (mean-imputed, with a missing indicator when needed) and one-hot encoded bin
// levels for categorical features, first level dropped.
std::vector<double> cox_design(const Table& features, std::span<const BinMap> bins,
                               std::size_t& n_cols);

struct SplitModel {
  AdditiveModel model;
  std::vector<std::vector<std::int64_t>> train_counts;  // per term, per cell
  int best_epoch = 0;
  double val_loss = 0.0;
  int pair_best_epoch = 0;
  double pair_val_loss = 0.0;
};

// k single-split models sharing bins and selected terms. Term t < n_features
// is the main effect of feature t; term n_features + p is pairs[p].
struct EnsembleModel {
  Task task = Task::kRegression;
  std::vector<FeatureSchema> schema;
  std::vector<BinMap> bins;
  std::vector<int> monotone;  // per feature
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> eval_times;
  TrainConfig config;
  double gamma = 1.0;
  double pair_gamma = 0.25;
  std::vector<SplitModel> splits;

  int n_features() const { return static_cast<int>(bins.size()); }
  int output_dim() const { return task == Task::kSurvival ? static_cast<int>(eval_times.size()) : 1; }
  int feature_index(std::string_view name) const;  // -1 when absent
  int pair_term(int a, int b) const;               // -1 when not selected
  std::vector<std::string> feature_names() const;
};

struct FitReport {
  std::vector<std::pair<std::string, std::string>> candidate_pairs;
  std::vector<double> pair_gates;  // gate of each candidate after pair selection
  std::size_t clamped_weights = 0;
};

// Bins every feature column of `features`, selects pairs on the first split
// when num_pairs > 0, then trains and finalizes one model per split.
EnsembleModel fit(const Table& features, const Labels& labels, const TrainConfig& config,
                  FitReport* report = nullptr);

// Same as fit() for already prepared data.
EnsembleModel fit_prepared(const PreparedData& data, const TrainConfig& config,
                           FitReport* report = nullptr);

// Linked predictions averaged across splits, rows x output_dim.
std::vector<double> predict(const EnsembleModel& ensemble, const Table& table);
std::vector<double> predict_binned(const EnsembleModel& ensemble, const BinnedMatrix& x);
BinnedMatrix transform_for(const EnsembleModel& ensemble, const Table& table);

// Builds an untrained model for the given bins with every main effect and the
// listed pairs.
AdditiveModel make_model(const std::vector<BinMap>& bins, std::span<const int> monotone,
                         std::span<const std::pair<int, int>> pairs, int output_dim,
                         const Architecture& architecture, double gamma, double pair_gamma);

// Candidate interactions: all pairs when there are at most 20 features,
// otherwise all pairs among the 20 most important main effects.
std::vector<std::pair<int, int>> candidate_pairs(int n_features, std::span<const double> importance);

// Runs `work(i)` for i in [0, n) on up to `threads` threads and rethrows the
// first failure by index.
void parallel_for(int n, int threads, const std::function<void(int)>& work);

// Resolves the thread count: explicit value, else NAMLITE_THREADS, else `fallback`.
int resolve_threads(int requested, int fallback);

}  // namespace namlite

#endif  // NAMLITE_ENSEMBLE_HPP
