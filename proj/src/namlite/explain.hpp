#ifndef NAMLITE_EXPLAIN_HPP
#define NAMLITE_EXPLAIN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "namlite/ensemble.hpp"

namespace namlite {

enum class ImportanceMode { kInclude, kIgnore, kStratify };

std::string_view to_string(ImportanceMode mode);
ImportanceMode importance_mode_from_string(std::string_view text);  // ConfigError if unknown

enum class CellFilter { kAll, kObserved, kMissing };

// Count-weighted mean of |s * (f - c)| over the cells selected by `filter`
// (observed: no missing coordinate; missing: at least one), averaged over the
// outputs in `outputs` (all when empty). Zero when no counted cell qualifies.
double term_score(const AdditiveModel& model, int term, std::span<const std::int64_t> counts,
                  CellFilter filter, std::span<const int> outputs = {});

// Centered gated output s * (f - c) of a term on every cell, cells x out.
std::vector<double> centered_term(const AdditiveModel& model, int term);

struct ImportanceEntry {
  std::string feature;
  std::string feature_b;  // empty for main effects
  double mean = 0.0;      // observed score in stratify mode
  double se = 0.0;
  std::vector<double> per_split;
  double missing_mean = 0.0;  // stratify mode only
  double missing_se = 0.0;
  std::vector<double> missing_per_split;

  bool is_pair() const { return !feature_b.empty(); }
  std::string name() const { return is_pair() ? feature + " x " + feature_b : feature; }
};

struct ImportanceReport {
  ImportanceMode mode = ImportanceMode::kInclude;
  bool pooled = false;  // scored on supplied data instead of per-split folds
  std::vector<double> eval_times;
  std::vector<ImportanceEntry> entries;  // descending score, ties by name
};

// Per split, score_j = mean over samples of |s_j (f_j(x_j) - c_j)|:
//   include  every training sample of the split
//   ignore   samples with x_j observed
//   stratify observed score as in ignore, plus the missing-bin score
//            |s_j (f_j(0) - c_j)| (0 when the split saw no missing value).
// Scores are averaged over splits (mean and standard error). With `pooled`
// data the samples come from it instead of each split's training fold. For
// survival the score averages the selected evaluation-time outputs (all when
// `eval_times` is empty).
ImportanceReport feature_importance(const EnsembleModel& ensemble, ImportanceMode mode,
                                    const BinnedMatrix* pooled = nullptr,
                                    std::span<const double> eval_times = {});

struct ShapeBin {
  int index = 0;
  std::string label;
  double lower = 0.0;  // continuous bins
  double upper = 0.0;
  double mean = 0.0;
  double se = 0.0;
  std::vector<double> per_split;
};

struct ShapeBlock {
  std::optional<double> time;  // survival: grid time; unset otherwise
  std::vector<ShapeBin> bins;
};

struct ShapeExport {
  std::string feature;
  FeatureKind kind = FeatureKind::kContinuous;
  int monotone = 0;
  bool include_missing = false;
  std::vector<ShapeBlock> blocks;
};

// Centered gated shape per bin, mean and standard error across splits. For
// survival one block per requested time (nearest grid time); without times
// the outputs are averaged over the grid.
ShapeExport shape_function(const EnsembleModel& ensemble, std::string_view feature,
                           bool include_missing, std::span<const double> eval_times = {});

struct PairShapeBlock {
  std::optional<double> time;
  std::vector<double> mean;  // rows_a x rows_b
  std::vector<double> se;
};

struct PairShapeExport {
  std::string feature_a;
  std::string feature_b;
  int rows_a = 0;
  int rows_b = 0;
  std::vector<std::string> labels_a;
  std::vector<std::string> labels_b;
  std::vector<PairShapeBlock> blocks;
};

// ConfigError "pair not selected" when the pair is not in the model.
PairShapeExport pair_shape_function(const EnsembleModel& ensemble, std::string_view feature_a,
                                    std::string_view feature_b,
                                    std::span<const double> eval_times = {});

// Index of the grid time nearest to t (the earlier one on ties).
int nearest_time_index(std::span<const double> grid, double t);

// Sample mean and standard error (sample SD / sqrt(k); 0 when k = 1).
std::pair<double, double> mean_and_se(std::span<const double> values);

// Calibration of the ensemble at `time`: samples binned by predicted CDF at the
// nearest grid time, Kaplan-Meier CDF per bin.
struct CalibrationExport {
  double time = 0.0;       // grid time used
  double requested = 0.0;  // time asked for
  std::vector<CalibrationPoint> points;
};
CalibrationExport calibrate(const EnsembleModel& ensemble, const BinnedMatrix& x,
                            std::span<const SurvivalLabel> labels, double time, int n_bins);

}  // namespace namlite

#endif  // NAMLITE_EXPLAIN_HPP
