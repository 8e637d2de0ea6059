#include "namlite/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "namlite/error.hpp"

namespace namlite {
namespace {

std::vector<int> output_indices(const EnsembleModel& ensemble, std::span<const double> times) {
  std::vector<int> outputs;
  if (ensemble.task != Task::kSurvival || times.empty()) return outputs;
  for (double t : times) {
    const int k = nearest_time_index(ensemble.eval_times, t);
    if (std::find(outputs.begin(), outputs.end(), k) == outputs.end()) outputs.push_back(k);
  }
  return outputs;
}

bool cell_missing(const Term& term, int cell) {
  if (!term.is_pair()) return cell == kMissingBin;
  return cell / term.rows_b == kMissingBin || cell % term.rows_b == kMissingBin;
}

// Output value of a cell for one block: a single output, or the mean over all
// outputs when `output` is negative.
double block_value(const std::vector<double>& table, int out, int cell, int output) {
  const double* row = table.data() + static_cast<std::size_t>(cell) * out;
  if (output >= 0) return row[output];
  double sum = 0.0;
  for (int o = 0; o < out; ++o) sum += row[o];
  return sum / out;
}

// (output index, reported time) per block.
std::vector<std::pair<int, std::optional<double>>> blocks_for(const EnsembleModel& ensemble,
                                                              std::span<const double> times) {
  std::vector<std::pair<int, std::optional<double>>> blocks;
  if (ensemble.task != Task::kSurvival) {
    blocks.emplace_back(0, std::nullopt);
  } else if (times.empty()) {
    blocks.emplace_back(-1, std::nullopt);
  } else {
    for (int k : output_indices(ensemble, times)) blocks.emplace_back(k, ensemble.eval_times[k]);
  }
  return blocks;
}

}  // namespace

std::string_view to_string(ImportanceMode mode) {
  switch (mode) {
    case ImportanceMode::kInclude:
      return "include";
    case ImportanceMode::kIgnore:
      return "ignore";
    case ImportanceMode::kStratify:
      return "stratify";
  }
  return "include";
}

ImportanceMode importance_mode_from_string(std::string_view text) {
  if (text == "include") return ImportanceMode::kInclude;
  if (text == "ignore") return ImportanceMode::kIgnore;
  if (text == "stratify") return ImportanceMode::kStratify;
  throw ConfigError("unknown importance mode '" + std::string(text) + "'");
}

std::vector<double> centered_term(const AdditiveModel& model, int term) {
  std::vector<double> table = term_table(model, term);
  const int out = model.output_dim();
  const double gate = model.gate(term);
  const auto& centering = model.centering(term);
  for (std::size_t i = 0; i < table.size(); ++i) {
    table[i] = gate == 0.0 ? 0.0 : gate * (table[i] - centering[i % static_cast<std::size_t>(out)]);
  }
  return table;
}

double term_score(const AdditiveModel& model, int term, std::span<const std::int64_t> counts,
                  CellFilter filter, std::span<const int> outputs) {
  const Term& t = model.term(term);
  if (model.gate(term) == 0.0) return 0.0;
  const int out = model.output_dim();
  std::vector<int> used(outputs.begin(), outputs.end());
  if (used.empty()) {
    used.resize(static_cast<std::size_t>(out));
    std::iota(used.begin(), used.end(), 0);
  }
  const std::vector<double> table = centered_term(model, term);
  double weighted = 0.0;
  double total = 0.0;
  for (int cell = 0; cell < t.cells(); ++cell) {
    const auto c = counts[static_cast<std::size_t>(cell)];
    if (c == 0) continue;
    const bool missing = cell_missing(t, cell);
    if ((filter == CellFilter::kObserved && missing) || (filter == CellFilter::kMissing && !missing)) {
      continue;
    }
    double value = 0.0;
    for (int o : used) value += std::abs(table[static_cast<std::size_t>(cell) * out + o]);
    weighted += static_cast<double>(c) * value / static_cast<double>(used.size());
    total += static_cast<double>(c);
  }
  return total == 0.0 ? 0.0 : weighted / total;
}

std::pair<double, double> mean_and_se(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double k = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (k - 1.0)) / std::sqrt(k)};
}

int nearest_time_index(std::span<const double> grid, double t) {
  if (grid.empty()) throw ConfigError("model has no evaluation-time grid");
  int best = 0;
  for (int k = 1; k < static_cast<int>(grid.size()); ++k) {
    if (std::abs(grid[k] - t) < std::abs(grid[best] - t)) best = k;
  }
  return best;
}

ImportanceReport feature_importance(const EnsembleModel& ensemble, ImportanceMode mode,
                                    const BinnedMatrix* pooled, std::span<const double> eval_times) {
  if (ensemble.splits.empty()) throw ConfigError("model has no trained splits");
  ImportanceReport report;
  report.mode = mode;
  report.pooled = pooled != nullptr;
  const std::vector<int> outputs = output_indices(ensemble, eval_times);
  for (int k : outputs) report.eval_times.push_back(ensemble.eval_times[k]);

  std::vector<std::vector<std::int64_t>> pooled_counts;
  if (pooled) {
    std::vector<std::size_t> rows(pooled->n_samples);
    std::iota(rows.begin(), rows.end(), 0);
    pooled_counts = term_counts(ensemble.splits.front().model, *pooled, rows);
  }
  const CellFilter filter = mode == ImportanceMode::kInclude ? CellFilter::kAll : CellFilter::kObserved;
  const int n_terms = ensemble.splits.front().model.term_count();
  for (int t = 0; t < n_terms; ++t) {
    const Term& term = ensemble.splits.front().model.term(t);
    ImportanceEntry entry;
    entry.feature = ensemble.bins[term.feature_a].feature;
    if (term.is_pair()) entry.feature_b = ensemble.bins[term.feature_b].feature;
    for (const auto& split : ensemble.splits) {
      const auto& counts = pooled ? pooled_counts[t] : split.train_counts[t];
      entry.per_split.push_back(term_score(split.model, t, counts, filter, outputs));
      if (mode == ImportanceMode::kStratify) {
        entry.missing_per_split.push_back(term_score(split.model, t, counts, CellFilter::kMissing, outputs));
      }
    }
    std::tie(entry.mean, entry.se) = mean_and_se(entry.per_split);
    if (mode == ImportanceMode::kStratify) {
      std::tie(entry.missing_mean, entry.missing_se) = mean_and_se(entry.missing_per_split);
    }
    report.entries.push_back(std::move(entry));
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const ImportanceEntry& a, const ImportanceEntry& b) {
                     if (a.mean != b.mean) return a.mean > b.mean;
                     return a.name() < b.name();
                   });
  return report;
}

ShapeExport shape_function(const EnsembleModel& ensemble, std::string_view feature,
                           bool include_missing, std::span<const double> eval_times) {
  const int j = ensemble.feature_index(feature);
  if (j < 0) throw ConfigError("feature '" + std::string(feature) + "' not in model");
  if (ensemble.splits.empty()) throw ConfigError("model has no trained splits");
  const BinMap& bins = ensemble.bins[j];
  ShapeExport shape;
  shape.feature = bins.feature;
  shape.kind = bins.kind;
  shape.monotone = ensemble.monotone[j];
  shape.include_missing = include_missing;

  const int out = ensemble.output_dim();
  std::vector<std::vector<double>> tables;
  for (const auto& split : ensemble.splits) tables.push_back(centered_term(split.model, j));
  for (const auto& [output, time] : blocks_for(ensemble, eval_times)) {
    ShapeBlock block;
    block.time = time;
    for (int i = include_missing ? 0 : 1; i < bins.index_space(); ++i) {
      ShapeBin bin;
      bin.index = i;
      bin.label = bins.label(i);
      if (bins.is_continuous() && i != kMissingBin) {
        bin.lower = bins.bin_lower(i);
        bin.upper = bins.bin_upper(i);
      }
      for (const auto& table : tables) bin.per_split.push_back(block_value(table, out, i, output));
      std::tie(bin.mean, bin.se) = mean_and_se(bin.per_split);
      block.bins.push_back(std::move(bin));
    }
    shape.blocks.push_back(std::move(block));
  }
  return shape;
}

PairShapeExport pair_shape_function(const EnsembleModel& ensemble, std::string_view feature_a,
                                    std::string_view feature_b, std::span<const double> eval_times) {
  const int a = ensemble.feature_index(feature_a);
  const int b = ensemble.feature_index(feature_b);
  const int term = a < 0 || b < 0 ? -1 : ensemble.pair_term(a, b);
  if (term < 0) {
    throw ConfigError("pair not selected: " + std::string(feature_a) + " x " + std::string(feature_b));
  }
  const Term& t = ensemble.splits.front().model.term(term);
  PairShapeExport shape;
  shape.feature_a = ensemble.bins[t.feature_a].feature;
  shape.feature_b = ensemble.bins[t.feature_b].feature;
  shape.rows_a = t.rows_a;
  shape.rows_b = t.rows_b;
  for (int i = 0; i < t.rows_a; ++i) shape.labels_a.push_back(ensemble.bins[t.feature_a].label(i));
  for (int i = 0; i < t.rows_b; ++i) shape.labels_b.push_back(ensemble.bins[t.feature_b].label(i));

  const int out = ensemble.output_dim();
  std::vector<std::vector<double>> tables;
  for (const auto& split : ensemble.splits) tables.push_back(centered_term(split.model, term));
  for (const auto& [output, time] : blocks_for(ensemble, eval_times)) {
    PairShapeBlock block;
    block.time = time;
    for (int cell = 0; cell < t.cells(); ++cell) {
      std::vector<double> values;
      for (const auto& table : tables) values.push_back(block_value(table, out, cell, output));
      const auto [mean, se] = mean_and_se(values);
      block.mean.push_back(mean);
      block.se.push_back(se);
    }
    shape.blocks.push_back(std::move(block));
  }
  return shape;
}

CalibrationExport calibrate(const EnsembleModel& ensemble, const BinnedMatrix& x,
                            std::span<const SurvivalLabel> labels, double time, int n_bins) {
  if (ensemble.task != Task::kSurvival) throw ConfigError("calibration needs a survival model");
  if (labels.size() != x.n_samples) throw DataError("label count does not match the row count");
  CalibrationExport result;
  result.requested = time;
  const int k = nearest_time_index(ensemble.eval_times, time);
  result.time = ensemble.eval_times[k];
  const std::vector<double> cdf = predict_binned(ensemble, x);
  const std::size_t out = ensemble.eval_times.size();
  std::vector<double> column(x.n_samples);
  for (std::size_t i = 0; i < x.n_samples; ++i) column[i] = cdf[i * out + static_cast<std::size_t>(k)];
  result.points = calibration_table(column, labels, result.time, n_bins);
  return result;
}

}  // namespace namlite
