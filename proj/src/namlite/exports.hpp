#ifndef NAMLITE_EXPORTS_HPP
#define NAMLITE_EXPORTS_HPP

#include <string>
#include <vector>

#include "namlite/config.hpp"
#include "namlite/explain.hpp"
#include "namlite/selection.hpp"

namespace namlite {

// Metadata written at the top of every export.
struct ExportMeta {
  std::string model_hash;
  std::string task;
  int n_splits = 0;
};

ExportMeta export_meta(const EnsembleModel& ensemble);

Json importance_to_json(const ImportanceReport& report, const ExportMeta& meta);
std::string importance_to_csv(const ImportanceReport& report, const ExportMeta& meta);

Json shape_to_json(const ShapeExport& shape, const ExportMeta& meta);
std::string shape_to_csv(const ShapeExport& shape, const ExportMeta& meta);

Json pair_shape_to_json(const PairShapeExport& shape, const ExportMeta& meta);
std::string pair_shape_to_csv(const PairShapeExport& shape, const ExportMeta& meta);

Json calibration_to_json(const std::vector<CalibrationExport>& tables, const ExportMeta& meta);
std::string calibration_to_csv(const std::vector<CalibrationExport>& tables, const ExportMeta& meta);

// CSV of predictions: one column "prediction", or one column per grid time
// named by the time for survival.
std::string predictions_to_csv(const EnsembleModel& ensemble, const std::vector<double>& predictions);

Json selection_to_json(const SelectionResult& result);

// Path table: one row per step with reg_param, num_feats, val_loss,
// val_score and the ';'-joined feature list.
std::string path_to_csv(const RegularizationPath& path);
// {"feats": {size: [features]}, "nonmonotone": [...]}.
Json path_to_json(const RegularizationPath& path);

// Per-split epochs and validation losses, pair selection details and the
// number of clamped IPCW weights.
Json fit_report_to_json(const EnsembleModel& ensemble, const FitReport& report);

// Held-out metrics: rmse and r2 (regression), auc and log_loss
// (classification), ipcw_brier on the model grid with a Kaplan-Meier censoring
// estimate from `labels` (survival).
Json evaluate_model(const EnsembleModel& ensemble, const Table& features, const Labels& labels);

}  // namespace namlite

#endif  // NAMLITE_EXPORTS_HPP
