#include "namlite/exports.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "namlite/error.hpp"
#include "namlite/metrics.hpp"
#include "namlite/model_io.hpp"
#include "namlite/objective.hpp"
#include "namlite/survival.hpp"

namespace namlite {
namespace {

constexpr const char* kIntervalNote = "band = mean +/- 1.96 * SE, SE = sample SD across splits / sqrt(k)";

Json meta_json(const ExportMeta& meta) {
  Json j;
  j["model_hash"] = meta.model_hash;
  j["task"] = meta.task;
  j["n_splits"] = meta.n_splits;
  j["interval"] = kIntervalNote;
  return j;
}

void meta_csv(std::ostringstream& out, const ExportMeta& meta) {
  out << "# model_hash=" << meta.model_hash << "\n";
  out << "# task=" << meta.task << "\n";
  out << "# n_splits=" << meta.n_splits << "\n";
  out << "# interval=" << kIntervalNote << "\n";
}

std::string times_text(const std::vector<double>& times) {
  std::string s;
  for (std::size_t i = 0; i < times.size(); ++i) s += (i ? ";" : "") + format_number(times[i]);
  return s;
}

Json optional_time(const std::optional<double>& t) { return t ? Json(*t) : Json(nullptr); }
std::string time_cell(const std::optional<double>& t) { return t ? format_number(*t) : ""; }

}  // namespace

ExportMeta export_meta(const EnsembleModel& ensemble) {
  return {model_hash(ensemble), std::string(to_string(ensemble.task)),
          static_cast<int>(ensemble.splits.size())};
}

Json importance_to_json(const ImportanceReport& report, const ExportMeta& meta) {
  Json j;
  j["kind"] = "importance";
  Json m = meta_json(meta);
  m["mode"] = std::string(to_string(report.mode));
  m["data"] = report.pooled ? "supplied data" : "per-split training folds";
  m["eval_times"] = report.eval_times;
  j["metadata"] = m;
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    Json ej;
    ej["feature"] = e.feature;
    if (e.is_pair()) ej["feature_b"] = e.feature_b;
    ej["score"] = e.mean;
    ej["se"] = e.se;
    ej["per_split"] = e.per_split;
    if (report.mode == ImportanceMode::kStratify) {
      ej["missing_score"] = e.missing_mean;
      ej["missing_se"] = e.missing_se;
      ej["missing_per_split"] = e.missing_per_split;
    }
    entries.push_back(ej);
  }
  j["entries"] = entries;
  return j;
}

std::string importance_to_csv(const ImportanceReport& report, const ExportMeta& meta) {
  std::ostringstream out;
  meta_csv(out, meta);
  out << "# mode=" << to_string(report.mode) << "\n";
  out << "# data=" << (report.pooled ? "supplied data" : "per-split training folds") << "\n";
  out << "# eval_times=" << times_text(report.eval_times) << "\n";
  const bool stratify = report.mode == ImportanceMode::kStratify;
  out << "feature,feature_b,score,se";
  if (stratify) out << ",missing_score,missing_se";
  out << "\n";
  for (const auto& e : report.entries) {
    out << csv_escape(e.feature) << "," << csv_escape(e.feature_b) << "," << format_number(e.mean)
        << "," << format_number(e.se);
    if (stratify) out << "," << format_number(e.missing_mean) << "," << format_number(e.missing_se);
    out << "\n";
  }
  return out.str();
}

Json shape_to_json(const ShapeExport& shape, const ExportMeta& meta) {
  Json j;
  j["kind"] = "shape";
  j["metadata"] = meta_json(meta);
  j["feature"] = shape.feature;
  j["feature_kind"] = std::string(to_string(shape.kind));
  j["monotone"] = shape.monotone;
  j["include_missing"] = shape.include_missing;
  Json blocks = Json::array();
  for (const auto& block : shape.blocks) {
    Json bj;
    bj["time"] = optional_time(block.time);
    Json bins = Json::array();
    for (const auto& bin : block.bins) {
      Json b;
      b["index"] = bin.index;
      b["label"] = bin.label;
      if (shape.kind == FeatureKind::kContinuous && bin.index != kMissingBin) {
        b["lower"] = bin.lower;
        b["upper"] = bin.upper;
      }
      b["mean"] = bin.mean;
      b["se"] = bin.se;
      b["per_split"] = bin.per_split;
      bins.push_back(b);
    }
    bj["bins"] = bins;
    blocks.push_back(bj);
  }
  j["blocks"] = blocks;
  return j;
}

std::string shape_to_csv(const ShapeExport& shape, const ExportMeta& meta) {
  std::ostringstream out;
  meta_csv(out, meta);
  out << "# feature=" << shape.feature << "\n";
  const std::size_t k = shape.blocks.empty() || shape.blocks[0].bins.empty()
                            ? 0
                            : shape.blocks[0].bins[0].per_split.size();
  out << "time,index,label,lower,upper,mean,se";
  for (std::size_t s = 0; s < k; ++s) out << ",split_" << s;
  out << "\n";
  for (const auto& block : shape.blocks) {
    for (const auto& bin : block.bins) {
      const bool interval = shape.kind == FeatureKind::kContinuous && bin.index != kMissingBin;
      out << time_cell(block.time) << "," << bin.index << "," << csv_escape(bin.label) << ","
          << (interval ? format_number(bin.lower) : "") << ","
          << (interval ? format_number(bin.upper) : "") << "," << format_number(bin.mean) << ","
          << format_number(bin.se);
      for (double v : bin.per_split) out << "," << format_number(v);
      out << "\n";
    }
  }
  return out.str();
}

Json pair_shape_to_json(const PairShapeExport& shape, const ExportMeta& meta) {
  Json j;
  j["kind"] = "pair_shape";
  j["metadata"] = meta_json(meta);
  j["feature_a"] = shape.feature_a;
  j["feature_b"] = shape.feature_b;
  j["labels_a"] = shape.labels_a;
  j["labels_b"] = shape.labels_b;
  Json blocks = Json::array();
  for (const auto& block : shape.blocks) {
    Json bj;
    bj["time"] = optional_time(block.time);
    Json mean = Json::array();
    Json se = Json::array();
    for (int a = 0; a < shape.rows_a; ++a) {
      const auto begin = static_cast<long>(a) * shape.rows_b;
      mean.push_back(std::vector<double>(block.mean.begin() + begin, block.mean.begin() + begin + shape.rows_b));
      se.push_back(std::vector<double>(block.se.begin() + begin, block.se.begin() + begin + shape.rows_b));
    }
    bj["mean"] = mean;
    bj["se"] = se;
    blocks.push_back(bj);
  }
  j["blocks"] = blocks;
  return j;
}

std::string pair_shape_to_csv(const PairShapeExport& shape, const ExportMeta& meta) {
  std::ostringstream out;
  meta_csv(out, meta);
  out << "# pair=" << shape.feature_a << " x " << shape.feature_b << "\n";
  out << "time,index_a,label_a,index_b,label_b,mean,se\n";
  for (const auto& block : shape.blocks) {
    for (int a = 0; a < shape.rows_a; ++a) {
      for (int b = 0; b < shape.rows_b; ++b) {
        const std::size_t cell = static_cast<std::size_t>(a) * shape.rows_b + b;
        out << time_cell(block.time) << "," << a << "," << csv_escape(shape.labels_a[a]) << "," << b
            << "," << csv_escape(shape.labels_b[b]) << "," << format_number(block.mean[cell]) << ","
            << format_number(block.se[cell]) << "\n";
      }
    }
  }
  return out.str();
}

Json calibration_to_json(const std::vector<CalibrationExport>& tables, const ExportMeta& meta) {
  Json j;
  j["kind"] = "calibration";
  j["metadata"] = meta_json(meta);
  Json times = Json::array();
  for (const auto& table : tables) {
    Json tj;
    tj["time"] = table.time;
    tj["requested"] = table.requested;
    Json points = Json::array();
    for (std::size_t b = 0; b < table.points.size(); ++b) {
      const auto& p = table.points[b];
      points.push_back({{"bin", b}, {"size", p.size}, {"mean_pred", p.mean_predicted}, {"km_cdf", p.observed}});
    }
    tj["points"] = points;
    times.push_back(tj);
  }
  j["times"] = times;
  return j;
}

std::string calibration_to_csv(const std::vector<CalibrationExport>& tables, const ExportMeta& meta) {
  std::ostringstream out;
  meta_csv(out, meta);
  out << "time,bin,size,mean_pred,km_cdf\n";
  for (const auto& table : tables) {
    for (std::size_t b = 0; b < table.points.size(); ++b) {
      const auto& p = table.points[b];
      out << format_number(table.time) << "," << b << "," << p.size << ","
          << format_number(p.mean_predicted) << "," << format_number(p.observed) << "\n";
    }
  }
  return out.str();
}

std::string predictions_to_csv(const EnsembleModel& ensemble, const std::vector<double>& predictions) {
  std::ostringstream out;
  const int k = ensemble.output_dim();
  if (ensemble.task == Task::kSurvival) {
    for (int i = 0; i < k; ++i) out << (i ? "," : "") << csv_escape(format_number(ensemble.eval_times[i]));
    out << "\n";
  } else {
    out << "prediction\n";
  }
  for (std::size_t r = 0; r < predictions.size() / static_cast<std::size_t>(k); ++r) {
    for (int i = 0; i < k; ++i) out << (i ? "," : "") << format_number(predictions[r * k + i]);
    out << "\n";
  }
  return out.str();
}

Json selection_to_json(const SelectionResult& result) {
  Json j;
  j["selected_feats"] = result.selected_feats;
  Json pairs = Json::array();
  for (const auto& [a, b] : result.selected_pairs) pairs.push_back({a, b});
  j["selected_pairs"] = pairs;
  Json gates = Json::object();
  for (const auto& [name, gate] : result.feature_gates) gates[name] = gate;
  j["feature_gates"] = gates;
  Json pair_gates = Json::array();
  for (const auto& [pair, gate] : result.pair_gates) pair_gates.push_back({pair.first, pair.second, gate});
  j["pair_gates"] = pair_gates;
  j["val_loss"] = result.val_loss;
  j["val_score"] = result.val_score;
  j["epochs"] = result.epochs;
  j["gamma"] = result.gamma;
  j["pair_gamma"] = result.pair_gamma;
  if (!result.warning.empty()) j["warning"] = result.warning;
  return j;
}

std::string path_to_csv(const RegularizationPath& path) {
  std::ostringstream out;
  out << "reg_param,num_feats,val_loss,val_score,feats\n";
  for (const auto& p : path.points) {
    std::string feats;
    for (std::size_t i = 0; i < p.feats.size(); ++i) feats += (i ? ";" : "") + p.feats[i];
    out << format_number(p.reg_param) << "," << p.num_feats << "," << format_number(p.val_loss) << ","
        << format_number(p.val_score) << "," << csv_escape(feats) << "\n";
  }
  return out.str();
}

Json path_to_json(const RegularizationPath& path) {
  Json j;
  Json feats = Json::object();
  for (const auto& [n, names] : path.feats) feats[std::to_string(n)] = names;
  j["feats"] = feats;
  Json points = Json::array();
  for (const auto& p : path.points) {
    points.push_back({{"reg_param", p.reg_param},
                      {"num_feats", p.num_feats},
                      {"val_loss", p.val_loss},
                      {"val_score", p.val_score},
                      {"feats", p.feats}});
  }
  j["points"] = points;
  j["nonmonotone"] = path.nonmonotone_notes;
  return j;
}

Json fit_report_to_json(const EnsembleModel& ensemble, const FitReport& report) {
  Json j;
  j["task"] = std::string(to_string(ensemble.task));
  Json splits = Json::array();
  double total = 0.0;
  for (const auto& s : ensemble.splits) {
    Json sj;
    sj["best_epoch"] = s.best_epoch;
    sj["val_loss"] = s.val_loss;
    if (!ensemble.pairs.empty()) {
      sj["pair_best_epoch"] = s.pair_best_epoch;
      sj["pair_val_loss"] = s.pair_val_loss;
    }
    total += ensemble.pairs.empty() ? s.val_loss : s.pair_val_loss;
    splits.push_back(sj);
  }
  j["splits"] = splits;
  j["mean_val_loss"] = ensemble.splits.empty() ? 0.0 : total / static_cast<double>(ensemble.splits.size());
  Json pairs = Json::array();
  for (const auto& [a, b] : ensemble.pairs) {
    pairs.push_back({ensemble.schema[a].name, ensemble.schema[b].name});
  }
  j["pairs"] = pairs;
  if (!report.candidate_pairs.empty()) {
    Json candidates = Json::array();
    for (std::size_t i = 0; i < report.candidate_pairs.size(); ++i) {
      candidates.push_back({report.candidate_pairs[i].first, report.candidate_pairs[i].second,
                            i < report.pair_gates.size() ? report.pair_gates[i] : 0.0});
    }
    j["pair_candidates"] = candidates;
  }
  if (ensemble.task == Task::kSurvival) {
    j["eval_times"] = ensemble.eval_times;
    j["clamped_ipcw_weights"] = report.clamped_weights;
  }
  return j;
}

Json evaluate_model(const EnsembleModel& ensemble, const Table& features, const Labels& labels) {
  if (labels.task != ensemble.task) throw ConfigError("label task does not match the model");
  const std::vector<double> pred = predict(ensemble, features);
  Json j;
  j["n"] = labels.size();
  switch (ensemble.task) {
    case Task::kRegression:
      j["rmse"] = rmse(pred, labels.targets);
      j["r2"] = r_squared(pred, labels.targets);
      break;
    case Task::kClassification: {
      j["auc"] = roc_auc(pred, labels.targets);
      std::vector<double> clipped(pred.size());
      for (std::size_t i = 0; i < pred.size(); ++i) clipped[i] = std::clamp(pred[i], 1e-15, 1.0 - 1e-15);
      j["log_loss"] = loss_bce(clipped, labels.targets);
      break;
    }
    case Task::kSurvival: {
      const KaplanMeierCensor censor(censoring_kaplan_meier(labels.survival));
      j["ipcw_brier"] = loss_ipcw(pred, labels.survival, ensemble.eval_times, censor);
      break;
    }
  }
  return j;
}

}  // namespace namlite
