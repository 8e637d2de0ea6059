#ifndef NAMLITE_SELECTION_HPP
#define NAMLITE_SELECTION_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "namlite/ensemble.hpp"

namespace namlite {

struct SelectionConfig {
  double reg_param = 0.0;
  double pair_reg_param = 0.0;
  std::optional<double> gamma;       // default_gamma when unset
  std::optional<double> pair_gamma;  // gamma / 4 when unset
  bool select_pairs = false;
};

struct SelectionResult {
  std::vector<std::string> selected_feats;
  std::vector<std::pair<std::string, std::string>> selected_pairs;
  std::vector<std::pair<std::string, double>> feature_gates;  // every feature
  std::vector<std::pair<std::pair<std::string, std::string>, double>> pair_gates;
  double val_loss = 0.0;
  double val_score = 0.0;
  int epochs = 0;
  double gamma = 0.0;
  double pair_gamma = 0.0;
  std::string warning;  // set when nothing was selected
};

// Trains one gated model on the first train/validation split with the
// sparsity penalty reg_param * sum s(mu_j) (plus the pair penalty when
// select_pairs is set). Features whose gate reaches 0 are pruned for the rest
// of training; the selected set is every feature with a positive gate.
SelectionResult select_features(const PreparedData& data, const TrainConfig& config,
                                const SelectionConfig& selection);

struct PathPoint {
  double reg_param = 0.0;
  int num_feats = 0;
  double val_loss = 0.0;
  double val_score = 0.0;
  std::vector<std::string> feats;
};

struct RegularizationPath {
  std::vector<PathPoint> points;
  std::map<int, std::vector<std::string>> feats;  // num_feats -> features
  std::vector<std::string> nonmonotone_notes;

  // Feature list recorded for `num_feats`, or for the largest recorded size
  // below it; empty when there is none.
  std::vector<std::string> lookup(int num_feats) const;
};

struct PathOptions {
  double factor = 2.0;
  int max_steps = 20;
};

// select_features over reg_param = init, init*factor, ... warm-starting every
// step from the previous solution, until no feature remains or max_steps.
RegularizationPath regularization_path(const PreparedData& data, const TrainConfig& config,
                                       double init_reg_param, const PathOptions& options = {},
                                       const SelectionConfig& base = {});

// Task score on held-out predictions: AUC (classification), RMSE
// (regression) or the IPCW loss (survival).
double validation_score(Task task, const AdditiveModel& model, const PreparedData& data,
                        std::span<const std::size_t> rows);

}  // namespace namlite

#endif  // NAMLITE_SELECTION_HPP
