#include "namlite/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "namlite/error.hpp"
#include "namlite/gates.hpp"
#include "namlite/metrics.hpp"

namespace namlite {
namespace {

constexpr int kPreliminaryEpochs = 10;

struct GatedSetup {
  AdditiveModel model;
  std::vector<std::pair<int, int>> pairs;
  Fold fold;
  std::vector<char> active;
  double gamma = 0.0;
  double pair_gamma = 0.0;
};

std::vector<int> monotone_vector(const PreparedData& data, const TrainConfig& config) {
  std::vector<int> monotone(data.bins.size(), 0);
  for (const auto& [name, direction] : config.monotone) {
    auto it = std::find_if(data.bins.begin(), data.bins.end(),
                           [&](const BinMap& b) { return b.feature == name; });
    if (it == data.bins.end()) throw ConfigError("monotone constraint for unknown feature '" + name + "'");
    monotone[static_cast<std::size_t>(it - data.bins.begin())] = direction;
  }
  return monotone;
}

GatedSetup make_setup(const PreparedData& data, const TrainConfig& config,
                      const SelectionConfig& selection, Rng& rng) {
  config.validate();
  if (selection.reg_param < 0.0 || selection.pair_reg_param < 0.0) {
    throw ConfigError("regularization parameters must be non-negative");
  }
  GatedSetup setup;
  setup.fold = split_folds(data.x.n_samples, config.n_val_splits, config.seed).front();
  setup.gamma = selection.gamma.value_or(config.gamma.value_or(default_gamma(
      setup.fold.train.size(), config.train.batch_size, config.architecture.embedding_dim)));
  setup.pair_gamma = selection.pair_gamma.value_or(config.pair_gamma.value_or(setup.gamma / 4.0));
  if (!(setup.gamma > 0.0) || !(setup.pair_gamma > 0.0)) throw ConfigError("gamma must be positive");
  const std::vector<int> monotone = monotone_vector(data, config);
  const int out = data.objective->output_dim();
  const int p = static_cast<int>(data.bins.size());

  if (selection.select_pairs && p >= 2) {
    std::vector<double> importance;
    if (p > 20) {
      // Short ungated fit of the main effects to rank features.
      AdditiveModel mains = make_model(data.bins, monotone, {}, out, config.architecture,
                                       setup.gamma, setup.pair_gamma);
      for (int t = 0; t < mains.term_count(); ++t) {
        mains.initialize_term(t, rng);
        mains.set_mu(t, 0.5 * setup.gamma);
      }
      TrainOptions options = config.train;
      options.max_epochs = std::min(options.max_epochs, kPreliminaryEpochs);
      train_early_stopping(mains, data.x, setup.fold.train, setup.fold.validation,
                           *data.objective, options, {}, rng);
      const auto counts = term_counts(mains, data.x, setup.fold.train);
      finalize(mains, counts);
      for (int t = 0; t < mains.term_count(); ++t) {
        const auto table = term_table(mains, t);
        double score = 0.0;
        double total = 0.0;
        for (std::size_t c = 0; c < counts[t].size(); ++c) {
          score += static_cast<double>(counts[t][c]) * std::abs(table[c] - mains.centering(t)[0]);
          total += static_cast<double>(counts[t][c]);
        }
        importance.push_back(score / total);
      }
    }
    setup.pairs = candidate_pairs(p, importance);
  }

  setup.model = make_model(data.bins, monotone, setup.pairs, out, config.architecture,
                           setup.gamma, setup.pair_gamma);
  for (int t = 0; t < setup.model.term_count(); ++t) {
    setup.model.initialize_term(t, rng);
    setup.model.set_mu(t, 0.25 * setup.model.term_gamma(t));
  }
  setup.active.assign(static_cast<std::size_t>(setup.model.term_count()), 1);
  return setup;
}

TrainResult run_gated(GatedSetup& setup, const PreparedData& data, const TrainConfig& config,
                      double reg, double pair_reg, Rng& rng) {
  GatedTraining gated;
  gated.feature_reg = reg;
  gated.pair_reg = pair_reg;
  TrainOptions options = config.train;
  options.max_epochs = config.selection_epochs;
  return train_gated(setup.model, data.x, setup.fold.train, setup.fold.validation,
                     *data.objective, options, gated, setup.active, rng);
}

SelectionResult collect(const GatedSetup& setup, const PreparedData& data, const TrainResult& run) {
  SelectionResult result;
  const AdditiveModel& model = setup.model;
  for (int t = 0; t < model.term_count(); ++t) {
    const Term& term = model.term(t);
    const double gate = setup.active[t] ? model.gate(t) : 0.0;
    if (term.is_pair()) {
      std::pair<std::string, std::string> names{data.bins[term.feature_a].feature,
                                                data.bins[term.feature_b].feature};
      result.pair_gates.emplace_back(names, gate);
      if (gate > 0.0) result.selected_pairs.push_back(names);
    } else {
      result.feature_gates.emplace_back(data.bins[term.feature_a].feature, gate);
      if (gate > 0.0) result.selected_feats.push_back(data.bins[term.feature_a].feature);
    }
  }
  PassOptions pass;
  pass.active = setup.active;
  result.val_loss = dataset_loss(model, data.x, setup.fold.validation, *data.objective, pass);
  result.val_score = validation_score(data.task, model, data, setup.fold.validation);
  result.epochs = static_cast<int>(run.history.size());
  result.gamma = setup.gamma;
  result.pair_gamma = setup.pair_gamma;
  if (result.selected_feats.empty()) result.warning = "no feature survived the sparsity penalty";
  return result;
}

}  // namespace

double validation_score(Task task, const AdditiveModel& model, const PreparedData& data,
                        std::span<const std::size_t> rows) {
  if (task == Task::kSurvival) return dataset_loss(model, data.x, rows, *data.objective, {});
  std::vector<double> pred = compute_eta(model, data.x, rows);
  apply_link(task, pred);
  std::vector<double> target;
  for (std::size_t r : rows) target.push_back(data.labels.targets[r]);
  return task == Task::kClassification ? roc_auc(pred, target) : rmse(pred, target);
}

SelectionResult select_features(const PreparedData& data, const TrainConfig& config,
                                const SelectionConfig& selection) {
  Rng rng(mix_seed(config.seed, 0x5e1ec7));
  GatedSetup setup = make_setup(data, config, selection, rng);
  const TrainResult run = run_gated(setup, data, config, selection.reg_param,
                                    selection.select_pairs ? selection.pair_reg_param : 0.0, rng);
  return collect(setup, data, run);
}

std::vector<std::string> RegularizationPath::lookup(int num_feats) const {
  auto it = feats.upper_bound(num_feats);
  if (it == feats.begin()) return {};
  return std::prev(it)->second;
}

RegularizationPath regularization_path(const PreparedData& data, const TrainConfig& config,
                                       double init_reg_param, const PathOptions& options,
                                       const SelectionConfig& base) {
  if (!(init_reg_param > 0.0)) throw ConfigError("init_reg_param must be positive");
  if (!(options.factor > 1.0)) throw ConfigError("path factor must exceed 1");
  if (options.max_steps < 1) throw ConfigError("path needs at least one step");
  Rng rng(mix_seed(config.seed, 0x9a7));
  GatedSetup setup = make_setup(data, config, base, rng);
  RegularizationPath path;
  double reg = init_reg_param;
  for (int step = 0; step < options.max_steps; ++step, reg *= options.factor) {
    if (step > 0) {
      // Saturated gates have zero gradient; reopen the survivors so the
      // larger penalty can act on them.
      for (int t = 0; t < setup.model.term_count(); ++t) {
        if (setup.active[t]) setup.model.set_mu(t, 0.25 * setup.model.term_gamma(t));
      }
    }
    const TrainResult run = run_gated(setup, data, config, reg,
                                      base.select_pairs ? base.pair_reg_param : 0.0, rng);
    const SelectionResult r = collect(setup, data, run);
    PathPoint point;
    point.reg_param = reg;
    point.num_feats = static_cast<int>(r.selected_feats.size());
    point.val_loss = r.val_loss;
    point.val_score = r.val_score;
    point.feats = r.selected_feats;
    if (!path.points.empty() && point.num_feats > path.points.back().num_feats) {
      path.nonmonotone_notes.push_back("num_feats rose from " +
                                       std::to_string(path.points.back().num_feats) + " to " +
                                       std::to_string(point.num_feats) + " at reg_param " +
                                       format_number(reg));
    }
    path.feats.emplace(point.num_feats, point.feats);
    path.points.push_back(std::move(point));
    if (path.points.back().num_feats == 0) break;
  }
  return path;
}

}  // namespace namlite
