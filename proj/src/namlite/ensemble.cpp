#include "namlite/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <set>
#include <thread>

#include "namlite/error.hpp"
#include "namlite/gates.hpp"
#include "namlite/objective.hpp"

namespace namlite {
namespace {

constexpr int kMaxPairCandidateFeatures = 20;

std::string lower(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

std::optional<bool> parse_flag(std::string_view cell) {
  const std::string t = lower(cell);
  if (t == "true") return true;
  if (t == "false") return false;
  const auto v = parse_number(cell);
  if (v && *v == 1.0) return true;
  if (v && *v == 0.0) return false;
  return std::nullopt;
}

std::string row_text(std::size_t row) { return std::to_string(row + 1); }

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

void set_gates(AdditiveModel& model, double fraction) {
  for (int t = 0; t < model.term_count(); ++t) model.set_mu(t, fraction * model.term_gamma(t));
}

// Mean absolute centered main-effect output over the counted samples.
std::vector<double> main_importance(const AdditiveModel& model,
                                    const std::vector<std::vector<std::int64_t>>& counts) {
  std::vector<double> scores;
  for (int t = 0; t < model.term_count(); ++t) {
    if (model.term(t).is_pair()) continue;
    const auto table = term_table(model, t);
    const auto& c = counts[t];
    const double total = static_cast<double>(std::accumulate(c.begin(), c.end(), std::int64_t{0}));
    double mean = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) mean += static_cast<double>(c[i]) * table[i];
    mean /= total;
    double score = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) score += static_cast<double>(c[i]) * std::abs(table[i] - mean);
    scores.push_back(model.gate(t) * score / total);
  }
  return scores;
}

std::vector<char> term_mask(const AdditiveModel& model, bool pairs) {
  std::vector<char> mask(static_cast<std::size_t>(model.term_count()), 0);
  for (int t = 0; t < model.term_count(); ++t) mask[t] = model.term(t).is_pair() == pairs ? 1 : 0;
  return mask;
}

struct PairSelection {
  std::vector<std::pair<int, int>> chosen;
  std::vector<std::pair<int, int>> candidates;
  std::vector<double> gates;
};

PairSelection select_pairs(const PreparedData& data, const TrainConfig& config, const Fold& fold,
                           std::span<const int> monotone, double gamma, double pair_gamma) {
  const int out = data.objective->output_dim();
  const int p = static_cast<int>(data.bins.size());
  Rng rng(mix_seed(config.seed, 0x9a125));
  AdditiveModel mains = make_model(data.bins, monotone, {}, out, config.architecture, gamma, pair_gamma);
  for (int t = 0; t < mains.term_count(); ++t) mains.initialize_term(t, rng);
  set_gates(mains, 0.5);
  train_early_stopping(mains, data.x, fold.train, fold.validation, *data.objective, config.train, {}, rng);

  std::vector<double> importance;
  if (p > kMaxPairCandidateFeatures) {
    importance = main_importance(mains, term_counts(mains, data.x, fold.train));
  }
  PairSelection selection;
  selection.candidates = candidate_pairs(p, importance);

  AdditiveModel model = make_model(data.bins, monotone, selection.candidates, out,
                                   config.architecture, gamma, pair_gamma);
  std::copy(mains.params().begin(), mains.params().end(), model.params().begin());
  for (int t = mains.term_count(); t < model.term_count(); ++t) {
    model.initialize_term(t, rng);
    model.set_mu(t, 0.25 * pair_gamma);
  }
  const auto rows = all_rows(data.x.n_samples);
  const std::vector<double> base = compute_eta(mains, data.x, rows);
  std::vector<char> active = term_mask(model, true);
  const std::vector<char> trainable = active;
  GatedTraining gated;
  gated.pair_reg = config.pair_selection_reg;
  gated.trainable = trainable;
  gated.base_eta = base;
  TrainOptions options = config.train;
  options.max_epochs = config.selection_epochs;
  train_gated(model, data.x, fold.train, fold.validation, *data.objective, options, gated, active, rng);

  std::vector<int> order(selection.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t c = 0; c < selection.candidates.size(); ++c) {
    selection.gates.push_back(model.gate(mains.term_count() + static_cast<int>(c)));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return selection.gates[a] > selection.gates[b]; });
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(config.num_pairs), order.size());
  for (std::size_t i = 0; i < keep; ++i) selection.chosen.push_back(selection.candidates[order[i]]);
  std::sort(selection.chosen.begin(), selection.chosen.end());
  return selection;
}

SplitModel fit_split(const PreparedData& data, const TrainConfig& config, const Fold& fold,
                     int split, std::span<const int> monotone,
                     std::span<const std::pair<int, int>> pairs, double gamma, double pair_gamma) {
  const int out = data.objective->output_dim();
  Rng rng(mix_seed(config.seed, 0x5b11700 + static_cast<std::uint64_t>(split)));
  SplitModel result;
  result.model = make_model(data.bins, monotone, pairs, out, config.architecture, gamma, pair_gamma);
  AdditiveModel& model = result.model;
  for (int t = 0; t < model.term_count(); ++t) model.initialize_term(t, rng);
  set_gates(model, 0.5);

  const std::vector<char> mains = term_mask(model, false);
  PassOptions pass;
  pass.active = mains;
  pass.trainable = mains;
  TrainResult r = train_early_stopping(model, data.x, fold.train, fold.validation,
                                       *data.objective, config.train, pass, rng);
  result.best_epoch = r.best_epoch;
  result.val_loss = r.best_val_loss;

  if (!pairs.empty()) {
    const auto rows = all_rows(data.x.n_samples);
    const std::vector<double> base = compute_eta(model, data.x, rows, pass);
    const std::vector<char> pair_terms = term_mask(model, true);
    PassOptions pair_pass;
    pair_pass.active = pair_terms;
    pair_pass.trainable = pair_terms;
    pair_pass.base_eta = base;
    TrainResult pr = train_early_stopping(model, data.x, fold.train, fold.validation,
                                          *data.objective, config.train, pair_pass, rng);
    result.pair_best_epoch = pr.best_epoch;
    result.pair_val_loss = pr.best_val_loss;
  }
  result.train_counts = term_counts(model, data.x, fold.train);
  finalize(model, result.train_counts);
  return result;
}

}  // namespace

std::string_view to_string(CensorEstimator estimator) {
  return estimator == CensorEstimator::kCox ? "cox" : "km";
}

CensorEstimator censor_estimator_from_string(std::string_view text) {
  if (text == "km" || text == "kaplan-meier") return CensorEstimator::kKaplanMeier;
  if (text == "cox") return CensorEstimator::kCox;
  throw ConfigError("unknown censor estimator '" + std::string(text) + "'");
}

Labels Labels::select(std::span<const std::size_t> rows) const {
  Labels out;
  out.task = task;
  for (std::size_t r : rows) {
    if (task == Task::kSurvival) {
      out.survival.push_back(survival[r]);
    } else {
      out.targets.push_back(targets[r]);
    }
  }
  return out;
}

Labels extract_labels(const Table& table, Task task, const std::string& target,
                      const std::string& time_column, const std::string& event_column) {
  Labels labels;
  labels.task = task;
  if (task == Task::kSurvival) {
    const Column& time = table.column(time_column);
    const Column& event = table.column(event_column);
    for (std::size_t i = 0; i < table.rows(); ++i) {
      const auto t = parse_number(time.cells[i]);
      if (!t || !std::isfinite(*t) || *t < 0.0) {
        throw DataError("invalid survival time '" + time.cells[i] + "' in row " + row_text(i));
      }
      const auto e = parse_flag(event.cells[i]);
      if (!e) throw DataError("invalid event indicator '" + event.cells[i] + "' in row " + row_text(i));
      labels.survival.push_back({*e, std::max(*t, kMinSurvivalTime)});
    }
    return labels;
  }
  const Column& column = table.column(target);
  for (std::size_t i = 0; i < table.rows(); ++i) {
    if (task == Task::kClassification) {
      const auto y = parse_flag(column.cells[i]);
      if (!y) throw DataError("classification target must be 0/1 in row " + row_text(i));
      labels.targets.push_back(*y ? 1.0 : 0.0);
    } else {
      const auto y = parse_number(column.cells[i]);
      if (!y || !std::isfinite(*y)) {
        throw DataError("invalid target '" + column.cells[i] + "' in row " + row_text(i));
      }
      labels.targets.push_back(*y);
    }
  }
  return labels;
}

void TrainConfig::validate() const {
  if (n_val_splits < 2) throw ConfigError("n_val_splits must be at least 2");
  if (train.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (train.max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
  if (train.patience < 1) throw ConfigError("early_stop_patience must be at least 1");
  if (!(train.adam.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (num_pairs < 0) throw ConfigError("num_pairs must be non-negative");
  if (architecture.embedding_dim < 1) throw ConfigError("embedding_dim must be positive");
  if (architecture.kernel.size < 0) throw ConfigError("kernel_size must be non-negative");
  if (!(architecture.kernel.phi >= 0.0)) throw ConfigError("kernel_weight must be non-negative");
  if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (pair_gamma && !(*pair_gamma > 0.0)) throw ConfigError("pair_gamma must be positive");
  if (max_bins < 1) throw ConfigError("max_bins must be at least 1");
  if (min_samples_per_bin && *min_samples_per_bin < 1) {
    throw ConfigError("min_samples_per_bin must be at least 1");
  }
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (n_eval_times && *n_eval_times < 1) throw ConfigError("n_eval_times must be at least 1");
  if (pair_selection_reg < 0.0) throw ConfigError("pair_selection_reg must be non-negative");
  if (selection_epochs < 0) throw ConfigError("selection_epochs must be non-negative");
  for (const auto& [name, direction] : monotone) {
    if (direction < -1 || direction > 1) {
      throw ConfigError("monotone direction for '" + name + "' must be -1, 0 or 1");
    }
    if (direction != 0 && task == Task::kSurvival) {
      throw ConfigError("monotone constraints are not supported for survival");
    }
  }
}

std::vector<double> cox_design(const Table& features, std::span<const BinMap> bins,
                               std::size_t& n_cols) {
  const std::size_t n = features.rows();
  std::vector<std::vector<double>> columns;
  for (const BinMap& map : bins) {
    const Column& column = features.column(map.feature);
    if (map.is_continuous()) {
      std::vector<double> values(n, 0.0);
      std::vector<char> missing(n, 0);
      double sum = 0.0;
      double count = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = column.is_missing(i) ? std::nullopt : parse_number(column.cells[i]);
        if (!v) {
          missing[i] = 1;
          continue;
        }
        values[i] = *v;
        sum += *v;
        count += 1.0;
      }
      if (count == 0.0) continue;
      const double mean = sum / count;
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!missing[i]) ss += (values[i] - mean) * (values[i] - mean);
      }
      const double sd = std::sqrt(ss / count);
      if (sd > 0.0) {
        for (std::size_t i = 0; i < n; ++i) values[i] = missing[i] ? 0.0 : (values[i] - mean) / sd;
        columns.push_back(std::move(values));
      }
      if (count < static_cast<double>(n)) {
        std::vector<double> indicator(missing.begin(), missing.end());
        columns.push_back(std::move(indicator));
      }
    } else {
      const auto index = map.transform(column);
      std::set<int> levels(index.begin(), index.end());
      bool first = true;
      for (int level : levels) {
        if (first) {
          first = false;
          continue;
        }
        std::vector<double> dummy(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) dummy[i] = index[i] == level ? 1.0 : 0.0;
        columns.push_back(std::move(dummy));
      }
    }
  }
  n_cols = columns.size();
  std::vector<double> design(n * n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) {
    for (std::size_t i = 0; i < n; ++i) design[i * n_cols + j] = columns[j][i];
  }
  return design;
}

PreparedData prepare_data(const Table& features, const Labels& labels, const TrainConfig& config) {
  config.validate();
  if (features.cols() == 0) throw DataError("no feature columns");
  if (labels.task != config.task) throw ConfigError("labels do not match the configured task");
  if (labels.size() != features.rows()) throw DataError("label count does not match the row count");
  for (const auto& [name, kind] : config.kinds) {
    if (!features.has_column(name)) throw ConfigError("schema override for unknown column '" + name + "'");
  }
  for (const auto& [name, direction] : config.monotone) {
    if (!features.has_column(name)) throw ConfigError("monotone constraint for unknown column '" + name + "'");
  }
  PreparedData data;
  data.task = config.task;
  data.schema = infer_schema(features, config.kinds);
  const int min_samples = config.min_samples_per_bin.value_or(default_min_samples_per_bin(features.rows()));
  for (const auto& feature : data.schema) {
    data.bins.push_back(fit_bins(features.column(feature.name), feature, config.max_bins, min_samples));
  }
  data.x = transform_table(features, data.bins);
  data.labels = labels;

  switch (config.task) {
    case Task::kRegression:
      data.objective = std::make_shared<SquaredError>(labels.targets);
      break;
    case Task::kClassification:
      data.objective = std::make_shared<Logistic>(labels.targets);
      break;
    case Task::kSurvival: {
      const int k = config.n_eval_times.value_or(default_eval_time_count(labels.survival));
      data.eval_times = eval_time_grid(labels.survival, std::max(k, 1));
      std::unique_ptr<CensorSurvival> censor;
      if (config.censor_estimator == CensorEstimator::kCox) {
        std::size_t n_cols = 0;
        std::vector<double> design = cox_design(features, data.bins, n_cols);
        std::vector<SurvivalLabel> flipped = labels.survival;
        for (auto& l : flipped) l.event = !l.event;
        CoxModel cox = cox_fit(design, n_cols, flipped);
        censor = std::make_unique<CoxCensor>(std::move(cox), std::move(design), n_cols);
      } else {
        censor = std::make_unique<KaplanMeierCensor>(censoring_kaplan_meier(labels.survival));
      }
      IpcwTerms terms = ipcw_terms(labels.survival, data.eval_times, *censor);
      data.clamped_weights = terms.clamped;
      data.objective = std::make_shared<IpcwBrier>(std::move(terms));
      break;
    }
  }
  return data;
}

int EnsembleModel::feature_index(std::string_view name) const {
  for (int j = 0; j < n_features(); ++j) {
    if (bins[j].feature == name) return j;
  }
  return -1;
}

int EnsembleModel::pair_term(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p].first == a && pairs[p].second == b) return n_features() + static_cast<int>(p);
  }
  return -1;
}

std::vector<std::string> EnsembleModel::feature_names() const {
  std::vector<std::string> names;
  for (const auto& b : bins) names.push_back(b.feature);
  return names;
}

AdditiveModel make_model(const std::vector<BinMap>& bins, std::span<const int> monotone,
                         std::span<const std::pair<int, int>> pairs, int output_dim,
                         const Architecture& architecture, double gamma, double pair_gamma) {
  AdditiveModel model(output_dim, architecture, gamma, pair_gamma);
  for (std::size_t j = 0; j < bins.size(); ++j) {
    model.add_main(static_cast<int>(j), bins[j].index_space(), monotone.empty() ? 0 : monotone[j]);
  }
  for (const auto& [a, b] : pairs) {
    model.add_pair(a, bins[a].index_space(), b, bins[b].index_space());
  }
  return model;
}

std::vector<std::pair<int, int>> candidate_pairs(int n_features, std::span<const double> importance) {
  std::vector<int> features(static_cast<std::size_t>(n_features));
  std::iota(features.begin(), features.end(), 0);
  if (n_features > kMaxPairCandidateFeatures) {
    if (importance.size() != features.size()) throw std::invalid_argument("importance size mismatch");
    std::stable_sort(features.begin(), features.end(),
                     [&](int a, int b) { return importance[a] > importance[b]; });
    features.resize(kMaxPairCandidateFeatures);
    std::sort(features.begin(), features.end());
  }
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t j = i + 1; j < features.size(); ++j) pairs.emplace_back(features[i], features[j]);
  }
  return pairs;
}

void parallel_for(int n, int threads, const std::function<void(int)>& work) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0)));
  threads = std::clamp(threads, 1, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next++; i < n; i = next++) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int resolve_threads(int requested, int fallback) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NAMLITE_THREADS")) {
    const auto v = parse_number(env);
    if (!v || *v < 1 || *v != std::floor(*v)) {
      throw ConfigError("NAMLITE_THREADS must be a positive integer");
    }
    return static_cast<int>(*v);
  }
  return std::max(fallback, 1);
}

EnsembleModel fit_prepared(const PreparedData& data, const TrainConfig& config, FitReport* report) {
  config.validate();
  const std::size_t n = data.x.n_samples;
  const std::vector<Fold> folds = split_folds(n, config.n_val_splits, config.seed);

  EnsembleModel ensemble;
  ensemble.task = config.task;
  ensemble.schema = data.schema;
  ensemble.bins = data.bins;
  ensemble.eval_times = data.eval_times;
  ensemble.config = config;
  ensemble.gamma = config.gamma.value_or(
      default_gamma(folds[0].train.size(), config.train.batch_size, config.architecture.embedding_dim));
  ensemble.pair_gamma = config.pair_gamma.value_or(ensemble.gamma / 4.0);
  ensemble.monotone.assign(data.bins.size(), 0);
  for (const auto& [name, direction] : config.monotone) {
    const int j = ensemble.feature_index(name);
    if (j < 0) throw ConfigError("monotone constraint for unknown feature '" + name + "'");
    ensemble.monotone[j] = direction;
  }

  if (report) report->clamped_weights = data.clamped_weights;
  if (!config.pairs.empty()) {
    for (const auto& [a, b] : config.pairs) {
      int ia = ensemble.feature_index(a);
      int ib = ensemble.feature_index(b);
      if (ia < 0 || ib < 0 || ia == ib) {
        throw ConfigError("invalid interaction '" + a + "' x '" + b + "'");
      }
      if (ia > ib) std::swap(ia, ib);
      if (ensemble.pair_term(ia, ib) < 0) ensemble.pairs.emplace_back(ia, ib);
    }
    std::sort(ensemble.pairs.begin(), ensemble.pairs.end());
  } else if (config.num_pairs > 0 && data.bins.size() >= 2) {
    PairSelection selection = select_pairs(data, config, folds[0], ensemble.monotone,
                                           ensemble.gamma, ensemble.pair_gamma);
    ensemble.pairs = selection.chosen;
    if (report) {
      for (const auto& [a, b] : selection.candidates) {
        report->candidate_pairs.emplace_back(data.bins[a].feature, data.bins[b].feature);
      }
      report->pair_gates = selection.gates;
    }
  }

  ensemble.splits.resize(folds.size());
  const int threads = resolve_threads(config.threads, static_cast<int>(folds.size()));
  parallel_for(static_cast<int>(folds.size()), threads, [&](int s) {
    ensemble.splits[s] = fit_split(data, config, folds[s], s, ensemble.monotone, ensemble.pairs,
                                   ensemble.gamma, ensemble.pair_gamma);
  });
  return ensemble;
}

EnsembleModel fit(const Table& features, const Labels& labels, const TrainConfig& config,
                  FitReport* report) {
  return fit_prepared(prepare_data(features, labels, config), config, report);
}

BinnedMatrix transform_for(const EnsembleModel& ensemble, const Table& table) {
  return transform_table(table, ensemble.bins);
}

std::vector<double> predict_binned(const EnsembleModel& ensemble, const BinnedMatrix& x) {
  if (ensemble.splits.empty()) throw ConfigError("model has no trained splits");
  const auto rows = all_rows(x.n_samples);
  std::vector<double> mean;
  for (const auto& split : ensemble.splits) {
    std::vector<double> eta = compute_eta(split.model, x, rows);
    apply_link(ensemble.task, eta);
    if (mean.empty()) {
      mean = std::move(eta);
    } else {
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += eta[i];
    }
  }
  const double k = static_cast<double>(ensemble.splits.size());
  for (double& v : mean) v /= k;
  return mean;
}

std::vector<double> predict(const EnsembleModel& ensemble, const Table& table) {
  return predict_binned(ensemble, transform_for(ensemble, table));
}

}  // namespace namlite
