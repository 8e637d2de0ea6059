#include "namlite/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "namlite/error.hpp"

namespace namlite {
namespace {

const std::set<std::string, std::less<>> kRunKeys = {
    "train_data", "test_data",    "target",    "time_column",    "event_column",
    "output_dir", "exclude",      "features",  "selection_file", "reg_param",
    "pair_reg_param", "select_pairs", "selection_gamma", "selection_pair_gamma"};

template <typename T>
T read(const Json& json, const char* key) {
  try {
    return json.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("invalid value for '") + key + "'");
  }
}

template <typename T>
std::optional<T> read_optional(const Json& json, const char* key) {
  if (json.at(key).is_null()) return std::nullopt;
  return read<T>(json, key);
}

template <typename T>
Json optional_json(const std::optional<T>& value) {
  return value ? Json(*value) : Json(nullptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

Json train_config_to_json(const TrainConfig& c) {
  Json j;
  j["task"] = std::string(to_string(c.task));
  j["n_val_splits"] = c.n_val_splits;
  j["batch_size"] = c.train.batch_size;
  j["max_epochs"] = c.train.max_epochs;
  j["early_stop_patience"] = c.train.patience;
  j["learning_rate"] = c.train.adam.learning_rate;
  j["num_pairs"] = c.num_pairs;
  j["embedding_dim"] = c.architecture.embedding_dim;
  j["hidden_dims"] = c.architecture.hidden;
  j["activation"] = std::string(to_string(c.architecture.activation));
  j["kernel_size"] = c.architecture.kernel.size;
  j["kernel_weight"] = c.architecture.kernel.phi;
  j["seed"] = c.seed;
  j["gamma"] = optional_json(c.gamma);
  j["pair_gamma"] = optional_json(c.pair_gamma);
  j["max_bins"] = c.max_bins;
  j["min_samples_per_bin"] = optional_json(c.min_samples_per_bin);
  Json kinds = Json::object();
  for (const auto& [name, kind] : c.kinds) kinds[name] = std::string(to_string(kind));
  j["schema"] = kinds;
  Json monotone = Json::object();
  for (const auto& [name, direction] : c.monotone) monotone[name] = direction;
  j["monotone"] = monotone;
  j["censor_estimator"] = std::string(to_string(c.censor_estimator));
  j["n_eval_times"] = optional_json(c.n_eval_times);
  j["pair_selection_reg"] = c.pair_selection_reg;
  j["selection_epochs"] = c.selection_epochs;
  Json pairs = Json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back(Json::array({a, b}));
  j["pairs"] = pairs;
  return j;
}

TrainConfig train_config_from_json(const Json& json, TrainConfig c) {
  if (!json.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : json.items()) {
    const char* k = key.c_str();
    if (kRunKeys.count(key)) continue;
    if (key == "task") {
      c.task = task_from_string(read<std::string>(json, k));
    } else if (key == "n_val_splits") {
      c.n_val_splits = read<int>(json, k);
    } else if (key == "batch_size") {
      c.train.batch_size = read<int>(json, k);
    } else if (key == "max_epochs") {
      c.train.max_epochs = read<int>(json, k);
    } else if (key == "early_stop_patience") {
      c.train.patience = read<int>(json, k);
    } else if (key == "learning_rate") {
      c.train.adam.learning_rate = read<double>(json, k);
    } else if (key == "num_pairs") {
      c.num_pairs = read<int>(json, k);
    } else if (key == "embedding_dim") {
      c.architecture.embedding_dim = read<int>(json, k);
    } else if (key == "hidden_dims") {
      c.architecture.hidden = read<std::vector<int>>(json, k);
    } else if (key == "activation") {
      c.architecture.activation = activation_from_string(read<std::string>(json, k));
    } else if (key == "kernel_size") {
      c.architecture.kernel.size = read<int>(json, k);
    } else if (key == "kernel_weight") {
      c.architecture.kernel.phi = read<double>(json, k);
    } else if (key == "seed") {
      c.seed = read<std::uint64_t>(json, k);
    } else if (key == "gamma") {
      c.gamma = read_optional<double>(json, k);
    } else if (key == "pair_gamma") {
      c.pair_gamma = read_optional<double>(json, k);
    } else if (key == "max_bins") {
      c.max_bins = read<int>(json, k);
    } else if (key == "min_samples_per_bin") {
      c.min_samples_per_bin = read_optional<int>(json, k);
    } else if (key == "schema") {
      c.kinds.clear();
      for (const auto& [name, kind] : read<std::map<std::string, std::string>>(json, k)) {
        c.kinds[name] = feature_kind_from_string(kind);
      }
    } else if (key == "monotone") {
      c.monotone.clear();
      for (const auto& [name, direction] : read<std::map<std::string, int>>(json, k)) {
        c.monotone[name] = direction;
      }
    } else if (key == "threads") {
      c.threads = read<int>(json, k);
    } else if (key == "censor_estimator") {
      c.censor_estimator = censor_estimator_from_string(read<std::string>(json, k));
    } else if (key == "n_eval_times") {
      c.n_eval_times = read_optional<int>(json, k);
    } else if (key == "pair_selection_reg") {
      c.pair_selection_reg = read<double>(json, k);
    } else if (key == "selection_epochs") {
      c.selection_epochs = read<int>(json, k);
    } else if (key == "pairs") {
      c.pairs = read<std::vector<std::pair<std::string, std::string>>>(json, k);
    } else {
      throw ConfigError("unknown configuration key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig parse_run_config(const Json& json, const std::filesystem::path& base_dir) {
  RunConfig run;
  run.train = train_config_from_json(json);
  if (json.contains("train_data")) run.train_data = resolve(base_dir, read<std::string>(json, "train_data"));
  if (json.contains("test_data")) run.test_data = resolve(base_dir, read<std::string>(json, "test_data"));
  if (json.contains("target")) run.target = read<std::string>(json, "target");
  if (json.contains("time_column")) run.time_column = read<std::string>(json, "time_column");
  if (json.contains("event_column")) run.event_column = read<std::string>(json, "event_column");
  if (json.contains("output_dir")) run.output_dir = resolve(base_dir, read<std::string>(json, "output_dir"));
  if (json.contains("exclude")) run.exclude = read<std::vector<std::string>>(json, "exclude");
  if (json.contains("features")) run.features = read<std::vector<std::string>>(json, "features");
  if (json.contains("selection_file")) {
    run.selection_file = resolve(base_dir, read<std::string>(json, "selection_file"));
  }
  if (json.contains("reg_param")) run.selection.reg_param = read<double>(json, "reg_param");
  if (json.contains("pair_reg_param")) run.selection.pair_reg_param = read<double>(json, "pair_reg_param");
  if (json.contains("select_pairs")) run.selection.select_pairs = read<bool>(json, "select_pairs");
  if (json.contains("selection_gamma")) run.selection.gamma = read_optional<double>(json, "selection_gamma");
  if (json.contains("selection_pair_gamma")) {
    run.selection.pair_gamma = read_optional<double>(json, "selection_pair_gamma");
  }
  if (run.selection.reg_param < 0.0 || run.selection.pair_reg_param < 0.0) {
    throw ConfigError("regularization parameters must be non-negative");
  }
  return run;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(parse_json_text(read_file(path)), path.parent_path());
}

void apply_selection_file(RunConfig& config) {
  if (config.selection_file.empty()) return;
  const Json json = parse_json_text(read_file(config.selection_file));
  if (!json.contains("selected_feats")) throw ConfigError("selection file lacks 'selected_feats'");
  config.features = read<std::vector<std::string>>(json, "selected_feats");
  if (json.contains("selected_pairs")) {
    config.train.pairs = read<std::vector<std::pair<std::string, std::string>>>(json, "selected_pairs");
  }
  if (config.features.empty()) throw ConfigError("selection file selects no features");
}

TaskData split_task_data(const Table& table, const TrainConfig& train, const std::string& target,
                         const std::string& time_column, const std::string& event_column,
                         const std::vector<std::string>& exclude,
                         const std::vector<std::string>& features) {
  TaskData data;
  data.labels = extract_labels(table, train.task, target, time_column, event_column);
  std::vector<std::string> drop = exclude;
  if (train.task == Task::kSurvival) {
    drop.push_back(time_column);
    drop.push_back(event_column);
  } else {
    drop.push_back(target);
  }
  if (features.empty()) {
    data.features = table.without(drop);
  } else {
    std::vector<Column> columns;
    for (const auto& name : features) columns.push_back(table.column(name));
    data.features = Table(std::move(columns));
  }
  return data;
}

TaskData split_task_data(const Table& table, const RunConfig& config) {
  return split_task_data(table, config.train, config.target, config.time_column,
                         config.event_column, config.exclude, config.features);
}

}  // namespace namlite
