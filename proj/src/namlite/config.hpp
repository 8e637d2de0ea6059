#ifndef NAMLITE_CONFIG_HPP
#define NAMLITE_CONFIG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "namlite/ensemble.hpp"
#include "namlite/selection.hpp"
#include "namlite/table.hpp"

namespace namlite {

using Json = nlohmann::ordered_json;

// Every TrainConfig field under its configuration key; unset optionals are
// written as null.
Json train_config_to_json(const TrainConfig& config);

// Reads TrainConfig keys from `json` on top of `base`. Keys belonging to the
// run configuration are skipped; any other unknown key is a ConfigError.
TrainConfig train_config_from_json(const Json& json, TrainConfig base = {});

struct RunConfig {
  TrainConfig train;
  SelectionConfig selection;
  std::filesystem::path train_data;
  std::filesystem::path test_data;
  std::string target = "target";
  std::string time_column = "time";
  std::string event_column = "event";
  std::filesystem::path output_dir = ".";
  std::vector<std::string> exclude;
  std::vector<std::string> features;  // explicit feature subset
  std::filesystem::path selection_file;
};

// Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(const Json& json, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Reads `selection_file` (the output of feature selection) into the feature
// subset and interaction list of `config`.
void apply_selection_file(RunConfig& config);

struct TaskData {
  Table features;
  Labels labels;
};

// Label columns, excluded columns and (when given) non-listed features are
// removed from the feature table. Missing label columns raise DataError.
TaskData split_task_data(const Table& table, const RunConfig& config);

// Applies the run configuration to a dataset already in memory.
TaskData split_task_data(const Table& table, const TrainConfig& train, const std::string& target,
                         const std::string& time_column, const std::string& event_column,
                         const std::vector<std::string>& exclude,
                         const std::vector<std::string>& features);

Json parse_json_text(std::string_view text);  // ConfigError on malformed input

}  // namespace namlite

#endif  // NAMLITE_CONFIG_HPP
