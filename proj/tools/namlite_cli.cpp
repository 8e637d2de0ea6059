// Command-line front-end over the namlite C API.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "namlite/namlite.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// Exit codes: 0 ok, 2 config, 3 data, 4 numeric failure, 1 anything else.
struct Failure {
  int code;
  std::string message;
};

int exit_code(namlite_status status) {
  switch (status) {
    case NAMLITE_OK: return 0;
    case NAMLITE_ERR_CONFIG:
    case NAMLITE_ERR_ARGUMENT: return 2;
    case NAMLITE_ERR_DATA:
    case NAMLITE_ERR_IO: return 3;
    case NAMLITE_ERR_NUMERIC: return 4;
    default: return 1;
  }
}

void check(namlite_status status) {
  if (status != NAMLITE_OK) throw Failure{exit_code(status), namlite_last_error()};
}

// Owns a string returned by the library.
class CString {
 public:
  CString() = default;
  ~CString() { namlite_string_free(p_); }
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  char** out() { return &p_; }
  std::string str() const { return p_ ? std::string(p_) : std::string(); }

 private:
  char* p_ = nullptr;
};

struct Dataset {
  namlite_dataset* p = nullptr;
  explicit Dataset(const fs::path& path) { check(namlite_dataset_read_csv(path.c_str(), &p)); }
  ~Dataset() { namlite_dataset_free(p); }
  Dataset(const Dataset&) = delete;
  Dataset& operator=(const Dataset&) = delete;
};

struct Model {
  namlite_model* p = nullptr;
  Model() = default;
  explicit Model(const fs::path& path) { check(namlite_model_load(path.c_str(), &p)); }
  ~Model() { namlite_model_free(p); }
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
};

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{3, "cannot write '" + path.string() + "'"};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{2, "cannot read config '" + path.string() + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Run configuration with paths made absolute against the config directory.
struct LoadedConfig {
  Json json;
  fs::path train_data;
  fs::path test_data;
  fs::path output_dir;
};

LoadedConfig load_config(const fs::path& path, int threads) {
  LoadedConfig c;
  try {
    c.json = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw Failure{2, std::string("malformed config: ") + e.what()};
  }
  if (!c.json.is_object()) throw Failure{2, "config must be a JSON object"};
  const fs::path base = fs::absolute(path).parent_path();
  auto resolve = [&](const char* key) -> fs::path {
    if (!c.json.contains(key)) return {};
    if (!c.json[key].is_string()) throw Failure{2, std::string("'") + key + "' must be a string"};
    fs::path p = c.json[key].get<std::string>();
    if (p.is_relative()) p = base / p;
    c.json[key] = p.string();
    return p;
  };
  c.train_data = resolve("train_data");
  c.test_data = resolve("test_data");
  c.output_dir = resolve("output_dir");
  resolve("selection_file");
  if (c.output_dir.empty()) c.output_dir = base;
  if (threads > 0) c.json["threads"] = threads;
  return c;
}

const fs::path& require_train_data(const LoadedConfig& c) {
  if (c.train_data.empty()) throw Failure{2, "config lacks 'train_data'"};
  return c.train_data;
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' ? ch : '_';
  return out;
}

std::string fixed(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

void print_metrics(const std::string& label, const Json& m) {
  std::cout << label << ":";
  for (const auto& [key, value] : m.items()) {
    if (key == "n") continue;
    std::cout << " " << key << "=" << (value.is_number() ? fixed(value.get<double>()) : value.dump());
  }
  std::cout << " (n=" << m.value("n", 0) << ")\n";
}

struct TrainArgs {
  std::string config;
  std::string model_out;
  int threads = 0;
};

int cmd_train(const TrainArgs& args) {
  const LoadedConfig config = load_config(args.config, args.threads);
  const std::string config_text = config.json.dump();
  Dataset train(require_train_data(config));
  Model model;
  CString report;
  check(namlite_train(train.p, config_text.c_str(), &model.p, report.out()));
  const fs::path model_path = args.model_out.empty() ? config.output_dir / "model.json" : fs::path(args.model_out);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  check(namlite_model_save(model.p, model_path.c_str()));
  CString hash;
  check(namlite_model_hash(model.p, hash.out()));

  Json metrics;
  metrics["model"] = model_path.string();
  metrics["model_hash"] = hash.str();
  metrics["fit"] = Json::parse(report.str());
  std::cout << "model: " << model_path.string() << " (hash " << hash.str() << ")\n";
  std::cout << "validation loss (mean over " << metrics["fit"]["splits"].size()
            << " splits): " << fixed(metrics["fit"]["mean_val_loss"].get<double>()) << "\n";
  {
    CString eval;
    check(namlite_evaluate(model.p, train.p, config_text.c_str(), eval.out()));
    metrics["train"] = Json::parse(eval.str());
    print_metrics("train", metrics["train"]);
  }
  if (!config.test_data.empty()) {
    Dataset test(config.test_data);
    CString eval;
    check(namlite_evaluate(model.p, test.p, config_text.c_str(), eval.out()));
    metrics["test"] = Json::parse(eval.str());
    print_metrics("test", metrics["test"]);
  }
  write_file(config.output_dir / "metrics.json", metrics.dump(2) + "\n");
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string data;
  std::string output;
};

int cmd_predict(const PredictArgs& args) {
  Model model(args.model);
  Dataset data(args.data);
  CString csv;
  check(namlite_predict_csv(model.p, data.p, csv.out()));
  if (args.output.empty()) {
    std::cout << csv.str();
  } else {
    write_file(args.output, csv.str());
  }
  return 0;
}

struct SelectArgs {
  std::string config;
  std::string output;
  int threads = 0;
};

int cmd_select(const SelectArgs& args) {
  const LoadedConfig config = load_config(args.config, args.threads);
  Dataset train(require_train_data(config));
  CString result;
  check(namlite_select(train.p, config.json.dump().c_str(), result.out()));
  const fs::path out = args.output.empty() ? config.output_dir / "selection.json" : fs::path(args.output);
  write_file(out, result.str());
  const Json j = Json::parse(result.str());
  std::cout << "selected " << j["selected_feats"].size() << " features";
  if (!j["selected_pairs"].empty()) std::cout << " and " << j["selected_pairs"].size() << " pairs";
  std::cout << " -> " << out.string() << "\n";
  if (j.contains("warning")) std::cerr << "warning: " << j["warning"].get<std::string>() << "\n";
  return 0;
}

struct PathArgs {
  std::string config;
  std::string output_dir;
  double init_reg_param = 0.0;
  double factor = 2.0;
  int max_steps = 20;
  int threads = 0;
};

int cmd_path(const PathArgs& args) {
  const LoadedConfig config = load_config(args.config, args.threads);
  Dataset train(require_train_data(config));
  CString json;
  CString csv;
  check(namlite_path(train.p, config.json.dump().c_str(), args.init_reg_param, args.factor, args.max_steps,
                     json.out(), csv.out()));
  const fs::path dir = args.output_dir.empty() ? config.output_dir : fs::path(args.output_dir);
  write_file(dir / "path.csv", csv.str());
  write_file(dir / "path_feats.json", json.str());
  std::cout << csv.str();
  return 0;
}

struct ExplainArgs {
  std::string model;
  bool importance = false;
  std::string mode = "include";
  std::string data;
  std::vector<std::string> shapes;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> eval_times;
  bool include_missing = false;
  std::string format = "json";
  std::string output_dir = ".";
  std::string svg_dir;
  int top_n = 10;
};

void emit(const ExplainArgs& args, const std::string& stem, const std::string& json, const std::string& csv,
          const char* plot) {
  const fs::path dir = args.output_dir;
  if (args.format == "csv") {
    write_file(dir / (stem + ".csv"), csv);
  } else {
    write_file(dir / (stem + ".json"), json);
  }
  if (!args.svg_dir.empty()) {
    CString svg;
    check(namlite_render_svg(json.c_str(), plot, args.top_n, svg.out()));
    write_file(fs::path(args.svg_dir) / (stem + ".svg"), svg.str());
  }
}

int cmd_explain(const ExplainArgs& args) {
  if (!args.importance && args.shapes.empty() && args.pairs.empty()) {
    throw Failure{2, "nothing to explain: pass --importance, --shape or --pair"};
  }
  Model model(args.model);
  const double* times = args.eval_times.empty() ? nullptr : args.eval_times.data();
  const std::size_t n_times = args.eval_times.size();
  if (args.importance) {
    std::unique_ptr<Dataset> pooled;
    if (!args.data.empty()) pooled = std::make_unique<Dataset>(args.data);
    CString json;
    CString csv;
    check(namlite_importance(model.p, args.mode.c_str(), pooled ? pooled->p : nullptr, times, n_times,
                             NAMLITE_FORMAT_JSON, json.out()));
    check(namlite_importance(model.p, args.mode.c_str(), pooled ? pooled->p : nullptr, times, n_times,
                             NAMLITE_FORMAT_CSV, csv.out()));
    emit(args, "importance_" + args.mode, json.str(), csv.str(), "importance-bars");
    const Json j = Json::parse(json.str());
    for (const auto& e : j["entries"]) {
      std::string name = e["feature"].get<std::string>();
      if (e.contains("feature_b")) name += " x " + e["feature_b"].get<std::string>();
      std::cout << name << "\t" << fixed(e["score"].get<double>()) << "\t" << fixed(e["se"].get<double>());
      if (e.contains("missing_score")) {
        std::cout << "\t" << fixed(e["missing_score"].get<double>()) << "\t" << fixed(e["missing_se"].get<double>());
      }
      std::cout << "\n";
    }
  }
  for (const auto& feature : args.shapes) {
    CString json;
    CString csv;
    check(namlite_shape(model.p, feature.c_str(), args.include_missing, times, n_times, NAMLITE_FORMAT_JSON,
                        json.out()));
    check(namlite_shape(model.p, feature.c_str(), args.include_missing, times, n_times, NAMLITE_FORMAT_CSV,
                        csv.out()));
    emit(args, "shape_" + safe_name(feature), json.str(), csv.str(), nullptr);
  }
  for (const auto& [a, b] : args.pairs) {
    CString json;
    CString csv;
    check(namlite_pair_shape(model.p, a.c_str(), b.c_str(), times, n_times, NAMLITE_FORMAT_JSON, json.out()));
    check(namlite_pair_shape(model.p, a.c_str(), b.c_str(), times, n_times, NAMLITE_FORMAT_CSV, csv.out()));
    emit(args, "pair_" + safe_name(a) + "_" + safe_name(b), json.str(), csv.str(), "pair-heatmap");
  }
  return 0;
}

struct CalibrateArgs {
  std::string model;
  std::string data;
  std::string config;
  std::vector<double> eval_times;
  int bins = 10;
  std::string output = "calibration.csv";
  std::string svg;
  std::string time_column;
  std::string event_column;
};

int cmd_calibrate(const CalibrateArgs& args) {
  Json labels = Json::object();
  if (!args.config.empty()) labels = load_config(args.config, 0).json;
  if (!args.time_column.empty()) labels["time_column"] = args.time_column;
  if (!args.event_column.empty()) labels["event_column"] = args.event_column;
  const std::string labels_text = labels.dump();
  Model model(args.model);
  Dataset data(args.data);
  const double* times = args.eval_times.empty() ? nullptr : args.eval_times.data();
  CString csv;
  check(namlite_calibrate(model.p, data.p, labels_text.c_str(), times, args.eval_times.size(), args.bins,
                          NAMLITE_FORMAT_CSV, csv.out()));
  write_file(args.output, csv.str());
  std::cout << csv.str();
  if (!args.svg.empty()) {
    CString json;
    check(namlite_calibrate(model.p, data.p, labels_text.c_str(), times, args.eval_times.size(), args.bins,
                            NAMLITE_FORMAT_JSON, json.out()));
    CString svg;
    check(namlite_render_svg(json.str().c_str(), "calibration", 0, svg.out()));
    write_file(args.svg, svg.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"namlite: neural additive models with feature selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", namlite_version());

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train an ensemble and write model.json");
  train_cmd->add_option("config", train.config, "run configuration (JSON)")->required();
  train_cmd->add_option("--model-out", train.model_out, "model path (default: <output_dir>/model.json)");
  train_cmd->add_option("--threads", train.threads, "worker threads (default: NAMLITE_THREADS or one per split)");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "write predictions for a CSV");
  predict_cmd->add_option("model", predict.model)->required();
  predict_cmd->add_option("data", predict.data)->required();
  predict_cmd->add_option("-o,--output", predict.output, "CSV path (default: stdout)");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "feature selection at reg_param");
  select_cmd->add_option("config", select.config)->required();
  select_cmd->add_option("-o,--output", select.output, "default: <output_dir>/selection.json");
  select_cmd->add_option("--threads", select.threads);

  PathArgs path;
  auto* path_cmd = app.add_subcommand("path", "regularization path");
  path_cmd->add_option("config", path.config)->required();
  path_cmd->add_option("--init-reg-param", path.init_reg_param)->required();
  path_cmd->add_option("--factor", path.factor, "reg_param multiplier per step")->capture_default_str();
  path_cmd->add_option("--max-steps", path.max_steps)->capture_default_str();
  path_cmd->add_option("--output-dir", path.output_dir, "default: <output_dir>");
  path_cmd->add_option("--threads", path.threads);

  ExplainArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "importances and shape functions");
  explain_cmd->add_option("model", explain.model)->required();
  explain_cmd->add_flag("--importance", explain.importance);
  explain_cmd->add_option("--mode", explain.mode)
      ->check(CLI::IsMember({"include", "ignore", "stratify"}))
      ->capture_default_str();
  explain_cmd->add_option("--data", explain.data, "score on this CSV instead of the split training folds");
  explain_cmd->add_option("--shape", explain.shapes, "feature names");
  explain_cmd->add_option("--pair", explain.pairs, "two feature names");
  explain_cmd->add_option("--eval-times", explain.eval_times, "survival times");
  explain_cmd->add_flag("--include-missing", explain.include_missing, "add the missing bin to shapes");
  explain_cmd->add_option("--format", explain.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  explain_cmd->add_option("--output-dir", explain.output_dir)->capture_default_str();
  explain_cmd->add_option("--svg-dir", explain.svg_dir, "also write SVG plots here");
  explain_cmd->add_option("--top-n", explain.top_n, "features in the importance plot")->capture_default_str();

  CalibrateArgs calibrate;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "survival calibration table");
  calibrate_cmd->add_option("model", calibrate.model)->required();
  calibrate_cmd->add_option("data", calibrate.data)->required();
  calibrate_cmd->add_option("--config", calibrate.config, "run configuration for label column names");
  calibrate_cmd->add_option("--eval-times", calibrate.eval_times, "default: grid median time");
  calibrate_cmd->add_option("--bins", calibrate.bins)->capture_default_str();
  calibrate_cmd->add_option("-o,--output", calibrate.output)->capture_default_str();
  calibrate_cmd->add_option("--svg", calibrate.svg, "SVG path");
  calibrate_cmd->add_option("--time-column", calibrate.time_column);
  calibrate_cmd->add_option("--event-column", calibrate.event_column);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*predict_cmd) return cmd_predict(predict);
    if (*select_cmd) return cmd_select(select);
    if (*path_cmd) return cmd_path(path);
    if (*explain_cmd) return cmd_explain(explain);
    if (*calibrate_cmd) return cmd_calibrate(calibrate);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
