#include "namlite/namlite.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "namlite/config.hpp"
#include "namlite/error.hpp"
#include "namlite/exports.hpp"
#include "namlite/model_io.hpp"
#include "namlite/svg.hpp"

struct namlite_dataset {
  namlite::Table table;
};

struct namlite_model {
  namlite::EnsembleModel ensemble;
};

namespace {

thread_local std::string g_last_error;

namlite_status fail(namlite_status status, const char* message) {
  g_last_error = message;
  return status;
}

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

template <typename F>
namlite_status run(F&& body) {
  g_last_error.clear();
  try {
    body();
    return NAMLITE_OK;
  } catch (const ArgumentError& e) {
    return fail(NAMLITE_ERR_ARGUMENT, e.what());
  } catch (const namlite::ConfigError& e) {
    return fail(NAMLITE_ERR_CONFIG, e.what());
  } catch (const namlite::DataError& e) {
    return fail(NAMLITE_ERR_DATA, e.what());
  } catch (const namlite::NumericError& e) {
    return fail(NAMLITE_ERR_NUMERIC, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(NAMLITE_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(NAMLITE_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NAMLITE_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(NAMLITE_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NAMLITE_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) throw ArgumentError(std::string(name) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

namlite::RunConfig run_config(const char* config_json) {
  if (config_json == nullptr || *config_json == '\0') return {};
  namlite::RunConfig config =
      namlite::parse_run_config(namlite::parse_json_text(config_json), std::filesystem::current_path());
  if (!config.selection_file.empty()) namlite::apply_selection_file(config);
  return config;
}

std::vector<double> times_of(const double* times, std::size_t n) {
  if (n > 0 && times == nullptr) throw ArgumentError("times is NULL");
  return n == 0 ? std::vector<double>{} : std::vector<double>(times, times + n);
}

std::string dump(const namlite::Json& j) { return j.dump(2) + "\n"; }

}  // namespace

extern "C" {

const char* namlite_version(void) { return "0.1.0"; }

const char* namlite_last_error(void) { return g_last_error.c_str(); }

void namlite_string_free(char* s) { std::free(s); }

namlite_status namlite_dataset_read_csv(const char* path, namlite_dataset** out) {
  return run([&] {
    need(path, "path");
    need(out, "out");
    *out = new namlite_dataset{namlite::read_csv(path)};
  });
}

namlite_status namlite_dataset_parse_csv(const char* text, namlite_dataset** out) {
  return run([&] {
    need(text, "text");
    need(out, "out");
    *out = new namlite_dataset{namlite::parse_csv(text)};
  });
}

size_t namlite_dataset_rows(const namlite_dataset* data) { return data ? data->table.rows() : 0; }
size_t namlite_dataset_cols(const namlite_dataset* data) { return data ? data->table.cols() : 0; }
void namlite_dataset_free(namlite_dataset* data) { delete data; }

namlite_status namlite_train(const namlite_dataset* data, const char* config_json, namlite_model** out,
                             char** report_json) {
  return run([&] {
    need(data, "data");
    need(out, "out");
    const namlite::RunConfig config = run_config(config_json);
    const namlite::TaskData task = namlite::split_task_data(data->table, config);
    namlite::FitReport report;
    auto model = std::make_unique<namlite_model>();
    model->ensemble = namlite::fit(task.features, task.labels, config.train, &report);
    if (report_json != nullptr) *report_json = dup(dump(namlite::fit_report_to_json(model->ensemble, report)));
    *out = model.release();
  });
}

namlite_status namlite_model_save(const namlite_model* model, const char* path) {
  return run([&] {
    need(model, "model");
    need(path, "path");
    namlite::save_model(model->ensemble, path);
  });
}

namlite_status namlite_model_load(const char* path, namlite_model** out) {
  return run([&] {
    need(path, "path");
    need(out, "out");
    *out = new namlite_model{namlite::load_model(path)};
  });
}

namlite_status namlite_model_to_json(const namlite_model* model, char** out) {
  return run([&] {
    need(model, "model");
    need(out, "out");
    *out = dup(namlite::model_to_text(model->ensemble));
  });
}

namlite_status namlite_model_from_json(const char* text, namlite_model** out) {
  return run([&] {
    need(text, "text");
    need(out, "out");
    *out = new namlite_model{namlite::model_from_text(text)};
  });
}

namlite_status namlite_model_hash(const namlite_model* model, char** out) {
  return run([&] {
    need(model, "model");
    need(out, "out");
    *out = dup(namlite::model_hash(model->ensemble));
  });
}

namlite_status namlite_model_info(const namlite_model* model, char** out) {
  return run([&] {
    need(model, "model");
    need(out, "out");
    const auto& e = model->ensemble;
    namlite::Json j;
    j["task"] = std::string(namlite::to_string(e.task));
    j["features"] = e.feature_names();
    namlite::Json pairs = namlite::Json::array();
    for (const auto& [a, b] : e.pairs) pairs.push_back({e.schema[a].name, e.schema[b].name});
    j["pairs"] = pairs;
    j["eval_times"] = e.eval_times;
    j["output_dim"] = e.output_dim();
    j["n_splits"] = e.splits.size();
    j["model_hash"] = namlite::model_hash(e);
    *out = dup(dump(j));
  });
}

void namlite_model_free(namlite_model* model) { delete model; }

namlite_status namlite_predict(const namlite_model* model, const namlite_dataset* data, double* out,
                               size_t capacity, size_t* rows, size_t* cols) {
  return run([&] {
    need(model, "model");
    need(data, "data");
    const std::size_t r = data->table.rows();
    const std::size_t c = static_cast<std::size_t>(model->ensemble.output_dim());
    if (rows != nullptr) *rows = r;
    if (cols != nullptr) *cols = c;
    if (out == nullptr) return;
    if (capacity < r * c) throw ArgumentError("output buffer too small");
    const std::vector<double> pred = namlite::predict(model->ensemble, data->table);
    std::copy(pred.begin(), pred.end(), out);
  });
}

namlite_status namlite_predict_csv(const namlite_model* model, const namlite_dataset* data, char** out) {
  return run([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    *out = dup(namlite::predictions_to_csv(model->ensemble, namlite::predict(model->ensemble, data->table)));
  });
}

namlite_status namlite_evaluate(const namlite_model* model, const namlite_dataset* data,
                                const char* config_json, char** out) {
  return run([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    namlite::RunConfig config = run_config(config_json);
    config.train.task = model->ensemble.task;
    config.features.clear();
    const namlite::TaskData task = namlite::split_task_data(data->table, config);
    *out = dup(dump(namlite::evaluate_model(model->ensemble, task.features, task.labels)));
  });
}

namlite_status namlite_select(const namlite_dataset* data, const char* config_json, char** result_json) {
  return run([&] {
    need(data, "data");
    need(result_json, "result_json");
    const namlite::RunConfig config = run_config(config_json);
    const namlite::TaskData task = namlite::split_task_data(data->table, config);
    const namlite::PreparedData prepared = namlite::prepare_data(task.features, task.labels, config.train);
    const namlite::SelectionResult result = namlite::select_features(prepared, config.train, config.selection);
    namlite::Json j = namlite::selection_to_json(result);
    j["reg_param"] = config.selection.reg_param;
    j["pair_reg_param"] = config.selection.pair_reg_param;
    j["config"] = namlite::train_config_to_json(config.train);
    *result_json = dup(dump(j));
  });
}

namlite_status namlite_path(const namlite_dataset* data, const char* config_json, double init_reg_param,
                            double factor, int max_steps, char** path_json, char** path_csv) {
  return run([&] {
    need(data, "data");
    need(path_json, "path_json");
    if (!(init_reg_param > 0.0)) throw namlite::ConfigError("init_reg_param must be positive");
    if (!(factor > 1.0)) throw namlite::ConfigError("path factor must exceed 1");
    if (max_steps < 1) throw namlite::ConfigError("max_steps must be positive");
    const namlite::RunConfig config = run_config(config_json);
    const namlite::TaskData task = namlite::split_task_data(data->table, config);
    const namlite::PreparedData prepared = namlite::prepare_data(task.features, task.labels, config.train);
    const namlite::RegularizationPath path = namlite::regularization_path(
        prepared, config.train, init_reg_param, {factor, max_steps}, config.selection);
    namlite::Json j = namlite::path_to_json(path);
    j["init_reg_param"] = init_reg_param;
    j["factor"] = factor;
    j["config"] = namlite::train_config_to_json(config.train);
    std::string csv = path_csv != nullptr ? namlite::path_to_csv(path) : std::string();
    *path_json = dup(dump(j));
    if (path_csv != nullptr) *path_csv = dup(csv);
  });
}

namlite_status namlite_importance(const namlite_model* model, const char* mode, const namlite_dataset* pooled,
                                  const double* times, size_t n_times, namlite_format format, char** out) {
  return run([&] {
    need(model, "model");
    need(out, "out");
    const auto& e = model->ensemble;
    const namlite::ImportanceMode m =
        namlite::importance_mode_from_string(mode != nullptr ? mode : "include");
    const std::vector<double> t = times_of(times, n_times);
    namlite::BinnedMatrix x;
    if (pooled != nullptr) x = namlite::transform_for(e, pooled->table);
    const namlite::ImportanceReport report = namlite::feature_importance(e, m, pooled ? &x : nullptr, t);
    const namlite::ExportMeta meta = namlite::export_meta(e);
    *out = dup(format == NAMLITE_FORMAT_CSV ? namlite::importance_to_csv(report, meta)
                                             : dump(namlite::importance_to_json(report, meta)));
  });
}

namlite_status namlite_shape(const namlite_model* model, const char* feature, int include_missing,
                             const double* times, size_t n_times, namlite_format format, char** out) {
  return run([&] {
    need(model, "model");
    need(feature, "feature");
    need(out, "out");
    const namlite::ShapeExport shape =
        namlite::shape_function(model->ensemble, feature, include_missing != 0, times_of(times, n_times));
    const namlite::ExportMeta meta = namlite::export_meta(model->ensemble);
    *out = dup(format == NAMLITE_FORMAT_CSV ? namlite::shape_to_csv(shape, meta)
                                             : dump(namlite::shape_to_json(shape, meta)));
  });
}

namlite_status namlite_pair_shape(const namlite_model* model, const char* feature_a, const char* feature_b,
                                  const double* times, size_t n_times, namlite_format format, char** out) {
  return run([&] {
    need(model, "model");
    need(feature_a, "feature_a");
    need(feature_b, "feature_b");
    need(out, "out");
    const namlite::PairShapeExport shape =
        namlite::pair_shape_function(model->ensemble, feature_a, feature_b, times_of(times, n_times));
    const namlite::ExportMeta meta = namlite::export_meta(model->ensemble);
    *out = dup(format == NAMLITE_FORMAT_CSV ? namlite::pair_shape_to_csv(shape, meta)
                                             : dump(namlite::pair_shape_to_json(shape, meta)));
  });
}

namlite_status namlite_calibrate(const namlite_model* model, const namlite_dataset* data, const char* config_json,
                                 const double* times, size_t n_times, int n_bins, namlite_format format,
                                 char** out) {
  return run([&] {
    need(model, "model");
    need(data, "data");
    need(out, "out");
    const auto& e = model->ensemble;
    if (e.task != namlite::Task::kSurvival) throw namlite::ConfigError("calibration needs a survival model");
    namlite::RunConfig config = run_config(config_json);
    config.train.task = e.task;
    config.features.clear();
    const namlite::TaskData task = namlite::split_task_data(data->table, config);
    const namlite::BinnedMatrix x = namlite::transform_for(e, task.features);
    std::vector<double> t = times_of(times, n_times);
    if (t.empty()) t.push_back(e.eval_times[(e.eval_times.size() - 1) / 2]);
    std::vector<namlite::CalibrationExport> tables;
    for (double time : t) tables.push_back(namlite::calibrate(e, x, task.labels.survival, time, n_bins));
    const namlite::ExportMeta meta = namlite::export_meta(e);
    *out = dup(format == NAMLITE_FORMAT_CSV ? namlite::calibration_to_csv(tables, meta)
                                             : dump(namlite::calibration_to_json(tables, meta)));
  });
}

namlite_status namlite_render_svg(const char* export_json, const char* kind, int top_n, char** out) {
  return run([&] {
    need(export_json, "export_json");
    need(out, "out");
    const namlite::Json j = namlite::parse_json_text(export_json);
    namlite::PlotKind plot;
    if (kind != nullptr) {
      plot = namlite::plot_kind_from_string(kind);
    } else {
      const std::string k = j.is_object() ? j.value("kind", std::string()) : std::string();
      if (k == "importance") {
        plot = namlite::PlotKind::kImportanceBars;
      } else if (k == "shape") {
        plot = namlite::default_shape_plot(j);
      } else if (k == "pair_shape") {
        plot = namlite::PlotKind::kPairHeatmap;
      } else if (k == "calibration") {
        plot = namlite::PlotKind::kCalibration;
      } else {
        throw namlite::ConfigError("unrecognized export kind '" + k + "'");
      }
    }
    namlite::SvgOptions options;
    if (top_n > 0) options.top_n = top_n;
    *out = dup(namlite::render_svg(j, plot, options));
  });
}

}  // extern "C"
