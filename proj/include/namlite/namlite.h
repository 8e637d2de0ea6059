/* C interface to the namlite library. */
#ifndef NAMLITE_NAMLITE_H
#define NAMLITE_NAMLITE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define NAMLITE_API __attribute__((visibility("default")))
#else
#define NAMLITE_API
#endif

typedef enum {
  NAMLITE_OK = 0,
  NAMLITE_ERR_INTERNAL = 1,
  NAMLITE_ERR_CONFIG = 2,
  NAMLITE_ERR_DATA = 3,
  NAMLITE_ERR_NUMERIC = 4,
  NAMLITE_ERR_IO = 5,
  NAMLITE_ERR_ARGUMENT = 6
} namlite_status;

typedef enum { NAMLITE_FORMAT_JSON = 0, NAMLITE_FORMAT_CSV = 1 } namlite_format;

typedef struct namlite_dataset namlite_dataset;
typedef struct namlite_model namlite_model;

NAMLITE_API const char* namlite_version(void);

/* Message of the last failed call on this thread; "" when none. */
NAMLITE_API const char* namlite_last_error(void);

/* Every char** output is allocated by the library and released here. */
NAMLITE_API void namlite_string_free(char* s);

/* Datasets: CSV with a header row. */
NAMLITE_API namlite_status namlite_dataset_read_csv(const char* path, namlite_dataset** out);
NAMLITE_API namlite_status namlite_dataset_parse_csv(const char* text, namlite_dataset** out);
NAMLITE_API size_t namlite_dataset_rows(const namlite_dataset* data);
NAMLITE_API size_t namlite_dataset_cols(const namlite_dataset* data);
NAMLITE_API void namlite_dataset_free(namlite_dataset* data);

/* Training. `config_json` takes the run configuration keys (task, target,
   time_column, event_column, exclude, features, selection_file and every
   training setting); data paths in it are ignored. `report_json` may be NULL. */
NAMLITE_API namlite_status namlite_train(const namlite_dataset* data, const char* config_json,
                                         namlite_model** out, char** report_json);

NAMLITE_API namlite_status namlite_model_save(const namlite_model* model, const char* path);
NAMLITE_API namlite_status namlite_model_load(const char* path, namlite_model** out);
NAMLITE_API namlite_status namlite_model_to_json(const namlite_model* model, char** out);
NAMLITE_API namlite_status namlite_model_from_json(const char* text, namlite_model** out);
NAMLITE_API namlite_status namlite_model_hash(const namlite_model* model, char** out);
/* Task, features, pairs, evaluation times, output width and split count. */
NAMLITE_API namlite_status namlite_model_info(const namlite_model* model, char** out);
NAMLITE_API void namlite_model_free(namlite_model* model);

/* Linked predictions, row-major rows x cols. With out == NULL only the shape
   is reported; otherwise `capacity` must hold rows * cols values. */
NAMLITE_API namlite_status namlite_predict(const namlite_model* model, const namlite_dataset* data,
                                           double* out, size_t capacity, size_t* rows, size_t* cols);
NAMLITE_API namlite_status namlite_predict_csv(const namlite_model* model, const namlite_dataset* data,
                                               char** out);
/* Held-out metrics as JSON; label columns are named as in `config_json`
   (NULL for the defaults). */
NAMLITE_API namlite_status namlite_evaluate(const namlite_model* model, const namlite_dataset* data,
                                            const char* config_json, char** out);

/* Feature selection with reg_param, pair_reg_param, select_pairs,
   selection_gamma and selection_pair_gamma from `config_json`. */
NAMLITE_API namlite_status namlite_select(const namlite_dataset* data, const char* config_json,
                                          char** result_json);
/* Regularization path from init_reg_param; `path_csv` may be NULL. */
NAMLITE_API namlite_status namlite_path(const namlite_dataset* data, const char* config_json,
                                        double init_reg_param, double factor, int max_steps,
                                        char** path_json, char** path_csv);

/* Explanations. `mode` is include, ignore or stratify; `pooled` (may be NULL)
   replaces the per-split training folds. `times` selects survival outputs. */
NAMLITE_API namlite_status namlite_importance(const namlite_model* model, const char* mode,
                                              const namlite_dataset* pooled, const double* times,
                                              size_t n_times, namlite_format format, char** out);
NAMLITE_API namlite_status namlite_shape(const namlite_model* model, const char* feature,
                                         int include_missing, const double* times, size_t n_times,
                                         namlite_format format, char** out);
NAMLITE_API namlite_status namlite_pair_shape(const namlite_model* model, const char* feature_a,
                                              const char* feature_b, const double* times,
                                              size_t n_times, namlite_format format, char** out);
/* Survival calibration with `n_bins` prediction bins at each time (the grid
   median when n_times == 0). */
NAMLITE_API namlite_status namlite_calibrate(const namlite_model* model, const namlite_dataset* data,
                                             const char* config_json, const double* times,
                                             size_t n_times, int n_bins, namlite_format format,
                                             char** out);

/* SVG for a JSON export. `kind`: importance-bars, shape-line,
   shape-category-bars, pair-heatmap, calibration, or NULL to pick from the
   export. top_n <= 0 keeps the default of 10. */
NAMLITE_API namlite_status namlite_render_svg(const char* export_json, const char* kind, int top_n,
                                              char** out);

#ifdef __cplusplus
}
#endif

#endif /* NAMLITE_NAMLITE_H */
