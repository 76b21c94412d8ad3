/* SPDX-License-Identifier: Apache-2.0 */
#ifndef BGCNN_BGCNN_H
#define BGCNN_BGCNN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BGCNN_API __declspec(dllexport)
#else
#define BGCNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure bgcnn_last_error() holds
 * a one-line message for the calling thread. */
typedef enum bgcnn_status {
  BGCNN_OK = 0,
  BGCNN_INVALID_ARGUMENT = 1, /* null handle, bad index, contract violation */
  BGCNN_CONFIG = 2,           /* invalid hyperparameter or option */
  BGCNN_NOT_FOUND = 3,        /* input file missing */
  BGCNN_IO = 4,
  BGCNN_SCHEMA = 5,           /* CSV lacks a required column */
  BGCNN_PARSE = 6,            /* malformed CSV */
  BGCNN_ROW = 7,              /* invalid value in a data row */
  BGCNN_BAD_MAGIC = 8,
  BGCNN_BAD_VERSION = 9,
  BGCNN_TRUNCATED = 10,
  BGCNN_CHECKSUM = 11,
  BGCNN_MALFORMED = 12,       /* structurally invalid model or vocabulary file */
  BGCNN_NUMERIC = 13,         /* training produced NaN/inf */
  BGCNN_UNDEFINED_METRIC = 14,
  BGCNN_INTERNAL = 15
} bgcnn_status;

BGCNN_API const char* bgcnn_last_error(void);
BGCNN_API const char* bgcnn_status_name(bgcnn_status status);
BGCNN_API const char* bgcnn_version(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct bgcnn_config bgcnn_config;

/* Defaults: max_len 40, embed_dim 100, conv_filters 64, kernel_size 3,
 * pool 2, gru1_hidden 64, gru2_hidden 32, dense_hidden 64, dropout 0.5,
 * learning_rate 0.001, batch_size 32, epochs 100, seed 1337,
 * pos_weight 1, vocab_size 20000 (upper bound), min_freq 2. */
BGCNN_API bgcnn_status bgcnn_config_create(bgcnn_config** out);
BGCNN_API void bgcnn_config_destroy(bgcnn_config* config);
/* Keys are the field names above; values are parsed from text. */
BGCNN_API bgcnn_status bgcnn_config_set(bgcnn_config* config, const char* key, const char* value);
/* Writes the value as text; returns the full length like snprintf. */
BGCNN_API bgcnn_status bgcnn_config_get(const bgcnn_config* config, const char* key, char* buf, size_t buf_len,
                                        size_t* needed);

/* ---- corpus ----------------------------------------------------------- */

typedef struct bgcnn_corpus bgcnn_corpus;

typedef struct bgcnn_class_report {
  size_t count0;
  size_t count1;
  size_t total;
  int majority_label;
  double majority_fraction;
} bgcnn_class_report;

/* text_column / label_column may be NULL for "tweet" / "label". */
BGCNN_API bgcnn_status bgcnn_corpus_load_csv(const char* path, const char* text_column, const char* label_column,
                                             bgcnn_corpus** out);
BGCNN_API void bgcnn_corpus_destroy(bgcnn_corpus* corpus);
BGCNN_API size_t bgcnn_corpus_size(const bgcnn_corpus* corpus);
BGCNN_API bgcnn_status bgcnn_corpus_class_report(const bgcnn_corpus* corpus, bgcnn_class_report* out);
BGCNN_API bgcnn_status bgcnn_corpus_record(const bgcnn_corpus* corpus, size_t index, const char** id,
                                           const char** text, int* label);
/* Seeded partition. *used_stratified (may be NULL) is 0 when stratification
 * was requested but a class was empty. */
BGCNN_API bgcnn_status bgcnn_corpus_split(const bgcnn_corpus* corpus, double test_fraction, int stratified,
                                          uint64_t seed, bgcnn_corpus** train, bgcnn_corpus** test,
                                          int* used_stratified);

/* ---- training history ------------------------------------------------- */

typedef struct bgcnn_history bgcnn_history;

typedef struct bgcnn_epoch {
  size_t epoch;
  double train_loss;
  double train_acc;
  int has_val;
  double val_loss;
  double val_acc;
  double val_recall;
  int has_val_auc;
  double val_auc;
} bgcnn_epoch;

BGCNN_API void bgcnn_history_destroy(bgcnn_history* history);
BGCNN_API size_t bgcnn_history_size(const bgcnn_history* history);
BGCNN_API bgcnn_status bgcnn_history_get(const bgcnn_history* history, size_t index, bgcnn_epoch* out);
BGCNN_API bgcnn_status bgcnn_history_write_csv(const bgcnn_history* history, const char* path);
BGCNN_API bgcnn_status bgcnn_history_read_csv(const char* path, bgcnn_history** out);
/* CSV text into buf (NUL-terminated, truncated if short); *needed gets the
 * full length excluding the terminator. */
BGCNN_API bgcnn_status bgcnn_history_format_csv(const bgcnn_history* history, char* buf, size_t buf_len,
                                                size_t* needed);

/* ---- model ------------------------------------------------------------ */

typedef struct bgcnn_model bgcnn_model;

typedef struct bgcnn_report {
  size_t tp, tn, fp, fn;
  double accuracy, precision, recall, f1;
  double weighted_precision, weighted_recall, weighted_f1;
  int has_auc;
  double auc;
} bgcnn_report;

/* Called after every epoch. */
typedef void (*bgcnn_epoch_callback)(const bgcnn_epoch* epoch, void* user);

/* Builds the vocabulary on `train`, trains for the configured epochs and
 * returns the model and its history. `val` and `callback` may be NULL. */
BGCNN_API bgcnn_status bgcnn_model_train(const bgcnn_config* config, const bgcnn_corpus* train,
                                         const bgcnn_corpus* val, bgcnn_epoch_callback callback, void* user,
                                         bgcnn_model** model, bgcnn_history** history);
BGCNN_API void bgcnn_model_destroy(bgcnn_model* model);
BGCNN_API bgcnn_status bgcnn_model_save(const bgcnn_model* model, const char* path);
BGCNN_API bgcnn_status bgcnn_model_save_vocab(const bgcnn_model* model, const char* path);
BGCNN_API bgcnn_status bgcnn_model_load(const char* model_path, const char* vocab_path, bgcnn_model** out);
BGCNN_API size_t bgcnn_model_parameter_count(const bgcnn_model* model);
BGCNN_API bgcnn_status bgcnn_model_predict(bgcnn_model* model, const char* text, double* probability);
BGCNN_API bgcnn_status bgcnn_model_predict_batch(bgcnn_model* model, const char* const* texts, size_t n,
                                                 double* probabilities);
BGCNN_API bgcnn_status bgcnn_model_evaluate(bgcnn_model* model, const bgcnn_corpus* corpus, double threshold,
                                            bgcnn_report* out);

/* ---- reports ---------------------------------------------------------- */

typedef enum bgcnn_report_format { BGCNN_REPORT_TABLE = 0, BGCNN_REPORT_JSON = 1 } bgcnn_report_format;

/* Renders into buf (NUL-terminated, truncated if short) and stores the
 * full length excluding the terminator in *needed. */
BGCNN_API bgcnn_status bgcnn_report_format_text(const bgcnn_report* report, const char* algorithm,
                                                bgcnn_report_format format, char* buf, size_t buf_len,
                                                size_t* needed);

/* ---- baselines -------------------------------------------------------- */

typedef struct bgcnn_baseline_options {
  const char* algo;     /* nb, logreg, svm, knn, majority */
  const char* features; /* count, tfidf, or NULL for the algorithm default */
  size_t k;
  double learning_rate;
  double l2;
  size_t epochs;
  double alpha;
  uint64_t seed;
  size_t min_freq;
  size_t max_vocab;
} bgcnn_baseline_options;

BGCNN_API void bgcnn_baseline_options_default(bgcnn_baseline_options* options);
/* Fits on `train`, evaluates on `test`. An unknown algo is BGCNN_CONFIG. */
BGCNN_API bgcnn_status bgcnn_baseline_run(const bgcnn_baseline_options* options, const bgcnn_corpus* train,
                                          const bgcnn_corpus* test, bgcnn_report* out);
/* Human-readable algorithm title for reports, or NULL if unknown. */
BGCNN_API const char* bgcnn_baseline_title(const char* algo);
BGCNN_API const char* bgcnn_baseline_supported(void);

#ifdef __cplusplus
}
#endif

#endif /* BGCNN_BGCNN_H */
