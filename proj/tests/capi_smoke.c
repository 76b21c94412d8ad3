/* SPDX-License-Identifier: Apache-2.0 */
/* Exercises the shared library through the C header only. */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "bgcnn/bgcnn.h"

static int failures = 0;

#define CHECK(cond)                                                      \
  do {                                                                   \
    if (!(cond)) {                                                       \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                        \
    }                                                                    \
  } while (0)

#define CHECK_OK(expr)                                                          \
  do {                                                                          \
    bgcnn_status s_ = (expr);                                                   \
    if (s_ != BGCNN_OK) {                                                       \
      fprintf(stderr, "%s:%d: %s -> %s: %s\n", __FILE__, __LINE__, #expr,       \
              bgcnn_status_name(s_), bgcnn_last_error());                       \
      exit(1);                                                                  \
    }                                                                           \
  } while (0)

static int epochs_seen = 0;

static void on_epoch(const bgcnn_epoch* epoch, void* user) {
  (void)user;
  epochs_seen = (int)epoch->epoch;
}

int main(void) {
  const char* fixture = BGCNN_DATA_DIR "/fixture.csv";
  const char* model_path = BGCNN_SCRATCH_DIR "/capi_model.bgcn";
  const char* vocab_path = BGCNN_SCRATCH_DIR "/capi_vocab.tsv";

  CHECK(strcmp(bgcnn_version(), "0.1.0") == 0);
  CHECK(strcmp(bgcnn_status_name(BGCNN_CHECKSUM), bgcnn_status_name(BGCNN_TRUNCATED)) != 0);

  bgcnn_corpus* missing = NULL;
  CHECK(bgcnn_corpus_load_csv(BGCNN_DATA_DIR "/no_such_file.csv", NULL, NULL, &missing) == BGCNN_NOT_FOUND);
  CHECK(missing == NULL);
  CHECK(strstr(bgcnn_last_error(), "no_such_file.csv") != NULL);

  bgcnn_corpus* all = NULL;
  CHECK_OK(bgcnn_corpus_load_csv(fixture, NULL, NULL, &all));
  CHECK(bgcnn_corpus_size(all) == 200);
  bgcnn_class_report cls;
  CHECK_OK(bgcnn_corpus_class_report(all, &cls));
  CHECK(cls.count0 == 169 && cls.count1 == 31 && cls.majority_label == 0);

  bgcnn_corpus *train = NULL, *test = NULL;
  int stratified = 0;
  CHECK_OK(bgcnn_corpus_split(all, 0.2, 1, 42, &train, &test, &stratified));
  CHECK(stratified == 1);
  CHECK(bgcnn_corpus_size(train) == 160 && bgcnn_corpus_size(test) == 40);

  bgcnn_config* config = NULL;
  CHECK_OK(bgcnn_config_create(&config));
  CHECK(bgcnn_config_set(config, "no_such_key", "1") == BGCNN_CONFIG);
  CHECK_OK(bgcnn_config_set(config, "epochs", "3"));
  CHECK_OK(bgcnn_config_set(config, "embed_dim", "12"));
  CHECK_OK(bgcnn_config_set(config, "conv_filters", "8"));
  CHECK_OK(bgcnn_config_set(config, "gru1_hidden", "6"));
  CHECK_OK(bgcnn_config_set(config, "gru2_hidden", "4"));
  CHECK_OK(bgcnn_config_set(config, "dense_hidden", "8"));
  CHECK_OK(bgcnn_config_set(config, "max_len", "20"));
  CHECK_OK(bgcnn_config_set(config, "seed", "42"));
  char value[32];
  size_t needed = 0;
  CHECK_OK(bgcnn_config_get(config, "epochs", value, sizeof value, &needed));
  CHECK(strcmp(value, "3") == 0 && needed == 1);

  bgcnn_model* model = NULL;
  bgcnn_history* history = NULL;
  CHECK_OK(bgcnn_config_set(config, "kernel_size", "4"));
  CHECK(bgcnn_model_train(config, train, test, NULL, NULL, &model, &history) == BGCNN_CONFIG);
  CHECK(strstr(bgcnn_last_error(), "kernel_size") != NULL);
  CHECK(model == NULL && history == NULL);
  CHECK_OK(bgcnn_config_set(config, "kernel_size", "3"));
  CHECK_OK(bgcnn_model_train(config, train, test, on_epoch, NULL, &model, &history));
  CHECK(epochs_seen == 3);
  CHECK(bgcnn_history_size(history) == 3);
  bgcnn_epoch last;
  CHECK_OK(bgcnn_history_get(history, 2, &last));
  CHECK(last.epoch == 3 && last.has_val == 1 && last.has_val_auc == 1);
  CHECK(bgcnn_history_get(history, 3, &last) == BGCNN_INVALID_ARGUMENT);
  CHECK(bgcnn_model_parameter_count(model) > 0);

  CHECK_OK(bgcnn_history_format_csv(history, NULL, 0, &needed));
  CHECK(needed > 0);

  const char* texts[] = {"you are a loser", "what a lovely morning", ""};
  double probs[3], again[3];
  CHECK_OK(bgcnn_model_predict_batch(model, texts, 3, probs));
  for (int i = 0; i < 3; ++i) CHECK(probs[i] >= 0.0 && probs[i] <= 1.0);

  CHECK_OK(bgcnn_model_save(model, model_path));
  CHECK_OK(bgcnn_model_save_vocab(model, vocab_path));
  bgcnn_model* loaded = NULL;
  CHECK_OK(bgcnn_model_load(model_path, vocab_path, &loaded));
  CHECK_OK(bgcnn_model_predict_batch(loaded, texts, 3, again));
  CHECK(memcmp(probs, again, sizeof probs) == 0);

  bgcnn_report report;
  CHECK_OK(bgcnn_model_evaluate(loaded, test, 0.5, &report));
  CHECK(report.tp + report.tn + report.fp + report.fn == 40);
  CHECK(report.weighted_recall == report.accuracy);
  CHECK_OK(bgcnn_model_evaluate(loaded, test, 0.0, &report));
  CHECK(report.tn == 0 && report.fn == 0);

  char text[4096];
  CHECK_OK(bgcnn_report_format_text(&report, "BiGRU-CNN", BGCNN_REPORT_JSON, text, sizeof text, &needed));
  CHECK(needed < sizeof text && text[0] == '{');

  bgcnn_baseline_options options;
  bgcnn_baseline_options_default(&options);
  options.algo = "nb";
  CHECK_OK(bgcnn_baseline_run(&options, train, test, &report));
  CHECK(report.tp + report.tn + report.fp + report.fn == 40);
  options.algo = "rf";
  CHECK(bgcnn_baseline_run(&options, train, test, &report) == BGCNN_CONFIG);
  CHECK(bgcnn_baseline_title("rf") == NULL);
  CHECK(strcmp(bgcnn_baseline_title("nb"), "MultinomialNB") == 0);

  /* Flip one payload byte: the checksum must catch it. */
  FILE* f = fopen(model_path, "r+b");
  CHECK(f != NULL);
  if (f) {
    fseek(f, 100, SEEK_SET);
    int c = fgetc(f);
    fseek(f, 100, SEEK_SET);
    fputc(c ^ 0x20, f);
    fclose(f);
  }
  bgcnn_model* corrupt = NULL;
  CHECK(bgcnn_model_load(model_path, vocab_path, &corrupt) == BGCNN_CHECKSUM);
  CHECK(corrupt == NULL);

  remove(model_path);
  remove(vocab_path);
  bgcnn_model_destroy(loaded);
  bgcnn_model_destroy(model);
  bgcnn_history_destroy(history);
  bgcnn_config_destroy(config);
  bgcnn_corpus_destroy(train);
  bgcnn_corpus_destroy(test);
  bgcnn_corpus_destroy(all);

  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  return failures ? 1 : 0;
}
