// SPDX-License-Identifier: Apache-2.0
#include "bgcnn/bgcnn.h"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <string_view>

#include "baselines/runner.hpp"
#include "common/error.hpp"
#include "data/corpus.hpp"
#include "eval/history.hpp"
#include "eval/report.hpp"
#include "model/model_io.hpp"
#include "model/trainer.hpp"
#include "text/vocab.hpp"

using namespace bgcnn;

struct bgcnn_config {
  ModelConfig model;
  std::size_t max_vocab = 20000;
  std::size_t min_freq = 2;
};

struct bgcnn_corpus {
  std::vector<data::RawTweet> records;
};

struct bgcnn_history {
  std::vector<eval::EpochRecord> records;
};

struct bgcnn_model {
  Classifier classifier;
};

namespace {

thread_local std::string g_last_error;

bgcnn_status fail(bgcnn_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

bgcnn_status status_of(const ModelFormatError& e) {
  switch (e.kind()) {
    case ModelFormatError::Kind::BadMagic:
      return BGCNN_BAD_MAGIC;
    case ModelFormatError::Kind::BadVersion:
      return BGCNN_BAD_VERSION;
    case ModelFormatError::Kind::Truncated:
      return BGCNN_TRUNCATED;
    case ModelFormatError::Kind::Checksum:
      return BGCNN_CHECKSUM;
    case ModelFormatError::Kind::Malformed:
      return BGCNN_MALFORMED;
  }
  return BGCNN_INTERNAL;
}

template <typename F>
bgcnn_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return BGCNN_OK;
  } catch (const ModelFormatError& e) {
    return fail(status_of(e), e.what());
  } catch (const NotFoundError& e) {
    return fail(BGCNN_NOT_FOUND, e.what());
  } catch (const IoError& e) {
    return fail(BGCNN_IO, e.what());
  } catch (const ConfigError& e) {
    return fail(BGCNN_CONFIG, e.what());
  } catch (const SchemaError& e) {
    return fail(BGCNN_SCHEMA, e.what());
  } catch (const ParseError& e) {
    return fail(BGCNN_PARSE, e.what());
  } catch (const RowError& e) {
    return fail(BGCNN_ROW, e.what());
  } catch (const NumericError& e) {
    return fail(BGCNN_NUMERIC, e.what());
  } catch (const UndefinedMetricError& e) {
    return fail(BGCNN_UNDEFINED_METRIC, e.what());
  } catch (const ContractViolation& e) {
    return fail(BGCNN_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BGCNN_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BGCNN_INTERNAL, e.what());
  } catch (...) {
    return fail(BGCNN_INTERNAL, "unknown error");
  }
}

void check_arg(const void* p, const char* name) {
  if (!p) throw ContractViolation(std::string(name) + " must not be null");
}

bgcnn_epoch to_c(const eval::EpochRecord& r) {
  bgcnn_epoch e{};
  e.epoch = r.epoch;
  e.train_loss = r.train_loss;
  e.train_acc = r.train_acc;
  e.has_val = r.val_loss.has_value();
  e.val_loss = r.val_loss.value_or(0.0);
  e.val_acc = r.val_acc.value_or(0.0);
  e.val_recall = r.val_recall.value_or(0.0);
  e.has_val_auc = r.val_auc.has_value();
  e.val_auc = r.val_auc.value_or(0.0);
  return e;
}

bgcnn_report to_c(const eval::EvalReport& r) {
  bgcnn_report out{};
  out.tp = r.confusion.tp;
  out.tn = r.confusion.tn;
  out.fp = r.confusion.fp;
  out.fn = r.confusion.fn;
  out.accuracy = r.accuracy;
  out.precision = r.precision;
  out.recall = r.recall;
  out.f1 = r.f1;
  out.weighted_precision = r.weighted_precision;
  out.weighted_recall = r.weighted_recall;
  out.weighted_f1 = r.weighted_f1;
  out.has_auc = r.auc.has_value();
  out.auc = r.auc.value_or(0.0);
  return out;
}

eval::EvalReport from_c(const bgcnn_report& r) {
  eval::EvalReport out;
  out.confusion = {r.tp, r.tn, r.fp, r.fn};
  out.accuracy = r.accuracy;
  out.precision = r.precision;
  out.recall = r.recall;
  out.f1 = r.f1;
  out.weighted_precision = r.weighted_precision;
  out.weighted_recall = r.weighted_recall;
  out.weighted_f1 = r.weighted_f1;
  if (r.has_auc) out.auc = r.auc;
  return out;
}

void copy_out(const std::string& text, char* buf, size_t buf_len, size_t* needed) {
  if (needed) *needed = text.size();
  if (buf && buf_len > 0) {
    const size_t n = std::min(text.size(), buf_len - 1);
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
  }
}

std::size_t parse_size(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(std::string_view key, std::string_view value) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return v;
}

struct SizeKey {
  const char* name;
  std::size_t ModelConfig::*field;
};
constexpr SizeKey kSizeKeys[] = {
    {"max_len", &ModelConfig::max_len},         {"embed_dim", &ModelConfig::embed_dim},
    {"conv_filters", &ModelConfig::conv_filters}, {"kernel_size", &ModelConfig::kernel_size},
    {"pool", &ModelConfig::pool},               {"gru1_hidden", &ModelConfig::gru1_hidden},
    {"gru2_hidden", &ModelConfig::gru2_hidden}, {"dense_hidden", &ModelConfig::dense_hidden},
    {"batch_size", &ModelConfig::batch_size},   {"epochs", &ModelConfig::epochs},
};

struct RealKey {
  const char* name;
  double ModelConfig::*field;
};
constexpr RealKey kRealKeys[] = {
    {"dropout", &ModelConfig::dropout_rate},
    {"learning_rate", &ModelConfig::learning_rate},
    {"pos_weight", &ModelConfig::pos_weight},
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

extern "C" {

const char* bgcnn_last_error(void) { return g_last_error.c_str(); }

const char* bgcnn_status_name(bgcnn_status status) {
  switch (status) {
    case BGCNN_OK: return "ok";
    case BGCNN_INVALID_ARGUMENT: return "invalid argument";
    case BGCNN_CONFIG: return "configuration error";
    case BGCNN_NOT_FOUND: return "not found";
    case BGCNN_IO: return "i/o error";
    case BGCNN_SCHEMA: return "schema error";
    case BGCNN_PARSE: return "parse error";
    case BGCNN_ROW: return "row error";
    case BGCNN_BAD_MAGIC: return "bad magic";
    case BGCNN_BAD_VERSION: return "unsupported version";
    case BGCNN_TRUNCATED: return "truncated file";
    case BGCNN_CHECKSUM: return "checksum mismatch";
    case BGCNN_MALFORMED: return "malformed file";
    case BGCNN_NUMERIC: return "numeric error";
    case BGCNN_UNDEFINED_METRIC: return "undefined metric";
    case BGCNN_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bgcnn_version(void) { return "0.1.0"; }

bgcnn_status bgcnn_config_create(bgcnn_config** out) {
  return guarded([&] {
    check_arg(out, "out");
    *out = new bgcnn_config();
  });
}

void bgcnn_config_destroy(bgcnn_config* config) { delete config; }

bgcnn_status bgcnn_config_set(bgcnn_config* config, const char* key, const char* value) {
  return guarded([&] {
    check_arg(config, "config");
    check_arg(key, "key");
    check_arg(value, "value");
    const std::string_view k = key, v = value;
    for (const auto& s : kSizeKeys)
      if (k == s.name) {
        config->model.*s.field = parse_size(k, v);
        return;
      }
    for (const auto& r : kRealKeys)
      if (k == r.name) {
        config->model.*r.field = parse_real(k, v);
        return;
      }
    if (k == "seed") {
      config->model.seed = parse_size(k, v);
    } else if (k == "vocab_size") {
      config->max_vocab = parse_size(k, v);
    } else if (k == "min_freq") {
      config->min_freq = parse_size(k, v);
    } else {
      throw ConfigError("unknown configuration key '" + std::string(k) + "'");
    }
  });
}

bgcnn_status bgcnn_config_get(const bgcnn_config* config, const char* key, char* buf, size_t buf_len,
                              size_t* needed) {
  return guarded([&] {
    check_arg(config, "config");
    check_arg(key, "key");
    const std::string_view k = key;
    std::string text;
    for (const auto& s : kSizeKeys)
      if (k == s.name) text = std::to_string(config->model.*s.field);
    for (const auto& r : kRealKeys)
      if (k == r.name) text = format_real(config->model.*r.field);
    if (k == "seed") text = std::to_string(config->model.seed);
    if (k == "vocab_size") text = std::to_string(config->max_vocab);
    if (k == "min_freq") text = std::to_string(config->min_freq);
    if (text.empty()) throw ConfigError("unknown configuration key '" + std::string(k) + "'");
    copy_out(text, buf, buf_len, needed);
  });
}

bgcnn_status bgcnn_corpus_load_csv(const char* path, const char* text_column, const char* label_column,
                                   bgcnn_corpus** out) {
  return guarded([&] {
    check_arg(path, "path");
    check_arg(out, "out");
    auto corpus = std::make_unique<bgcnn_corpus>();
    corpus->records = data::load_csv(path, text_column ? text_column : "tweet", label_column ? label_column : "label");
    *out = corpus.release();
  });
}

void bgcnn_corpus_destroy(bgcnn_corpus* corpus) { delete corpus; }

size_t bgcnn_corpus_size(const bgcnn_corpus* corpus) { return corpus ? corpus->records.size() : 0; }

bgcnn_status bgcnn_corpus_class_report(const bgcnn_corpus* corpus, bgcnn_class_report* out) {
  return guarded([&] {
    check_arg(corpus, "corpus");
    check_arg(out, "out");
    const auto r = data::class_report(corpus->records);
    *out = {r.counts[0], r.counts[1], r.total, r.majority_label, r.majority_fraction};
  });
}

bgcnn_status bgcnn_corpus_record(const bgcnn_corpus* corpus, size_t index, const char** id, const char** text,
                                 int* label) {
  return guarded([&] {
    check_arg(corpus, "corpus");
    if (index >= corpus->records.size()) throw ContractViolation("record index out of range");
    const auto& r = corpus->records[index];
    if (id) *id = r.id.c_str();
    if (text) *text = r.text.c_str();
    if (label) *label = r.label;
  });
}

bgcnn_status bgcnn_corpus_split(const bgcnn_corpus* corpus, double test_fraction, int stratified, uint64_t seed,
                                bgcnn_corpus** train, bgcnn_corpus** test, int* used_stratified) {
  return guarded([&] {
    check_arg(corpus, "corpus");
    check_arg(train, "train");
    check_arg(test, "test");
    const auto split = data::split(corpus->records, test_fraction, stratified != 0, seed);
    auto tr = std::make_unique<bgcnn_corpus>();
    auto te = std::make_unique<bgcnn_corpus>();
    tr->records = split.subset(data::Split::Train);
    te->records = split.subset(data::Split::Test);
    if (used_stratified) *used_stratified = split.stratified ? 1 : 0;
    *train = tr.release();
    *test = te.release();
  });
}

void bgcnn_history_destroy(bgcnn_history* history) { delete history; }

size_t bgcnn_history_size(const bgcnn_history* history) { return history ? history->records.size() : 0; }

bgcnn_status bgcnn_history_get(const bgcnn_history* history, size_t index, bgcnn_epoch* out) {
  return guarded([&] {
    check_arg(history, "history");
    check_arg(out, "out");
    if (index >= history->records.size()) throw ContractViolation("history index out of range");
    *out = to_c(history->records[index]);
  });
}

bgcnn_status bgcnn_history_write_csv(const bgcnn_history* history, const char* path) {
  return guarded([&] {
    check_arg(history, "history");
    check_arg(path, "path");
    eval::write_history(history->records, path);
  });
}

bgcnn_status bgcnn_history_read_csv(const char* path, bgcnn_history** out) {
  return guarded([&] {
    check_arg(path, "path");
    check_arg(out, "out");
    auto h = std::make_unique<bgcnn_history>();
    h->records = eval::read_history(path);
    *out = h.release();
  });
}

bgcnn_status bgcnn_history_format_csv(const bgcnn_history* history, char* buf, size_t buf_len, size_t* needed) {
  return guarded([&] {
    check_arg(history, "history");
    copy_out(eval::format_history(history->records), buf, buf_len, needed);
  });
}

bgcnn_status bgcnn_model_train(const bgcnn_config* config, const bgcnn_corpus* train, const bgcnn_corpus* val,
                               bgcnn_epoch_callback callback, void* user, bgcnn_model** model,
                               bgcnn_history** history) {
  return guarded([&] {
    check_arg(config, "config");
    check_arg(train, "train");
    check_arg(model, "model");
    if (train->records.empty()) throw ConfigError("training set is empty");
    const text::StopwordSet& stopwords = text::default_stopwords();

    std::vector<text::Tokens> tokens;
    tokens.reserve(train->records.size());
    for (const auto& r : train->records) tokens.push_back(text::preprocess(r.text, stopwords));
    if (config->max_vocab < 3) throw ConfigError("vocab_size must be at least 3");
    text::Vocabulary vocab = text::build_vocabulary(tokens, config->min_freq, config->max_vocab);

    ModelConfig mc = config->model;
    mc.vocab_size = vocab.size();
    Rng rng(mc.seed);
    auto m = std::make_unique<bgcnn_model>(bgcnn_model{Classifier{build_model<float>(mc, rng), std::move(vocab)}});

    const EncodedSet train_set = encode_set(train->records, m->classifier.vocab, stopwords, mc.max_len);
    EncodedSet val_set;
    if (val) val_set = encode_set(val->records, m->classifier.vocab, stopwords, mc.max_len);
    EpochCallback on_epoch;
    if (callback) on_epoch = [&](const eval::EpochRecord& r) {
      const bgcnn_epoch e = to_c(r);
      callback(&e, user);
    };
    auto h = std::make_unique<bgcnn_history>();
    h->records = bgcnn::train(m->classifier.params, train_set, val ? &val_set : nullptr, on_epoch);
    *model = m.release();
    if (history)
      *history = h.release();
  });
}

void bgcnn_model_destroy(bgcnn_model* model) { delete model; }

bgcnn_status bgcnn_model_save(const bgcnn_model* model, const char* path) {
  return guarded([&] {
    check_arg(model, "model");
    check_arg(path, "path");
    save_model(const_cast<bgcnn_model*>(model)->classifier.params, path);
  });
}

bgcnn_status bgcnn_model_save_vocab(const bgcnn_model* model, const char* path) {
  return guarded([&] {
    check_arg(model, "model");
    check_arg(path, "path");
    model->classifier.vocab.save(path);
  });
}

bgcnn_status bgcnn_model_load(const char* model_path, const char* vocab_path, bgcnn_model** out) {
  return guarded([&] {
    check_arg(model_path, "model_path");
    check_arg(vocab_path, "vocab_path");
    check_arg(out, "out");
    ModelParams<float> params = load_model(model_path);
    text::Vocabulary vocab = text::Vocabulary::load(vocab_path);
    if (vocab.size() != params.config.vocab_size)
      throw ModelFormatError(ModelFormatError::Kind::Malformed,
                             "vocabulary has " + std::to_string(vocab.size()) + " entries but the model expects " +
                                 std::to_string(params.config.vocab_size));
    *out = new bgcnn_model{Classifier{std::move(params), std::move(vocab)}};
  });
}

size_t bgcnn_model_parameter_count(const bgcnn_model* model) {
  return model ? const_cast<bgcnn_model*>(model)->classifier.params.parameter_count() : 0;
}

bgcnn_status bgcnn_model_predict(bgcnn_model* model, const char* text, double* probability) {
  return guarded([&] {
    check_arg(model, "model");
    check_arg(text, "text");
    check_arg(probability, "probability");
    *probability = model->classifier.probability(text);
  });
}

bgcnn_status bgcnn_model_predict_batch(bgcnn_model* model, const char* const* texts, size_t n,
                                       double* probabilities) {
  return guarded([&] {
    check_arg(model, "model");
    if (n == 0) return;
    check_arg(texts, "texts");
    check_arg(probabilities, "probabilities");
    std::vector<std::string> items;
    items.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      check_arg(texts[i], "texts[i]");
      items.emplace_back(texts[i]);
    }
    const auto p = model->classifier.probabilities(items);
    std::copy(p.begin(), p.end(), probabilities);
  });
}

bgcnn_status bgcnn_model_evaluate(bgcnn_model* model, const bgcnn_corpus* corpus, double threshold,
                                  bgcnn_report* out) {
  return guarded([&] {
    check_arg(model, "model");
    check_arg(corpus, "corpus");
    check_arg(out, "out");
    if (corpus->records.empty()) throw ConfigError("evaluation set is empty");
    const auto set = encode_set(corpus->records, model->classifier.vocab, model->classifier.stopwords,
                                model->classifier.params.config.max_len);
    const auto scores = predict_proba(model->classifier.params, set);
    std::vector<int> truth;
    truth.reserve(corpus->records.size());
    for (const auto& r : corpus->records) truth.push_back(r.label);
    *out = to_c(eval::evaluate(scores, truth, threshold));
  });
}

bgcnn_status bgcnn_report_format_text(const bgcnn_report* report, const char* algorithm, bgcnn_report_format format,
                                      char* buf, size_t buf_len, size_t* needed) {
  return guarded([&] {
    check_arg(report, "report");
    const std::string_view name = algorithm ? algorithm : "";
    const eval::EvalReport r = from_c(*report);
    std::string text;
    if (format == BGCNN_REPORT_JSON)
      text = eval::format_json(name, r);
    else if (format == BGCNN_REPORT_TABLE)
      text = eval::format_table(name, r);
    else
      throw ContractViolation("unknown report format");
    copy_out(text, buf, buf_len, needed);
  });
}

void bgcnn_baseline_options_default(bgcnn_baseline_options* options) {
  if (!options) return;
  const baselines::BaselineOptions d;
  options->algo = "logreg";
  options->features = nullptr;
  options->k = d.k;
  options->learning_rate = d.learning_rate;
  options->l2 = d.l2;
  options->epochs = d.epochs;
  options->alpha = d.alpha;
  options->seed = d.seed;
  options->min_freq = d.min_freq;
  options->max_vocab = d.max_vocab;
}

bgcnn_status bgcnn_baseline_run(const bgcnn_baseline_options* options, const bgcnn_corpus* train,
                                const bgcnn_corpus* test, bgcnn_report* out) {
  return guarded([&] {
    check_arg(options, "options");
    check_arg(train, "train");
    check_arg(test, "test");
    check_arg(out, "out");
    baselines::BaselineOptions o;
    const auto algo = baselines::parse_algorithm(options->algo ? options->algo : "");
    if (!algo)
      throw ConfigError("unknown algorithm '" + std::string(options->algo ? options->algo : "") +
                        "' (supported: " + baselines::supported_algorithms() + ")");
    o.algorithm = *algo;
    if (options->features) {
      const auto f = baselines::parse_features(options->features);
      if (!f) throw ConfigError("unknown feature kind '" + std::string(options->features) + "' (supported: count, tfidf)");
      o.features = *f;
    }
    o.k = options->k;
    o.learning_rate = options->learning_rate;
    o.l2 = options->l2;
    o.epochs = options->epochs;
    o.alpha = options->alpha;
    o.seed = options->seed;
    o.min_freq = options->min_freq;
    o.max_vocab = options->max_vocab;
    *out = to_c(baselines::run_baseline(o, train->records, test->records));
  });
}

const char* bgcnn_baseline_title(const char* algo) {
  if (!algo) return nullptr;
  const auto a = baselines::parse_algorithm(algo);
  return a ? baselines::algorithm_title(*a).data() : nullptr;
}

const char* bgcnn_baseline_supported(void) {
  static const std::string s = baselines::supported_algorithms();
  return s.c_str();
}

}  // extern "C"
