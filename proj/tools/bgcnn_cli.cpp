// SPDX-License-Identifier: Apache-2.0
// bgcnn: command-line front end over the C API.

#include <CLI11.hpp>

#include <bgcnn/bgcnn.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kExitOk = 0,
  kExitMissingInput = 2,
  kExitUsage = 64,
  kExitDataError = 65,
  kExitInternal = 70,
};

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(bgcnn_status s) {
  switch (s) {
    case BGCNN_OK:
      return kExitOk;
    case BGCNN_NOT_FOUND:
      return kExitMissingInput;
    case BGCNN_CONFIG:
    case BGCNN_INVALID_ARGUMENT:
      return kExitUsage;
    case BGCNN_SCHEMA:
    case BGCNN_PARSE:
    case BGCNN_ROW:
    case BGCNN_BAD_MAGIC:
    case BGCNN_BAD_VERSION:
    case BGCNN_TRUNCATED:
    case BGCNN_CHECKSUM:
    case BGCNN_MALFORMED:
    case BGCNN_UNDEFINED_METRIC:
      return kExitDataError;
    case BGCNN_IO:
    case BGCNN_NUMERIC:
    case BGCNN_INTERNAL:
      return kExitInternal;
  }
  return kExitInternal;
}

void check(bgcnn_status s) {
  if (s != BGCNN_OK) throw Failure{exit_code_for(s), bgcnn_last_error()};
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Config = std::unique_ptr<bgcnn_config, Deleter<bgcnn_config, bgcnn_config_destroy>>;
using Corpus = std::unique_ptr<bgcnn_corpus, Deleter<bgcnn_corpus, bgcnn_corpus_destroy>>;
using Model = std::unique_ptr<bgcnn_model, Deleter<bgcnn_model, bgcnn_model_destroy>>;
using History = std::unique_ptr<bgcnn_history, Deleter<bgcnn_history, bgcnn_history_destroy>>;

std::string render(const bgcnn_report& report, const std::string& algorithm, bool json) {
  size_t needed = 0;
  check(bgcnn_report_format_text(&report, algorithm.c_str(), json ? BGCNN_REPORT_JSON : BGCNN_REPORT_TABLE, nullptr,
                                 0, &needed));
  std::string out(needed + 1, '\0');
  check(bgcnn_report_format_text(&report, algorithm.c_str(), json ? BGCNN_REPORT_JSON : BGCNN_REPORT_TABLE,
                                 out.data(), out.size(), &needed));
  out.resize(needed);
  return out;
}

// ---------------------------------------------------------------------------
// shared option groups

struct DataOptions {
  std::string path;
  std::string text_column = "tweet";
  std::string label_column = "label";
  double test_fraction = 0.2;
  bool no_stratify = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--data", path, "Labeled CSV file")->required();
    cmd->add_option("--text-col", text_column, "Name of the text column")->capture_default_str();
    cmd->add_option("--label-col", label_column, "Name of the 0/1 label column")->capture_default_str();
    cmd->add_option("--test-fraction", test_fraction, "Held-out fraction")->capture_default_str();
    cmd->add_flag("--no-stratify", no_stratify, "Split without preserving class proportions");
  }

  Corpus load() const {
    bgcnn_corpus* c = nullptr;
    check(bgcnn_corpus_load_csv(path.c_str(), text_column.c_str(), label_column.c_str(), &c));
    return Corpus(c);
  }

  std::pair<Corpus, Corpus> split(const bgcnn_corpus* all, std::uint64_t seed) const {
    bgcnn_corpus *train = nullptr, *test = nullptr;
    int stratified = 0;
    check(bgcnn_corpus_split(all, test_fraction, no_stratify ? 0 : 1, seed, &train, &test, &stratified));
    if (!no_stratify && !stratified)
      std::cerr << "warning: a class has no records; split was not stratified\n";
    return {Corpus(train), Corpus(test)};
  }
};

struct ModelOptions {
  std::size_t max_len = 40;
  std::size_t embed_dim = 100;
  std::size_t conv_filters = 64;
  std::size_t kernel_size = 3;
  std::size_t pool = 2;
  std::size_t gru1_hidden = 64;
  std::size_t gru2_hidden = 32;
  std::size_t dense_hidden = 64;
  double dropout = 0.5;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  double pos_weight = 1.0;
  std::size_t vocab_size = 20000;
  std::size_t min_freq = 2;

  void add(CLI::App* cmd) {
    cmd->add_option("--max-len", max_len, "Tokens per tweet after padding")->capture_default_str();
    cmd->add_option("--embed-dim", embed_dim, "Embedding width")->capture_default_str();
    cmd->add_option("--conv-filters", conv_filters, "Convolution filters")->capture_default_str();
    cmd->add_option("--kernel-size", kernel_size, "Convolution width (odd)")->capture_default_str();
    cmd->add_option("--pool", pool, "Max-pool window")->capture_default_str();
    cmd->add_option("--gru1-hidden", gru1_hidden, "First BiGRU width per direction")->capture_default_str();
    cmd->add_option("--gru2-hidden", gru2_hidden, "Second BiGRU width per direction")->capture_default_str();
    cmd->add_option("--dense-hidden", dense_hidden, "Hidden dense width")->capture_default_str();
    cmd->add_option("--dropout", dropout, "Dropout rate")->capture_default_str();
    cmd->add_option("--lr", learning_rate, "Adam learning rate")->capture_default_str();
    cmd->add_option("--batch-size", batch_size, "Minibatch size")->capture_default_str();
    cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--pos-weight", pos_weight, "Loss weight of offensive examples")->capture_default_str();
    cmd->add_option("--vocab-size", vocab_size, "Vocabulary cap including reserved ids")->capture_default_str();
    cmd->add_option("--min-freq", min_freq, "Minimum token frequency")->capture_default_str();
  }

  Config build(std::uint64_t seed) const {
    bgcnn_config* c = nullptr;
    check(bgcnn_config_create(&c));
    Config cfg(c);
    auto set = [&](const char* key, const std::string& value) { check(bgcnn_config_set(c, key, value.c_str())); };
    auto real = [](double v) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    set("max_len", std::to_string(max_len));
    set("embed_dim", std::to_string(embed_dim));
    set("conv_filters", std::to_string(conv_filters));
    set("kernel_size", std::to_string(kernel_size));
    set("pool", std::to_string(pool));
    set("gru1_hidden", std::to_string(gru1_hidden));
    set("gru2_hidden", std::to_string(gru2_hidden));
    set("dense_hidden", std::to_string(dense_hidden));
    set("dropout", real(dropout));
    set("learning_rate", real(learning_rate));
    set("batch_size", std::to_string(batch_size));
    set("epochs", std::to_string(epochs));
    set("pos_weight", real(pos_weight));
    set("vocab_size", std::to_string(vocab_size));
    set("min_freq", std::to_string(min_freq));
    set("seed", std::to_string(seed));
    return cfg;
  }
};

struct ModelPaths {
  std::string model;
  std::string vocab;

  void add(CLI::App* cmd) {
    cmd->add_option("--model", model, "Model file written by train")->required();
    cmd->add_option("--vocab", vocab, "Vocabulary file (default: vocab.tsv next to the model)");
  }

  Model load() const {
    const std::string v = vocab.empty() ? (fs::path(model).parent_path() / "vocab.tsv").string() : vocab;
    bgcnn_model* m = nullptr;
    check(bgcnn_model_load(model.c_str(), v.c_str(), &m));
    return Model(m);
  }
};

void add_config_file(CLI::App* cmd) {
  cmd->set_config("--config", "", "key=value file with option defaults; command-line flags take precedence");
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw Failure{kExitUsage, "cannot create directory " + parent.string() + ": " + ec.message()};
}

// Fails before any work if `path` cannot be created.
void probe_writable(const std::string& path) {
  ensure_parent_dir(path);
  const bool existed = fs::exists(path);
  std::ofstream probe(path, std::ios::app);
  if (!probe) throw Failure{kExitUsage, "cannot write " + path};
  probe.close();
  if (!existed) fs::remove(path);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_corpus(const bgcnn_corpus* corpus, const std::string& path) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitInternal, "cannot write " + path};
  out << "id,label,tweet\n";
  for (size_t i = 0; i < bgcnn_corpus_size(corpus); ++i) {
    const char *id = nullptr, *text = nullptr;
    int label = 0;
    check(bgcnn_corpus_record(corpus, i, &id, &text, &label));
    out << csv_quote(id) << ',' << label << ',' << csv_quote(text) << '\n';
  }
  if (!out) throw Failure{kExitInternal, "failed writing " + path};
}

// ---------------------------------------------------------------------------
// commands

struct PrepCommand {
  DataOptions data;
  std::uint64_t seed = 1337;
  std::string train_out, test_out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("prep", "Report class balance and the train/test split");
    data.add(cmd);
    cmd->add_option("--seed", seed, "Split seed")->capture_default_str();
    cmd->add_option("--train-out", train_out, "Write the training split as CSV");
    cmd->add_option("--test-out", test_out, "Write the test split as CSV");
    add_config_file(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    Corpus all = data.load();
    bgcnn_class_report r{};
    check(bgcnn_corpus_class_report(all.get(), &r));
    auto [train, test] = data.split(all.get(), seed);
    std::printf("records:           %zu\n", r.total);
    std::printf("label 0 (benign):  %zu (%.2f%%)\n", r.count0, 100.0 * static_cast<double>(r.count0) / r.total);
    std::printf("label 1 (offens.): %zu (%.2f%%)\n", r.count1, 100.0 * static_cast<double>(r.count1) / r.total);
    std::printf("majority label:    %d (accuracy of always predicting it: %.4f)\n", r.majority_label,
                r.majority_fraction);
    std::printf("split:             %zu train / %zu test\n", bgcnn_corpus_size(train.get()),
                bgcnn_corpus_size(test.get()));
    if (!train_out.empty()) write_corpus(train.get(), train_out);
    if (!test_out.empty()) write_corpus(test.get(), test_out);
  }
};

struct TrainCommand {
  DataOptions data;
  ModelOptions model;
  std::uint64_t seed = 1337;
  std::string out_dir = "run";
  std::string model_out, vocab_out, history_out;
  bool quiet = false;
  bool json = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train the BiGRU-CNN classifier");
    data.add(cmd);
    model.add(cmd);
    cmd->add_option("--seed", seed, "Seed for splitting, initialization, shuffling and dropout")
        ->capture_default_str();
    cmd->add_option("--out", out_dir, "Run directory for model.bgcn, vocab.tsv and history.csv")
        ->capture_default_str();
    cmd->add_option("--model-out", model_out, "Model file (overrides --out)");
    cmd->add_option("--vocab-out", vocab_out, "Vocabulary file (overrides --out)");
    cmd->add_option("--history-out", history_out, "History CSV (overrides --out)");
    cmd->add_flag("--quiet", quiet, "Do not print per-epoch progress");
    cmd->add_flag("--json", json, "Print the final report as JSON");
    add_config_file(cmd);
    cmd->callback([this] { run(); });
  }

  static void progress(const bgcnn_epoch* e, void* user) {
    const auto* total = static_cast<const std::size_t*>(user);
    std::fprintf(stderr, "epoch %zu/%zu  loss %.4f  acc %.4f", e->epoch, *total, e->train_loss, e->train_acc);
    if (e->has_val) std::fprintf(stderr, "  val_loss %.4f  val_acc %.4f  val_recall %.4f", e->val_loss, e->val_acc,
                                 e->val_recall);
    if (e->has_val_auc) std::fprintf(stderr, "  val_auc %.4f", e->val_auc);
    std::fprintf(stderr, "\n");
  }

  void run() {
    const fs::path dir(out_dir);
    const std::string model_path = model_out.empty() ? (dir / "model.bgcn").string() : model_out;
    const std::string vocab_path = vocab_out.empty() ? (dir / "vocab.tsv").string() : vocab_out;
    const std::string history_path = history_out.empty() ? (dir / "history.csv").string() : history_out;

    Config cfg = model.build(seed);
    Corpus all = data.load();
    auto [train, test] = data.split(all.get(), seed);
    for (const auto& p : {model_path, vocab_path, history_path}) probe_writable(p);

    bgcnn_model* m = nullptr;
    bgcnn_history* h = nullptr;
    std::size_t total = model.epochs;
    check(bgcnn_model_train(cfg.get(), train.get(), test.get(), quiet ? nullptr : &TrainCommand::progress, &total, &m,
                            &h));
    Model trained(m);
    History history(h);
    check(bgcnn_model_save(trained.get(), model_path.c_str()));
    check(bgcnn_model_save_vocab(trained.get(), vocab_path.c_str()));
    check(bgcnn_history_write_csv(history.get(), history_path.c_str()));

    bgcnn_report report{};
    check(bgcnn_model_evaluate(trained.get(), test.get(), 0.5, &report));
    if (!report.has_auc) std::cerr << "warning: test split has a single class; AUC is undefined\n";
    std::cout << render(report, "BiGRU-CNN", json);
    if (!json) std::cout << "parameters: " << bgcnn_model_parameter_count(trained.get()) << '\n';
  }
};

struct BaselineCommand {
  DataOptions data;
  std::string algo;
  std::string features;
  bgcnn_baseline_options options{};
  bool json = false;

  void add(CLI::App& app) {
    bgcnn_baseline_options_default(&options);
    auto* cmd = app.add_subcommand("baseline", "Fit and evaluate a classical baseline");
    data.add(cmd);
    cmd->add_option("--algo", algo, std::string("Algorithm: ") + bgcnn_baseline_supported())->required();
    cmd->add_option("--features", features, "count or tfidf (default: count for nb, tfidf otherwise)");
    cmd->add_option("--k", options.k, "Neighbours for knn")->capture_default_str();
    cmd->add_option("--lr", options.learning_rate, "SGD step size for logreg/svm")->capture_default_str();
    cmd->add_option("--l2", options.l2, "L2 penalty for logreg/svm")->capture_default_str();
    cmd->add_option("--epochs", options.epochs, "SGD epochs for logreg/svm")->capture_default_str();
    cmd->add_option("--alpha", options.alpha, "Additive smoothing for nb")->capture_default_str();
    cmd->add_option("--seed", options.seed, "Seed for splitting and SGD")->capture_default_str();
    cmd->add_option("--min-freq", options.min_freq, "Minimum token frequency")->capture_default_str();
    cmd->add_option("--vocab-size", options.max_vocab, "Vocabulary cap including reserved ids")
        ->capture_default_str();
    cmd->add_flag("--json", json, "Print the report as JSON");
    add_config_file(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    const char* title = bgcnn_baseline_title(algo.c_str());
    if (!title)
      throw Failure{kExitUsage, "unknown --algo '" + algo + "'; supported: " + bgcnn_baseline_supported()};
    options.algo = algo.c_str();
    options.features = features.empty() ? nullptr : features.c_str();
    Corpus all = data.load();
    auto [train, test] = data.split(all.get(), options.seed);
    bgcnn_report report{};
    check(bgcnn_baseline_run(&options, train.get(), test.get(), &report));
    if (!report.has_auc) std::cerr << "warning: test split has a single class; AUC is undefined\n";
    std::cout << render(report, title, json);
  }
};

struct EvalCommand {
  ModelPaths paths;
  std::string data_path, text_column = "tweet", label_column = "label";
  double threshold = 0.5;
  bool json = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Evaluate a trained model on a labeled CSV");
    paths.add(cmd);
    cmd->add_option("--data", data_path, "Labeled CSV file")->required();
    cmd->add_option("--text-col", text_column, "Name of the text column")->capture_default_str();
    cmd->add_option("--label-col", label_column, "Name of the 0/1 label column")->capture_default_str();
    cmd->add_option("--threshold", threshold, "Decision threshold")->capture_default_str();
    cmd->add_flag("--json", json, "Print the report as JSON");
    add_config_file(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    Model model = paths.load();
    bgcnn_corpus* c = nullptr;
    check(bgcnn_corpus_load_csv(data_path.c_str(), text_column.c_str(), label_column.c_str(), &c));
    Corpus corpus(c);
    bgcnn_report report{};
    check(bgcnn_model_evaluate(model.get(), corpus.get(), threshold, &report));
    if (!report.has_auc) std::cerr << "warning: evaluation set has a single class; AUC is undefined\n";
    std::cout << render(report, "BiGRU-CNN", json);
  }
};

struct PredictCommand {
  ModelPaths paths;
  std::vector<std::string> texts;
  std::string input;
  double threshold = 0.5;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("predict", "Score raw texts: prints <probability>\\t<label> per input");
    paths.add(cmd);
    auto* text_opt = cmd->add_option("--text", texts, "Text to score (repeatable)");
    cmd->add_option("--input", input, "File with one text per line, or - for stdin")->excludes(text_opt);
    cmd->add_option("--threshold", threshold, "Label is 1 iff probability >= threshold")->capture_default_str();
    add_config_file(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    if (texts.empty() && input.empty()) throw Failure{kExitUsage, "predict needs --text or --input"};
    std::vector<std::string> items = texts;
    if (!input.empty()) {
      std::ifstream file;
      std::istream* in = &std::cin;
      if (input != "-") {
        file.open(input, std::ios::binary);
        if (!file) throw Failure{kExitMissingInput, "cannot open input file: " + input};
        in = &file;
      }
      for (std::string line; std::getline(*in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        items.push_back(line);
      }
    }
    Model model = paths.load();
    std::vector<const char*> ptrs;
    for (const auto& s : items) ptrs.push_back(s.c_str());
    std::vector<double> probs(items.size());
    check(bgcnn_model_predict_batch(model.get(), ptrs.data(), ptrs.size(), probs.data()));
    for (double p : probs) std::printf("%.6f\t%d\n", p, p >= threshold ? 1 : 0);
  }
};

struct ExportCurvesCommand {
  std::string run_dir;
  std::string history;
  std::string out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("export-curves", "Re-emit the per-epoch history CSV of a run");
    auto* run_opt = cmd->add_option("--run", run_dir, "Run directory written by train");
    cmd->add_option("--history", history, "History CSV path")->excludes(run_opt);
    cmd->add_option("--out", out, "Destination (default: stdout)");
    cmd->callback([this] { run(); });
  }

  void run() {
    if (run_dir.empty() && history.empty()) throw Failure{kExitUsage, "export-curves needs --run or --history"};
    const std::string path = history.empty() ? (fs::path(run_dir) / "history.csv").string() : history;
    bgcnn_history* h = nullptr;
    check(bgcnn_history_read_csv(path.c_str(), &h));
    History hist(h);
    if (!out.empty()) {
      ensure_parent_dir(out);
      check(bgcnn_history_write_csv(hist.get(), out.c_str()));
      return;
    }
    size_t needed = 0;
    check(bgcnn_history_format_csv(hist.get(), nullptr, 0, &needed));
    std::string text(needed + 1, '\0');
    check(bgcnn_history_format_csv(hist.get(), text.data(), text.size(), &needed));
    text.resize(needed);
    std::cout << text;
  }
};

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Training allocates and frees many short-lived buffers of a few hundred KB;
  // keep them on the heap instead of a fresh mmap each time.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
  CLI::App app{"Offensive-tweet classification with a BiGRU-CNN and classical baselines"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bgcnn_version());

  PrepCommand prep;
  TrainCommand train;
  BaselineCommand baseline;
  EvalCommand eval;
  PredictCommand predict;
  ExportCurvesCommand curves;
  prep.add(app);
  train.add(app);
  baseline.add(app);
  eval.add(app);
  predict.add(app);
  curves.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "bgcnn: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "bgcnn: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
