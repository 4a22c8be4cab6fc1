/* Copyright 2026 The pqdvqc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
// pqdvqc command-line driver. Talks to the library only through pqdvqc.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pqdvqc/pqdvqc.h"

namespace fs = std::filesystem;

namespace {

constexpr double kPaperRateHz = 1280.0;

class CliFailure : public std::runtime_error {
 public:
  explicit CliFailure(pqdvqc_status s)
      : std::runtime_error(pqdvqc_last_error()), status(s) {}
  pqdvqc_status status;
};

void check(pqdvqc_status s) {
  if (s != PQDVQC_OK) throw CliFailure(s);
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Dataset = Handle<pqdvqc_dataset, pqdvqc_dataset_free>;
using Features = Handle<pqdvqc_features, pqdvqc_features_free>;
using Model = Handle<pqdvqc_model, pqdvqc_model_free>;
using Fit = Handle<pqdvqc_fit, pqdvqc_fit_free>;
using Eval = Handle<pqdvqc_eval, pqdvqc_eval_free>;

struct Flags {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> per_class;
  std::optional<double> rate;
  bool paper_rate = false;
  std::vector<std::string> snr;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<double> lr;
  std::optional<int> layers;
  std::optional<double> test_fraction;
  std::string grad = "adjoint";
  std::string out;
  std::string input;
  std::string features;
  std::string model;
  bool quiet = false;
};

std::optional<double> parse_snr(const std::string& s) {
  if (s == "clean" || s == "none" || s == "inf") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw CLI::ValidationError("--snr", "expected dB value or 'clean', got '" + s + "'");
  return v;
}

std::string snr_label(const std::optional<double>& snr) {
  if (!snr) return "clean";
  std::string s = std::to_string(*snr);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s + "dB";
}

pqdvqc_options make_options(const Flags& f) {
  pqdvqc_options o;
  check(pqdvqc_options_init(&o, f.experiment.c_str()));
  if (f.seed) o.seed = *f.seed;
  if (f.per_class) o.per_class = *f.per_class;
  if (f.paper_rate) {
    o.sample_rate_hz = kPaperRateHz;
    o.truncate_harmonics = 1;
  }
  if (f.rate) o.sample_rate_hz = *f.rate;
  if (f.epochs) o.epochs = *f.epochs;
  if (f.batch) o.batch_size = *f.batch;
  if (f.lr) o.lr = *f.lr;
  if (f.layers) o.layers = *f.layers;
  if (f.test_fraction) o.test_fraction = *f.test_fraction;
  o.gradient = f.grad == "shift" ? PQDVQC_GRAD_SHIFT : PQDVQC_GRAD_ADJOINT;
  return o;
}

fs::path out_dir(const Flags& f) {
  fs::path dir(f.out);
  fs::create_directories(dir);
  return dir;
}

void on_epoch(void* user, int epoch, double loss, double train_acc, double test_acc) {
  const auto* f = static_cast<const Flags*>(user);
  if (f->quiet) return;
  std::printf("epoch %4d  loss %.6f  train %.4f  test %.4f\n", epoch, loss, train_acc,
              test_acc);
  std::fflush(stdout);
}

void print_eval(const pqdvqc_eval* e, const char* title) {
  double acc = 0.0;
  int k = 0;
  std::size_t params = 0;
  check(pqdvqc_eval_accuracy(e, &acc));
  check(pqdvqc_eval_classes(e, &k));
  check(pqdvqc_eval_parameter_count(e, &params));
  std::printf("%s accuracy %.4f (P = %zu)\n", title, acc, params);
  for (int c = 0; c < k; ++c) {
    double ca = 0.0;
    std::size_t n = 0;
    check(pqdvqc_eval_class_accuracy(e, c, &ca, &n));
    std::printf("  class %2d  n %5zu  acc %.4f\n", c, n, ca);
  }
}

struct RunOutcome {
  double final_acc = 0.0;
  double best_acc = 0.0;
  int best_epoch = 0;
};

// Split, train, write the checkpoints and reports, evaluate on the test rows.
RunOutcome train_and_report(const Flags& f, const pqdvqc_options& o,
                            const pqdvqc_features* table, const fs::path& dir) {
  Features train, test;
  check(pqdvqc_features_split(table, &o, train.out(), test.out()));
  check(pqdvqc_features_save(train.get(), (dir / "train_features.csv").c_str()));
  check(pqdvqc_features_save(test.get(), (dir / "test_features.csv").c_str()));

  Fit fit;
  check(pqdvqc_train(&o, train.get(), test.get(), on_epoch, const_cast<Flags*>(&f),
                     fit.out()));
  check(pqdvqc_fit_write_reports(fit.get(), dir.c_str()));

  Model final_model, best_model;
  check(pqdvqc_fit_model(fit.get(), 0, final_model.out()));
  check(pqdvqc_fit_model(fit.get(), 1, best_model.out()));
  check(pqdvqc_model_save(final_model.get(), (dir / "checkpoint.json").c_str()));
  check(pqdvqc_model_save(best_model.get(), (dir / "best_checkpoint.json").c_str()));

  Eval final_eval, best_eval;
  check(pqdvqc_evaluate(final_model.get(), test.get(), o.threads, final_eval.out()));
  check(pqdvqc_evaluate(best_model.get(), test.get(), o.threads, best_eval.out()));
  check(pqdvqc_eval_write(final_eval.get(), (dir / "eval.json").c_str(),
                          (dir / "confusion.csv").c_str()));
  check(pqdvqc_eval_write(best_eval.get(), (dir / "eval_best.json").c_str(),
                          (dir / "confusion_best.csv").c_str()));

  RunOutcome r;
  check(pqdvqc_eval_accuracy(final_eval.get(), &r.final_acc));
  check(pqdvqc_fit_best(fit.get(), &r.best_epoch, &r.best_acc));
  print_eval(final_eval.get(), "final test");
  std::printf("best test accuracy %.4f at epoch %d\n", r.best_acc, r.best_epoch);
  return r;
}

int cmd_generate(const Flags& f) {
  pqdvqc_options o = make_options(f);
  if (f.snr.size() > 1) throw CLI::ValidationError("--snr", "generate takes one level");
  if (!f.snr.empty()) {
    if (auto s = parse_snr(f.snr[0])) {
      o.has_snr = 1;
      o.snr_db = *s;
    }
  }
  Dataset d;
  check(pqdvqc_generate(&o, d.out()));
  const fs::path csv = out_dir(f) / "waveforms.csv";
  check(pqdvqc_dataset_save(d.get(), csv.c_str()));
  std::size_t rows = 0, samples = 0;
  check(pqdvqc_dataset_shape(d.get(), &rows, &samples));
  std::map<int, std::size_t> counts;
  for (std::size_t r = 0; r < rows; ++r) {
    int code = 0;
    check(pqdvqc_dataset_row(d.get(), r, &code, nullptr, 0));
    ++counts[code];
  }
  std::printf("wrote %s: %zu rows x %zu samples\n", csv.c_str(), rows, samples);
  for (const auto& [code, n] : counts) std::printf("  D%d  %zu\n", code, n);
  return 0;
}

int cmd_features(const Flags& f) {
  const fs::path dir = out_dir(f);
  const fs::path in = f.input.empty() ? dir / "waveforms.csv" : fs::path(f.input);
  pqdvqc_options o = make_options(f);
  Dataset d;
  check(pqdvqc_dataset_load(in.c_str(), d.out()));
  Features t;
  check(pqdvqc_extract_features(d.get(), &o, t.out()));
  const fs::path csv = dir / "features.csv";
  check(pqdvqc_features_save(t.get(), csv.c_str()));
  std::size_t rows = 0;
  check(pqdvqc_features_rows(t.get(), &rows));
  std::printf("wrote %s: %zu rows\n", csv.c_str(), rows);
  return 0;
}

int cmd_train(const Flags& f) {
  const fs::path dir = out_dir(f);
  const fs::path in = f.features.empty() ? dir / "features.csv" : fs::path(f.features);
  const pqdvqc_options o = make_options(f);
  Features table;
  check(pqdvqc_features_load(in.c_str(), table.out()));
  train_and_report(f, o, table.get(), dir);
  return 0;
}

int cmd_eval(const Flags& f) {
  const fs::path dir = out_dir(f);
  const fs::path model_path = f.model.empty() ? dir / "checkpoint.json" : fs::path(f.model);
  const fs::path in = f.features.empty() ? dir / "test_features.csv" : fs::path(f.features);
  Model m;
  check(pqdvqc_model_load(model_path.c_str(), m.out()));
  Features t;
  check(pqdvqc_features_load(in.c_str(), t.out()));
  Eval e;
  check(pqdvqc_evaluate(m.get(), t.get(), 0, e.out()));
  check(pqdvqc_eval_write(e.get(), (dir / "eval.json").c_str(),
                          (dir / "confusion.csv").c_str()));
  print_eval(e.get(), "eval");
  return 0;
}

int cmd_sweep(const Flags& f) {
  const fs::path dir = out_dir(f);
  std::vector<std::optional<double>> levels;
  for (const auto& s : f.snr) levels.push_back(parse_snr(s));
  if (levels.empty()) levels = {std::nullopt, 40.0, 30.0, 20.0};

  std::string table = "snr_db,final_acc,best_acc,best_epoch\n";
  for (const auto& level : levels) {
    pqdvqc_options o = make_options(f);
    o.has_snr = level ? 1 : 0;
    o.snr_db = level.value_or(0.0);
    const fs::path sub = dir / snr_label(level);
    fs::create_directories(sub);
    std::printf("== %s ==\n", snr_label(level).c_str());

    Dataset d;
    check(pqdvqc_generate(&o, d.out()));
    Features t;
    check(pqdvqc_extract_features(d.get(), &o, t.out()));
    check(pqdvqc_features_save(t.get(), (sub / "features.csv").c_str()));
    const RunOutcome r = train_and_report(f, o, t.get(), sub);

    char line[128];
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%d\n",
                  level ? std::to_string(*level).c_str() : "clean", r.final_acc,
                  r.best_acc, r.best_epoch);
    table += line;
  }
  const fs::path csv = dir / "sweep.csv";
  std::FILE* fp = std::fopen(csv.c_str(), "w");
  if (fp == nullptr) throw std::runtime_error("cannot write " + csv.string());
  std::fputs(table.c_str(), fp);
  std::fclose(fp);
  std::printf("%s", table.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power-quality disturbance classification with a variational quantum circuit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pqdvqc_version());
  Flags f;

  const std::vector<std::string> experiments{"detect2", "single7", "mixed10", "noise_sweep"};
  auto common = [&](CLI::App* c, const std::string& default_experiment) {
    c->add_option("--experiment", f.experiment,
                  "detect2, single7, mixed10 or noise_sweep (default " +
                      default_experiment + ")")
        ->check(CLI::IsMember(experiments));
    c->add_option("--seed", f.seed, "master seed");
    c->add_option("--out", f.out, "output directory")->required();
    c->add_flag("--quiet", f.quiet, "suppress per-epoch lines");
  };
  auto signal = [&](CLI::App* c) {
    c->add_option("--per-class", f.per_class, "waveforms per class")->check(CLI::PositiveNumber);
    auto* rate = c->add_option("--rate", f.rate, "sample rate in Hz")->check(CLI::PositiveNumber);
    c->add_flag("--paper-rate", f.paper_rate,
                "sample at 1280 Hz and drop harmonics at or above Nyquist")
        ->excludes(rate);
  };
  auto training = [&](CLI::App* c) {
    c->add_option("--epochs", f.epochs)->check(CLI::PositiveNumber);
    c->add_option("--batch", f.batch)->check(CLI::PositiveNumber);
    c->add_option("--lr", f.lr)->check(CLI::NonNegativeNumber);
    c->add_option("--layers", f.layers)->check(CLI::PositiveNumber);
    c->add_option("--test-fraction", f.test_fraction)->check(CLI::Range(0.0, 1.0));
    c->add_option("--grad", f.grad, "gradient method")
        ->check(CLI::IsMember({"shift", "adjoint"}))
        ->capture_default_str();
  };

  auto* gen = app.add_subcommand("generate", "synthesize a labelled waveform dataset");
  common(gen, "single7");
  signal(gen);
  gen->add_option("--snr", f.snr, "noise level in dB or 'clean'");

  auto* feat = app.add_subcommand("features", "extract S-transform features");
  common(feat, "single7");
  feat->add_option("--in", f.input, "waveform CSV (default OUT/waveforms.csv)");
  feat->add_flag("--paper-rate", f.paper_rate, "drop harmonics at or above Nyquist");

  auto* tr = app.add_subcommand("train", "split features, train and evaluate");
  common(tr, "single7");
  training(tr);
  tr->add_option("--features", f.features, "feature CSV (default OUT/features.csv)");

  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a feature file");
  common(ev, "single7");
  ev->add_option("--model", f.model, "checkpoint (default OUT/checkpoint.json)");
  ev->add_option("--features", f.features, "feature CSV (default OUT/test_features.csv)");

  auto* sw = app.add_subcommand("sweep", "retrain at each noise level");
  common(sw, "noise_sweep");
  signal(sw);
  training(sw);
  sw->add_option("--snr", f.snr, "levels in dB or 'clean' (default clean 40 30 20)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (f.experiment.empty()) f.experiment = *sw ? "noise_sweep" : "single7";

  try {
    if (*gen) return cmd_generate(f);
    if (*feat) return cmd_features(f);
    if (*tr) return cmd_train(f);
    if (*ev) return cmd_eval(f);
    if (*sw) return cmd_sweep(f);
  } catch (const CliFailure& e) {
    std::fprintf(stderr, "pqdvqc: %s: %s\n", pqdvqc_status_string(e.status), e.what());
    return static_cast<int>(e.status);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "pqdvqc: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "pqdvqc: %s\n", e.what());
    return 99;
  }
  return 0;
}
