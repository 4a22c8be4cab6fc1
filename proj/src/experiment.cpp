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
#include "pqdvqc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "pqdvqc/error.hpp"
#include "pqdvqc/parallel.hpp"

namespace pqdvqc {
namespace {

constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kTrainStream = 2;
constexpr std::uint64_t kSplitStream = 3;
constexpr std::uint64_t kPickerStream = 0xD2;

std::vector<DisturbanceClass> code_range(int lo, int hi) {
  std::vector<DisturbanceClass> out;
  for (int c = lo; c <= hi; ++c) out.push_back(static_cast<DisturbanceClass>(c));
  return out;
}

std::string format_percent(double v) {
  return std::to_string(std::round(v * 10000.0) / 100.0);
}

}  // namespace

const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::kDetect2:
      return "detect2";
    case ExperimentId::kSingle7:
      return "single7";
    case ExperimentId::kMixed10:
      return "mixed10";
    case ExperimentId::kNoiseSweep:
      return "noise_sweep";
  }
  return "?";
}

ExperimentId experiment_from_string(const std::string& s) {
  if (s == "detect2") return ExperimentId::kDetect2;
  if (s == "single7") return ExperimentId::kSingle7;
  if (s == "mixed10") return ExperimentId::kMixed10;
  if (s == "noise_sweep" || s == "sweep") return ExperimentId::kNoiseSweep;
  throw ConfigError("unknown experiment '" + s +
                    "' (expected detect2, single7, mixed10 or noise_sweep)");
}

int num_classes(ExperimentId id) {
  switch (id) {
    case ExperimentId::kDetect2:
      return 2;
    case ExperimentId::kSingle7:
    case ExperimentId::kNoiseSweep:
      return 7;
    case ExperimentId::kMixed10:
      return 10;
  }
  return 0;
}

std::vector<int> label_map(ExperimentId id) {
  std::vector<int> map(kNumDisturbanceClasses, -1);
  switch (id) {
    case ExperimentId::kDetect2:
      map[0] = 0;
      for (int c = 1; c < kNumDisturbanceClasses; ++c) map[c] = 1;
      break;
    case ExperimentId::kSingle7:
    case ExperimentId::kNoiseSweep:
      for (int c = 1; c <= 7; ++c) map[c] = c - 1;
      break;
    case ExperimentId::kMixed10:
      for (int c = 1; c <= 10; ++c) map[c] = c - 1;
      break;
  }
  return map;
}

std::vector<std::string> class_names(ExperimentId id) {
  if (id == ExperimentId::kDetect2) return {"normal", "disturbed"};
  std::vector<std::string> names;
  for (int c = 1; c <= num_classes(id); ++c) {
    names.emplace_back(class_tag(static_cast<DisturbanceClass>(c)));
  }
  return names;
}

ExperimentSpec default_experiment(ExperimentId id) {
  ExperimentSpec s;
  s.id = id;
  s.per_class = 1000;
  s.model.n_data = static_cast<int>(kNumFeatures);
  s.model.n_ancilla = num_classes(id);
  switch (id) {
    case ExperimentId::kDetect2:
      s.model.n_layers = 1;
      s.train.epochs = 25;
      s.train.batch_size = 32;
      s.train.loss_kind = LossKind::kBce;
      break;
    case ExperimentId::kSingle7:
      s.model.n_layers = 2;
      s.train.epochs = 105;
      s.train.batch_size = 16;
      s.train.loss_kind = LossKind::kCce;
      break;
    case ExperimentId::kNoiseSweep:
      s.model.n_layers = 2;
      s.train.epochs = 105;
      s.train.batch_size = 16;
      s.train.loss_kind = LossKind::kCce;
      s.snr_levels = {std::nullopt, 40.0, 30.0, 20.0};
      break;
    case ExperimentId::kMixed10:
      s.model.n_layers = 2;
      s.train.epochs = 160;
      s.train.batch_size = 10;
      s.train.loss_kind = LossKind::kCce;
      break;
  }
  set_master_seed(s, 0);
  return s;
}

void set_master_seed(ExperimentSpec& spec, std::uint64_t seed) {
  spec.signal.rng_seed = seed;
  spec.model.seed = derive_seed(seed, kModelStream);
  spec.train.seed = derive_seed(seed, kTrainStream);
}

std::uint64_t split_seed(const ExperimentSpec& spec) {
  return derive_seed(spec.signal.rng_seed, kSplitStream);
}

Dataset generate_experiment_dataset(const ExperimentSpec& spec,
                                    std::optional<double> snr_db) {
  if (spec.per_class < 1) throw ConfigError("per-class count must be at least 1");
  switch (spec.id) {
    case ExperimentId::kDetect2: {
      std::vector<DisturbanceClass> labels(spec.per_class, DisturbanceClass::kNormal);
      Rng picker(derive_seed(spec.signal.rng_seed, kPickerStream));
      std::uniform_int_distribution<int> draw(1, 10);
      for (std::size_t i = 0; i < spec.per_class; ++i) {
        labels.push_back(static_cast<DisturbanceClass>(draw(picker)));
      }
      return generate_labeled(labels, spec.signal, snr_db);
    }
    case ExperimentId::kSingle7:
    case ExperimentId::kNoiseSweep:
      return generate_dataset(code_range(1, 7), spec.per_class, spec.signal, snr_db);
    case ExperimentId::kMixed10:
      return generate_dataset(code_range(1, 10), spec.per_class, spec.signal, snr_db);
  }
  throw ConfigError("unknown experiment");
}

FeatureTable extract_table(const Dataset& d, const FeatureSettings& settings,
                           int threads) {
  if (d.waveforms.empty()) throw ConfigError("dataset is empty");
  std::vector<FeatureResult> results(d.waveforms.size());
  std::vector<std::string> errors(d.waveforms.size());
  parallel_for(d.waveforms.size(), threads > 0 ? threads : thread_budget(),
               [&](std::size_t i) {
                 try {
                   results[i] = extract_features(d.waveforms[i], settings);
                 } catch (const Error& e) {
                   errors[i] = e.what();
                 }
               });
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw ConfigError("feature extraction failed on row " + std::to_string(i) +
                        ": " + errors[i]);
    }
  }
  FeatureTable t;
  t.settings = settings;
  t.sample_rate_hz = d.spec.sample_rate_hz;
  t.fundamental_hz = d.spec.fundamental_hz;
  t.highest_harmonic = results.front().highest_harmonic;
  t.truncated = results.front().truncated;
  for (std::size_t i = 0; i < results.size(); ++i) {
    t.codes.push_back(static_cast<int>(d.waveforms[i].label));
    t.rows.push_back(results[i].features);
  }
  return t;
}

Split stratified_split(const std::vector<int>& classes, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test fraction must lie in (0, 1)");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < classes.size(); ++i) by_class[classes[i]].push_back(i);
  Rng rng(seed);
  Split s;
  for (auto& [cls, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(idx.size())));
    s.test.insert(s.test.end(), idx.begin(), idx.begin() + n_test);
    s.train.insert(s.train.end(), idx.begin() + n_test, idx.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Split experiment_split(const ExperimentSpec& spec, const FeatureTable& t) {
  const auto map = label_map(spec.id);
  std::vector<int> classes;
  classes.reserve(t.size());
  for (int code : t.codes) classes.push_back(map.at(code));
  return stratified_split(classes, spec.test_fraction, split_seed(spec));
}

FeatureTable subset(const FeatureTable& t, const std::vector<std::size_t>& rows) {
  FeatureTable out = t;
  out.codes.clear();
  out.rows.clear();
  for (std::size_t r : rows) {
    out.codes.push_back(t.codes.at(r));
    out.rows.push_back(t.rows.at(r));
  }
  return out;
}

LabeledSet to_labeled(const FeatureTable& t, const std::vector<int>& map,
                      const StandardizationStats& stats) {
  LabeledSet s;
  for (std::size_t r = 0; r < t.size(); ++r) {
    const int cls = map.at(t.codes[r]);
    if (cls < 0) continue;
    s.x.push_back(standardize(t.rows[r], stats));
    s.y.push_back(cls);
  }
  return s;
}

FitResult fit(const FeatureTable& train_rows, const FeatureTable& test_rows,
              const std::vector<int>& map, const ModelConfig& model_config,
              const TrainConfig& train_config, const std::string& experiment,
              const EpochCallback& on_epoch) {
  model_config.validate();
  if (model_config.n_data != static_cast<int>(kNumFeatures)) {
    throw ConfigError("model expects " + std::to_string(model_config.n_data) +
                      " inputs but feature rows carry " +
                      std::to_string(kNumFeatures));
  }
  std::vector<std::vector<double>> raw;
  for (std::size_t r = 0; r < train_rows.size(); ++r) {
    if (map.at(train_rows.codes[r]) < 0) continue;
    if (map.at(train_rows.codes[r]) >= model_config.n_ancilla) {
      throw ConfigError("label map targets more classes than the model has");
    }
    raw.emplace_back(train_rows.rows[r].begin(), train_rows.rows[r].end());
  }
  if (raw.empty()) throw ConfigError("training split is empty");

  FitResult out;
  Checkpoint base;
  base.config = model_config;
  base.stats = fit_standardizer(raw);
  base.label_map = map;
  base.experiment = experiment;

  const LabeledSet train_set = to_labeled(train_rows, map, base.stats);
  const LabeledSet test_set = to_labeled(test_rows, map, base.stats);
  const QnnModel model(model_config);
  out.report = train(model, train_set, test_set, train_config,
                     init_parameters(model_config), on_epoch);
  out.checkpoint = base;
  out.checkpoint.theta = out.report.final_theta;
  out.best = base;
  out.best.theta = out.report.best_theta;
  return out;
}

bool EvalReport::consistent() const {
  std::size_t trace = 0;
  std::size_t sum = 0;
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    const std::size_t row =
        std::accumulate(confusion[i].begin(), confusion[i].end(), std::size_t{0});
    if (row != class_counts[i]) return false;
    trace += confusion[i][i];
    sum += row;
  }
  if (sum != total) return false;
  const double acc = total ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;
  return std::abs(acc - accuracy) < 1e-12;
}

EvalReport make_eval_report(const std::vector<int>& truth,
                            const std::vector<int>& predicted, int n_classes,
                            std::size_t parameter_count) {
  if (truth.size() != predicted.size()) {
    throw ArgumentError("truth and prediction lengths differ");
  }
  const auto k = static_cast<std::size_t>(n_classes);
  EvalReport r;
  r.parameter_count = parameter_count;
  r.total = truth.size();
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  r.class_counts.assign(k, 0);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<std::size_t>(truth[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    if (t >= k || p >= k) throw ArgumentError("class index out of range");
    ++r.confusion[t][p];
    ++r.class_counts[t];
    hits += t == p;
  }
  r.accuracy = r.total ? static_cast<double>(hits) / static_cast<double>(r.total) : 0.0;
  r.per_class_accuracy.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    if (r.class_counts[c]) {
      r.per_class_accuracy[c] = static_cast<double>(r.confusion[c][c]) /
                                static_cast<double>(r.class_counts[c]);
    }
  }
  return r;
}

EvalReport evaluate(const Checkpoint& ckpt, const FeatureTable& rows, int threads) {
  const LabeledSet data = to_labeled(rows, ckpt.label_map, ckpt.stats);
  if (data.size() == 0) {
    throw ConfigError("no feature rows belong to the checkpoint's classes");
  }
  const QnnModel model(ckpt.config);
  const auto pred = predict_all(model, data, ckpt.theta, threads);
  return make_eval_report(data.y, pred, ckpt.config.n_ancilla, model.num_params());
}

nlohmann::json eval_report_json(const EvalReport& r,
                                const std::vector<std::string>& names) {
  nlohmann::json j{{"accuracy", r.accuracy},
                   {"per_class_accuracy", r.per_class_accuracy},
                   {"confusion", r.confusion},
                   {"class_counts", r.class_counts},
                   {"parameter_count", r.parameter_count},
                   {"total", r.total}};
  if (!names.empty()) j["class_names"] = names;
  return j;
}

std::string confusion_csv(const EvalReport& r) {
  std::string out = "true\\pred";
  for (std::size_t c = 0; c < r.confusion.size(); ++c) out += "," + std::to_string(c);
  out += '\n';
  for (std::size_t t = 0; t < r.confusion.size(); ++t) {
    out += std::to_string(t);
    for (std::size_t v : r.confusion[t]) out += "," + std::to_string(v);
    out += '\n';
  }
  return out;
}

nlohmann::json train_report_summary(const TrainReport& r) {
  const EpochRecord& last = r.epochs.back();
  return nlohmann::json{{"epochs", r.epochs.size()},
                        {"best_epoch", r.best_epoch},
                        {"best_test_acc", r.best_test_acc},
                        {"final_test_acc", last.test_acc},
                        {"final_train_acc", last.train_acc},
                        {"final_train_loss", last.train_loss},
                        {"best_test_percent", format_percent(r.best_test_acc)},
                        {"wall_seconds", r.wall_seconds}};
}

std::string train_report_jsonl(const TrainReport& r) {
  std::string out;
  for (const auto& e : r.epochs) out += nlohmann::json(e).dump() + "\n";
  return out;
}

std::string train_curve_csv(const TrainReport& r) {
  std::string out = "epoch,train_loss,train_acc,test_acc\n";
  for (const auto& e : r.epochs) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," +
           format_double(e.train_acc) + "," + format_double(e.test_acc) + "\n";
  }
  return out;
}

PipelineResult run_pipeline(const ExperimentSpec& spec,
                            std::optional<double> snr_db,
                            const EpochCallback& on_epoch) {
  PipelineResult out;
  const Dataset data = generate_experiment_dataset(spec, snr_db);
  out.features = extract_table(data, spec.features, spec.train.threads);
  out.split = experiment_split(spec, out.features);
  const FeatureTable train_rows = subset(out.features, out.split.train);
  const FeatureTable test_rows = subset(out.features, out.split.test);
  out.fit = fit(train_rows, test_rows, label_map(spec.id), spec.model, spec.train,
                to_string(spec.id), on_epoch);
  out.final_eval = evaluate(out.fit.checkpoint, test_rows, spec.train.threads);
  out.best_eval = evaluate(out.fit.best, test_rows, spec.train.threads);
  return out;
}

}  // namespace pqdvqc
