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
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqdvqc/io.hpp"
#include "pqdvqc/qnn.hpp"
#include "pqdvqc/signal.hpp"
#include "pqdvqc/training.hpp"

namespace pqdvqc {

enum class ExperimentId { kDetect2, kSingle7, kMixed10, kNoiseSweep };

const char* to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);

struct ExperimentSpec {
  ExperimentId id = ExperimentId::kDetect2;
  // detect2: normal vs. a uniform draw over D1..D10 per sample.
  // single7 / noise_sweep: D1..D7. mixed10: D1..D10.
  std::size_t per_class = 1000;
  std::vector<std::optional<double>> snr_levels;  // noise_sweep only
  SignalSpec signal;
  FeatureSettings features;
  ModelConfig model;
  TrainConfig train;
  double test_fraction = 0.2;
};

// Full-scale defaults for each experiment.
ExperimentSpec default_experiment(ExperimentId id);

// Derives the signal, model, training and split seeds from one master seed.
void set_master_seed(ExperimentSpec& spec, std::uint64_t seed);
std::uint64_t split_seed(const ExperimentSpec& spec);

// Model class count and the disturbance-code -> class map (-1: unused).
int num_classes(ExperimentId id);
std::vector<int> label_map(ExperimentId id);
std::vector<std::string> class_names(ExperimentId id);

Dataset generate_experiment_dataset(const ExperimentSpec& spec,
                                    std::optional<double> snr_db);

FeatureTable extract_table(const Dataset& d, const FeatureSettings& settings,
                           int threads = 0);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, a seeded shuffle puts round(test_fraction * count) rows in test.
Split stratified_split(const std::vector<int>& classes, double test_fraction,
                       std::uint64_t seed);

// Stratified on the experiment's class of each row; rows whose code the
// experiment does not model form their own stratum.
Split experiment_split(const ExperimentSpec& spec, const FeatureTable& t);

FeatureTable subset(const FeatureTable& t, const std::vector<std::size_t>& rows);

// Standardized inputs and class indices for the rows the map keeps.
LabeledSet to_labeled(const FeatureTable& t, const std::vector<int>& label_map,
                      const StandardizationStats& stats);

struct FitResult {
  Checkpoint checkpoint;  // final-epoch parameters
  Checkpoint best;        // best-test-epoch parameters
  TrainReport report;
};

FitResult fit(const FeatureTable& train_rows, const FeatureTable& test_rows,
              const std::vector<int>& label_map, const ModelConfig& model,
              const TrainConfig& train, const std::string& experiment,
              const EpochCallback& on_epoch = {});

struct EvalReport {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<std::vector<std::size_t>> confusion;  // rows true, cols predicted
  std::vector<std::size_t> class_counts;
  std::size_t parameter_count = 0;
  std::size_t total = 0;

  // Row sums equal class counts and trace / total equals accuracy.
  bool consistent() const;
};

EvalReport make_eval_report(const std::vector<int>& truth,
                            const std::vector<int>& predicted, int n_classes,
                            std::size_t parameter_count);

EvalReport evaluate(const Checkpoint& ckpt, const FeatureTable& rows,
                    int threads = 0);

nlohmann::json eval_report_json(const EvalReport& r,
                                const std::vector<std::string>& names = {});
std::string confusion_csv(const EvalReport& r);

nlohmann::json train_report_summary(const TrainReport& r);
std::string train_report_jsonl(const TrainReport& r);
std::string train_curve_csv(const TrainReport& r);

// generate -> features -> split -> fit -> evaluate on the test split.
struct PipelineResult {
  FeatureTable features;
  Split split;
  FitResult fit;
  EvalReport final_eval;
  EvalReport best_eval;
};

PipelineResult run_pipeline(const ExperimentSpec& spec,
                            std::optional<double> snr_db,
                            const EpochCallback& on_epoch = {});

}  // namespace pqdvqc
