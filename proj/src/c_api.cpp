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
#include "pqdvqc/pqdvqc.h"

#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "pqdvqc/error.hpp"
#include "pqdvqc/experiment.hpp"
#include "pqdvqc/io.hpp"

struct pqdvqc_dataset {
  pqdvqc::Dataset value;
};

struct pqdvqc_features {
  pqdvqc::FeatureTable value;
};

struct pqdvqc_model {
  pqdvqc::Checkpoint value;
};

struct pqdvqc_fit {
  pqdvqc::FitResult value;
};

struct pqdvqc_eval {
  pqdvqc::EvalReport value;
  std::vector<std::string> names;
};

namespace {

thread_local std::string g_last_error;

pqdvqc_status fail(pqdvqc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
pqdvqc_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PQDVQC_OK;
  } catch (const pqdvqc::Error& e) {
    return fail(static_cast<pqdvqc_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(PQDVQC_ERR_CAPACITY, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PQDVQC_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(PQDVQC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PQDVQC_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw pqdvqc::ArgumentError(std::string(name) + " is NULL");
}

std::string bounded(const char* s, std::size_t cap) {
  return std::string(s, strnlen(s, cap));
}

pqdvqc::ExperimentSpec to_spec(const pqdvqc_options* o) {
  require(o, "options");
  auto spec = pqdvqc::default_experiment(
      pqdvqc::experiment_from_string(bounded(o->experiment, sizeof(o->experiment))));
  pqdvqc::set_master_seed(spec, o->seed);
  spec.per_class = o->per_class;
  spec.signal.sample_rate_hz = o->sample_rate_hz;
  spec.signal.duration_s = o->duration_s;
  spec.signal.validate();
  spec.features.truncate_above_nyquist = o->truncate_harmonics != 0;
  spec.test_fraction = o->test_fraction;
  spec.model.n_layers = o->layers;
  spec.model.validate();
  spec.train.epochs = o->epochs;
  spec.train.batch_size = o->batch_size;
  spec.train.lr = o->lr;
  switch (o->gradient) {
    case PQDVQC_GRAD_ADJOINT:
      spec.train.gradient_method = pqdvqc::GradientMethod::kAdjoint;
      break;
    case PQDVQC_GRAD_SHIFT:
      spec.train.gradient_method = pqdvqc::GradientMethod::kParameterShift;
      break;
    default:
      throw pqdvqc::ConfigError("unknown gradient method");
  }
  spec.train.threads = o->threads;
  spec.train.validate();
  return spec;
}

std::optional<double> snr_of(const pqdvqc_options* o) {
  if (!o->has_snr) return std::nullopt;
  return o->snr_db;
}

}  // namespace

extern "C" {

const char* pqdvqc_version(void) { return "0.1.0"; }

const char* pqdvqc_last_error(void) { return g_last_error.c_str(); }

const char* pqdvqc_status_string(pqdvqc_status status) {
  switch (status) {
    case PQDVQC_OK:
      return "ok";
    case PQDVQC_ERR_ARGUMENT:
      return "invalid argument";
    case PQDVQC_ERR_CONFIG:
      return "configuration error";
    case PQDVQC_ERR_CAPACITY:
      return "capacity exceeded";
    case PQDVQC_ERR_IO:
      return "I/O error";
    case PQDVQC_ERR_PARSE:
      return "parse error";
    case PQDVQC_ERR_TRAINING:
      return "training error";
    case PQDVQC_ERR_LOAD:
      return "load error";
    case PQDVQC_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

pqdvqc_status pqdvqc_options_init(pqdvqc_options* opts, const char* experiment) {
  return guarded([&] {
    require(opts, "options");
    require(experiment, "experiment");
    const auto spec = pqdvqc::default_experiment(pqdvqc::experiment_from_string(experiment));
    pqdvqc_options o{};
    const char* name = pqdvqc::to_string(spec.id);
    std::strncpy(o.experiment, name, sizeof(o.experiment) - 1);
    o.seed = spec.signal.rng_seed;
    o.per_class = spec.per_class;
    o.sample_rate_hz = spec.signal.sample_rate_hz;
    o.duration_s = spec.signal.duration_s;
    o.has_snr = 0;
    o.snr_db = 0.0;
    o.truncate_harmonics = spec.features.truncate_above_nyquist ? 1 : 0;
    o.test_fraction = spec.test_fraction;
    o.layers = spec.model.n_layers;
    o.epochs = spec.train.epochs;
    o.batch_size = spec.train.batch_size;
    o.lr = spec.train.lr;
    o.gradient = PQDVQC_GRAD_ADJOINT;
    o.threads = 0;
    *opts = o;
  });
}

pqdvqc_status pqdvqc_experiment_classes(const char* experiment, int* n_classes) {
  return guarded([&] {
    require(experiment, "experiment");
    require(n_classes, "n_classes");
    *n_classes = pqdvqc::num_classes(pqdvqc::experiment_from_string(experiment));
  });
}

pqdvqc_status pqdvqc_generate(const pqdvqc_options* opts, pqdvqc_dataset** out) {
  return guarded([&] {
    require(out, "out");
    const auto spec = to_spec(opts);
    auto* d = new pqdvqc_dataset{pqdvqc::generate_experiment_dataset(spec, snr_of(opts))};
    *out = d;
  });
}

pqdvqc_status pqdvqc_dataset_add_noise(const pqdvqc_dataset* clean, double snr_db,
                                       uint64_t seed, pqdvqc_dataset** out) {
  return guarded([&] {
    require(clean, "dataset");
    require(out, "out");
    *out = new pqdvqc_dataset{pqdvqc::add_awgn(clean->value, snr_db, seed)};
  });
}

pqdvqc_status pqdvqc_dataset_save(const pqdvqc_dataset* d, const char* csv_path) {
  return guarded([&] {
    require(d, "dataset");
    require(csv_path, "path");
    pqdvqc::save_dataset(d->value, csv_path);
  });
}

pqdvqc_status pqdvqc_dataset_load(const char* csv_path, pqdvqc_dataset** out) {
  return guarded([&] {
    require(csv_path, "path");
    require(out, "out");
    *out = new pqdvqc_dataset{pqdvqc::load_dataset(csv_path)};
  });
}

pqdvqc_status pqdvqc_dataset_shape(const pqdvqc_dataset* d, size_t* rows,
                                   size_t* samples) {
  return guarded([&] {
    require(d, "dataset");
    if (rows) *rows = d->value.waveforms.size();
    if (samples) *samples = d->value.spec.sample_count();
  });
}

pqdvqc_status pqdvqc_dataset_row(const pqdvqc_dataset* d, size_t row, int* code,
                                 double* buf, size_t cap) {
  return guarded([&] {
    require(d, "dataset");
    if (row >= d->value.waveforms.size()) {
      throw pqdvqc::ArgumentError("row " + std::to_string(row) + " out of range");
    }
    const auto& w = d->value.waveforms[row];
    if (buf != nullptr) {
      if (cap < w.samples.size()) {
        throw pqdvqc::CapacityError("buffer holds " + std::to_string(cap) +
                                    " samples, row has " +
                                    std::to_string(w.samples.size()));
      }
      std::copy(w.samples.begin(), w.samples.end(), buf);
    }
    if (code) *code = static_cast<int>(w.label);
  });
}

void pqdvqc_dataset_free(pqdvqc_dataset* d) { delete d; }

pqdvqc_status pqdvqc_extract_features(const pqdvqc_dataset* d,
                                      const pqdvqc_options* opts,
                                      pqdvqc_features** out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    pqdvqc::FeatureSettings settings;
    int threads = 0;
    if (opts != nullptr) {
      settings.truncate_above_nyquist = opts->truncate_harmonics != 0;
      threads = opts->threads;
    }
    *out = new pqdvqc_features{pqdvqc::extract_table(d->value, settings, threads)};
  });
}

pqdvqc_status pqdvqc_features_save(const pqdvqc_features* f, const char* csv_path) {
  return guarded([&] {
    require(f, "features");
    require(csv_path, "path");
    pqdvqc::save_features(f->value, csv_path);
  });
}

pqdvqc_status pqdvqc_features_load(const char* csv_path, pqdvqc_features** out) {
  return guarded([&] {
    require(csv_path, "path");
    require(out, "out");
    *out = new pqdvqc_features{pqdvqc::load_features(csv_path)};
  });
}

pqdvqc_status pqdvqc_features_rows(const pqdvqc_features* f, size_t* rows) {
  return guarded([&] {
    require(f, "features");
    require(rows, "rows");
    *rows = f->value.size();
  });
}

pqdvqc_status pqdvqc_features_row(const pqdvqc_features* f, size_t row, int* code,
                                  double out[9]) {
  return guarded([&] {
    require(f, "features");
    if (row >= f->value.size()) {
      throw pqdvqc::ArgumentError("row " + std::to_string(row) + " out of range");
    }
    if (code) *code = f->value.codes[row];
    if (out) std::copy(f->value.rows[row].begin(), f->value.rows[row].end(), out);
  });
}

pqdvqc_status pqdvqc_features_split(const pqdvqc_features* f,
                                    const pqdvqc_options* opts,
                                    pqdvqc_features** train, pqdvqc_features** test) {
  return guarded([&] {
    require(f, "features");
    require(train, "train");
    require(test, "test");
    const auto spec = to_spec(opts);
    const auto split = pqdvqc::experiment_split(spec, f->value);
    auto a = std::make_unique<pqdvqc_features>(pqdvqc_features{pqdvqc::subset(f->value, split.train)});
    auto b = std::make_unique<pqdvqc_features>(pqdvqc_features{pqdvqc::subset(f->value, split.test)});
    *train = a.release();
    *test = b.release();
  });
}

void pqdvqc_features_free(pqdvqc_features* f) { delete f; }

pqdvqc_status pqdvqc_train(const pqdvqc_options* opts, const pqdvqc_features* train,
                           const pqdvqc_features* test, pqdvqc_epoch_fn on_epoch,
                           void* user, pqdvqc_fit** out) {
  return guarded([&] {
    require(train, "train features");
    require(test, "test features");
    require(out, "out");
    const auto spec = to_spec(opts);
    pqdvqc::EpochCallback cb;
    if (on_epoch != nullptr) {
      cb = [on_epoch, user](const pqdvqc::EpochRecord& r) {
        on_epoch(user, r.epoch, r.train_loss, r.train_acc, r.test_acc);
      };
    }
    *out = new pqdvqc_fit{pqdvqc::fit(train->value, test->value,
                                      pqdvqc::label_map(spec.id), spec.model,
                                      spec.train, pqdvqc::to_string(spec.id), cb)};
  });
}

pqdvqc_status pqdvqc_fit_epochs(const pqdvqc_fit* fit, int* epochs) {
  return guarded([&] {
    require(fit, "fit");
    require(epochs, "epochs");
    *epochs = static_cast<int>(fit->value.report.epochs.size());
  });
}

pqdvqc_status pqdvqc_fit_best(const pqdvqc_fit* fit, int* epoch, double* test_acc) {
  return guarded([&] {
    require(fit, "fit");
    if (epoch) *epoch = fit->value.report.best_epoch;
    if (test_acc) *test_acc = fit->value.report.best_test_acc;
  });
}

pqdvqc_status pqdvqc_fit_model(const pqdvqc_fit* fit, int best, pqdvqc_model** out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    *out = new pqdvqc_model{best ? fit->value.best : fit->value.checkpoint};
  });
}

pqdvqc_status pqdvqc_fit_write_reports(const pqdvqc_fit* fit, const char* dir) {
  return guarded([&] {
    require(fit, "fit");
    require(dir, "dir");
    const std::filesystem::path root(dir);
    const auto& r = fit->value.report;
    pqdvqc::write_text_atomic(root / "report.jsonl", pqdvqc::train_report_jsonl(r));
    pqdvqc::write_text_atomic(root / "curve.csv", pqdvqc::train_curve_csv(r));
    pqdvqc::write_json(root / "summary.json", pqdvqc::train_report_summary(r));
  });
}

void pqdvqc_fit_free(pqdvqc_fit* fit) { delete fit; }

pqdvqc_status pqdvqc_model_save(const pqdvqc_model* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    pqdvqc::save_checkpoint(m->value, path);
  });
}

pqdvqc_status pqdvqc_model_load(const char* path, pqdvqc_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new pqdvqc_model{pqdvqc::load_checkpoint(path)};
  });
}

pqdvqc_status pqdvqc_model_info(const pqdvqc_model* m, int* n_qubits, int* n_classes,
                                size_t* n_params) {
  return guarded([&] {
    require(m, "model");
    if (n_qubits) *n_qubits = m->value.config.n_qubits();
    if (n_classes) *n_classes = m->value.config.n_ancilla;
    if (n_params) *n_params = m->value.config.num_params();
  });
}

pqdvqc_status pqdvqc_model_predict(const pqdvqc_model* m, const double features[9],
                                   int* predicted) {
  return guarded([&] {
    require(m, "model");
    require(features, "features");
    require(predicted, "predicted");
    const pqdvqc::QnnModel model(m->value.config);
    const auto x = pqdvqc::standardize(std::span<const double>(features, 9), m->value.stats);
    *predicted = pqdvqc::argmax(model.forward(x, m->value.theta));
  });
}

void pqdvqc_model_free(pqdvqc_model* m) { delete m; }

pqdvqc_status pqdvqc_evaluate(const pqdvqc_model* m, const pqdvqc_features* f,
                              int threads, pqdvqc_eval** out) {
  return guarded([&] {
    require(m, "model");
    require(f, "features");
    require(out, "out");
    auto e = std::make_unique<pqdvqc_eval>();
    e->value = pqdvqc::evaluate(m->value, f->value, threads);
    try {
      e->names = pqdvqc::class_names(pqdvqc::experiment_from_string(m->value.experiment));
      if (e->names.size() != e->value.confusion.size()) e->names.clear();
    } catch (const pqdvqc::ConfigError&) {
      e->names.clear();
    }
    *out = e.release();
  });
}

pqdvqc_status pqdvqc_eval_accuracy(const pqdvqc_eval* e, double* accuracy) {
  return guarded([&] {
    require(e, "eval");
    require(accuracy, "accuracy");
    *accuracy = e->value.accuracy;
  });
}

pqdvqc_status pqdvqc_eval_classes(const pqdvqc_eval* e, int* n_classes) {
  return guarded([&] {
    require(e, "eval");
    require(n_classes, "n_classes");
    *n_classes = static_cast<int>(e->value.confusion.size());
  });
}

pqdvqc_status pqdvqc_eval_class_accuracy(const pqdvqc_eval* e, int cls,
                                         double* accuracy, size_t* count) {
  return guarded([&] {
    require(e, "eval");
    if (cls < 0 || static_cast<std::size_t>(cls) >= e->value.confusion.size()) {
      throw pqdvqc::ArgumentError("class " + std::to_string(cls) + " out of range");
    }
    if (accuracy) *accuracy = e->value.per_class_accuracy[cls];
    if (count) *count = e->value.class_counts[cls];
  });
}

pqdvqc_status pqdvqc_eval_confusion(const pqdvqc_eval* e, int truth, int predicted,
                                    size_t* count) {
  return guarded([&] {
    require(e, "eval");
    require(count, "count");
    const auto k = e->value.confusion.size();
    if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= k ||
        static_cast<std::size_t>(predicted) >= k) {
      throw pqdvqc::ArgumentError("confusion index out of range");
    }
    *count = e->value.confusion[truth][predicted];
  });
}

pqdvqc_status pqdvqc_eval_parameter_count(const pqdvqc_eval* e, size_t* count) {
  return guarded([&] {
    require(e, "eval");
    require(count, "count");
    *count = e->value.parameter_count;
  });
}

pqdvqc_status pqdvqc_eval_write(const pqdvqc_eval* e, const char* json_path,
                                const char* csv_path) {
  return guarded([&] {
    require(e, "eval");
    if (json_path) pqdvqc::write_json(json_path, pqdvqc::eval_report_json(e->value, e->names));
    if (csv_path) pqdvqc::write_text_atomic(csv_path, pqdvqc::confusion_csv(e->value));
  });
}

void pqdvqc_eval_free(pqdvqc_eval* e) { delete e; }

}  // extern "C"
