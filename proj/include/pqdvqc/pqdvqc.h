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
#ifndef PQDVQC_PQDVQC_H_
#define PQDVQC_PQDVQC_H_

/* C interface to the pqdvqc library.
 *
 * Every function returns a pqdvqc_status. On failure the message for the
 * calling thread is available from pqdvqc_last_error() until the next call
 * on that thread. Handles are opaque; each *_free accepts NULL. Paths are
 * UTF-8. Output handles are written only on success.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(PQDVQC_BUILDING_LIBRARY)
#define PQDVQC_API __attribute__((visibility("default")))
#else
#define PQDVQC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pqdvqc_status {
  PQDVQC_OK = 0,
  PQDVQC_ERR_ARGUMENT = 1,
  PQDVQC_ERR_CONFIG = 2,
  PQDVQC_ERR_CAPACITY = 3,
  PQDVQC_ERR_IO = 4,
  PQDVQC_ERR_PARSE = 5,
  PQDVQC_ERR_TRAINING = 6,
  PQDVQC_ERR_LOAD = 7,
  PQDVQC_ERR_INTERNAL = 99
} pqdvqc_status;

typedef enum pqdvqc_gradient {
  PQDVQC_GRAD_ADJOINT = 0,
  PQDVQC_GRAD_SHIFT = 1
} pqdvqc_gradient;

typedef struct pqdvqc_dataset pqdvqc_dataset;
typedef struct pqdvqc_features pqdvqc_features;
typedef struct pqdvqc_model pqdvqc_model;
typedef struct pqdvqc_fit pqdvqc_fit;
typedef struct pqdvqc_eval pqdvqc_eval;

/* Experiment settings. Fill with pqdvqc_options_init, then override. */
typedef struct pqdvqc_options {
  char experiment[32]; /* detect2, single7, mixed10, noise_sweep */
  uint64_t seed;
  size_t per_class;
  double sample_rate_hz;
  double duration_s;
  int has_snr; /* nonzero: add noise at snr_db */
  double snr_db;
  int truncate_harmonics; /* drop harmonics at or above Nyquist */
  double test_fraction;
  int layers;
  int epochs;
  int batch_size;
  double lr;
  pqdvqc_gradient gradient;
  int threads; /* 0: PQDVQC_THREADS or hardware concurrency */
} pqdvqc_options;

typedef void (*pqdvqc_epoch_fn)(void* user, int epoch, double train_loss,
                                double train_acc, double test_acc);

PQDVQC_API const char* pqdvqc_version(void);
PQDVQC_API const char* pqdvqc_last_error(void);
PQDVQC_API const char* pqdvqc_status_string(pqdvqc_status status);

PQDVQC_API pqdvqc_status pqdvqc_options_init(pqdvqc_options* opts,
                                             const char* experiment);

/* Number of classes the experiment trains on. */
PQDVQC_API pqdvqc_status pqdvqc_experiment_classes(const char* experiment,
                                                   int* n_classes);

/* Waveforms. Labels are disturbance codes 0..10. */
PQDVQC_API pqdvqc_status pqdvqc_generate(const pqdvqc_options* opts,
                                         pqdvqc_dataset** out);
PQDVQC_API pqdvqc_status pqdvqc_dataset_add_noise(const pqdvqc_dataset* clean,
                                                  double snr_db, uint64_t seed,
                                                  pqdvqc_dataset** out);
PQDVQC_API pqdvqc_status pqdvqc_dataset_save(const pqdvqc_dataset* d,
                                             const char* csv_path);
PQDVQC_API pqdvqc_status pqdvqc_dataset_load(const char* csv_path,
                                             pqdvqc_dataset** out);
PQDVQC_API pqdvqc_status pqdvqc_dataset_shape(const pqdvqc_dataset* d,
                                              size_t* rows, size_t* samples);
/* Copies row `row` into buf (capacity `cap` samples). */
PQDVQC_API pqdvqc_status pqdvqc_dataset_row(const pqdvqc_dataset* d,
                                            size_t row, int* code, double* buf,
                                            size_t cap);
PQDVQC_API void pqdvqc_dataset_free(pqdvqc_dataset* d);

/* Features: nine columns per row. */
PQDVQC_API pqdvqc_status pqdvqc_extract_features(const pqdvqc_dataset* d,
                                                 const pqdvqc_options* opts,
                                                 pqdvqc_features** out);
PQDVQC_API pqdvqc_status pqdvqc_features_save(const pqdvqc_features* f,
                                              const char* csv_path);
PQDVQC_API pqdvqc_status pqdvqc_features_load(const char* csv_path,
                                              pqdvqc_features** out);
PQDVQC_API pqdvqc_status pqdvqc_features_rows(const pqdvqc_features* f,
                                              size_t* rows);
PQDVQC_API pqdvqc_status pqdvqc_features_row(const pqdvqc_features* f,
                                             size_t row, int* code,
                                             double out[9]);
/* Stratified, seeded split using opts->test_fraction and opts->seed. */
PQDVQC_API pqdvqc_status pqdvqc_features_split(const pqdvqc_features* f,
                                               const pqdvqc_options* opts,
                                               pqdvqc_features** train,
                                               pqdvqc_features** test);
PQDVQC_API void pqdvqc_features_free(pqdvqc_features* f);

/* Training. `on_epoch` may be NULL. */
PQDVQC_API pqdvqc_status pqdvqc_train(const pqdvqc_options* opts,
                                      const pqdvqc_features* train,
                                      const pqdvqc_features* test,
                                      pqdvqc_epoch_fn on_epoch, void* user,
                                      pqdvqc_fit** out);
PQDVQC_API pqdvqc_status pqdvqc_fit_epochs(const pqdvqc_fit* fit, int* epochs);
PQDVQC_API pqdvqc_status pqdvqc_fit_best(const pqdvqc_fit* fit, int* epoch,
                                         double* test_acc);
/* best != 0 selects the best-test-epoch parameters. */
PQDVQC_API pqdvqc_status pqdvqc_fit_model(const pqdvqc_fit* fit, int best,
                                          pqdvqc_model** out);
/* Writes report.jsonl, curve.csv and summary.json into dir. */
PQDVQC_API pqdvqc_status pqdvqc_fit_write_reports(const pqdvqc_fit* fit,
                                                  const char* dir);
PQDVQC_API void pqdvqc_fit_free(pqdvqc_fit* fit);

PQDVQC_API pqdvqc_status pqdvqc_model_save(const pqdvqc_model* m,
                                           const char* path);
PQDVQC_API pqdvqc_status pqdvqc_model_load(const char* path,
                                           pqdvqc_model** out);
PQDVQC_API pqdvqc_status pqdvqc_model_info(const pqdvqc_model* m,
                                           int* n_qubits, int* n_classes,
                                           size_t* n_params);
/* Predicted class index for one raw feature row. */
PQDVQC_API pqdvqc_status pqdvqc_model_predict(const pqdvqc_model* m,
                                              const double features[9],
                                              int* predicted);
PQDVQC_API void pqdvqc_model_free(pqdvqc_model* m);

/* Evaluation on the rows whose labels the model knows. */
PQDVQC_API pqdvqc_status pqdvqc_evaluate(const pqdvqc_model* m,
                                         const pqdvqc_features* f, int threads,
                                         pqdvqc_eval** out);
PQDVQC_API pqdvqc_status pqdvqc_eval_accuracy(const pqdvqc_eval* e,
                                              double* accuracy);
PQDVQC_API pqdvqc_status pqdvqc_eval_classes(const pqdvqc_eval* e,
                                             int* n_classes);
PQDVQC_API pqdvqc_status pqdvqc_eval_class_accuracy(const pqdvqc_eval* e,
                                                    int cls, double* accuracy,
                                                    size_t* count);
PQDVQC_API pqdvqc_status pqdvqc_eval_confusion(const pqdvqc_eval* e,
                                               int truth, int predicted,
                                               size_t* count);
PQDVQC_API pqdvqc_status pqdvqc_eval_parameter_count(const pqdvqc_eval* e,
                                                     size_t* count);
/* Either path may be NULL. */
PQDVQC_API pqdvqc_status pqdvqc_eval_write(const pqdvqc_eval* e,
                                           const char* json_path,
                                           const char* csv_path);
PQDVQC_API void pqdvqc_eval_free(pqdvqc_eval* e);

#ifdef __cplusplus
}
#endif

#endif  /* PQDVQC_PQDVQC_H_ */
