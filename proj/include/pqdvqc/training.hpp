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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqdvqc/qnn.hpp"
#include "pqdvqc/qsim.hpp"

namespace pqdvqc {

enum class LossKind { kBce, kCce };
enum class GradientMethod { kParameterShift, kAdjoint };

const char* to_string(LossKind k);
const char* to_string(GradientMethod m);
LossKind loss_kind_from_string(const std::string& s);
GradientMethod gradient_method_from_string(const std::string& s);

inline constexpr double kLogFloor = 1e-12;

// CCE: -log p[y]. BCE (two classes only): -[y log p1 + (1-y) log(1-p1)] with
// p1 the softmax probability of class 1. Log arguments are floored at 1e-12.
double loss(std::span<const double> probs, int label, LossKind kind);

// dL/dE_k for logits E fed through softmax: p_k - [k == y] for both kinds.
std::vector<double> loss_grad_logits(std::span<const double> probs, int label,
                                     LossKind kind);

// J[k][p] = d<Z_(qubits[k])>/d theta_p by the shift rule. Ry uses
// (f(+pi/2) - f(-pi/2)) / 2; CRy, whose generator has eigenvalues {0, +-1/2},
// uses the exact four-term rule at +-pi/2 and +-3pi/2.
std::vector<std::vector<double>> parameter_shift_jacobian(
    const qsim::Circuit& circuit, std::span<const double> theta,
    std::span<const int> z_qubits);

// Gradient of sum_k weights[k] <Z_(qubits[k])> with respect to the trainable
// gates in `ops`, given the state those ops produced. One reverse sweep.
std::vector<double> adjoint_gradient(qsim::RealStateVector final_state,
                                     std::span<const qsim::GateOp> ops,
                                     std::span<const double> theta,
                                     std::span<const int> z_qubits,
                                     std::span<const double> weights);
// Same, with a plan prepared once for the ops.
std::vector<double> adjoint_gradient(qsim::RealStateVector final_state,
                                     const qsim::BlockPlan& plan,
                                     std::span<const double> theta,
                                     std::span<const int> z_qubits,
                                     std::span<const double> weights);

struct SampleGradient {
  double loss = 0.0;
  std::vector<double> probs;
  std::vector<double> grad;
};

SampleGradient grad_parameter_shift(const QnnModel& model,
                                    std::span<const double> x_std, int label,
                                    std::span<const double> theta,
                                    LossKind kind);
SampleGradient grad_adjoint(const QnnModel& model,
                            std::span<const double> x_std, int label,
                            std::span<const double> theta, LossKind kind);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n_params, AdamConfig config);

  // Throws TrainingError on a non-finite gradient component.
  void step(std::span<double> theta, std::span<const double> grad);

  std::size_t steps() const { return t_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

struct TrainConfig {
  int epochs = 25;
  int batch_size = 32;
  double lr = 0.01;
  LossKind loss_kind = LossKind::kCce;
  GradientMethod gradient_method = GradientMethod::kAdjoint;
  std::uint64_t seed = 0;
  bool shuffle = true;
  int threads = 0;  // 0: thread_budget()

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);

// Standardized inputs with class indices.
struct LabeledSet {
  std::vector<std::vector<double>> x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double seconds = 0.0;
};

void to_json(nlohmann::json& j, const EpochRecord& r);

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::vector<double> final_theta;
  std::vector<double> best_theta;
  int best_epoch = 0;
  double best_test_acc = 0.0;
  double wall_seconds = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mean of per-sample gradients over `batch`, summed in batch order.
SampleGradient batch_gradient(const QnnModel& model, const LabeledSet& data,
                              std::span<const std::size_t> batch,
                              std::span<const double> theta,
                              const TrainConfig& config);

// Seeded shuffle per epoch, mini-batches, Adam updates, per-epoch metrics.
TrainReport train(const QnnModel& model, const LabeledSet& train_set,
                  const LabeledSet& test_set, const TrainConfig& config,
                  std::vector<double> theta, const EpochCallback& on_epoch = {});

// Predicted class per sample.
std::vector<int> predict_all(const QnnModel& model, const LabeledSet& data,
                             std::span<const double> theta, int threads = 0);
double accuracy(const QnnModel& model, const LabeledSet& data,
                std::span<const double> theta, int threads = 0);

}  // namespace pqdvqc
