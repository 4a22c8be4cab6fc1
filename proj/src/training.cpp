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
#include "pqdvqc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "pqdvqc/error.hpp"
#include "pqdvqc/parallel.hpp"

namespace pqdvqc {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Four-term shift coefficients for generators with spectrum {0, +-1/2}.
const double kShiftNear = (std::numbers::sqrt2 + 1.0) / (4.0 * std::numbers::sqrt2);
const double kShiftFar = (std::numbers::sqrt2 - 1.0) / (4.0 * std::numbers::sqrt2);

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_label(int label, std::size_t k) {
  if (label < 0 || static_cast<std::size_t>(label) >= k) {
    throw ArgumentError("label " + std::to_string(label) + " outside 0.." +
                        std::to_string(k - 1));
  }
}

std::vector<double> z_readout(const qsim::StateVector& s,
                              std::span<const int> qubits) {
  std::vector<double> e(qubits.size());
  for (std::size_t k = 0; k < qubits.size(); ++k) e[k] = qsim::expect_z(s, qubits[k]);
  return e;
}

std::vector<int> ancilla_qubits(const ModelConfig& c) {
  std::vector<int> q(c.n_ancilla);
  for (int k = 0; k < c.n_ancilla; ++k) q[k] = c.ancilla_qubit(k);
  return q;
}

SampleGradient head(std::vector<double> expectations, int label, LossKind kind) {
  SampleGradient out;
  out.probs = softmax(expectations);
  out.loss = loss(out.probs, label, kind);
  return out;
}

}  // namespace

const char* to_string(LossKind k) { return k == LossKind::kBce ? "bce" : "cce"; }

const char* to_string(GradientMethod m) {
  return m == GradientMethod::kAdjoint ? "adjoint" : "shift";
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "bce") return LossKind::kBce;
  if (s == "cce") return LossKind::kCce;
  throw ConfigError("unknown loss '" + s + "' (expected bce or cce)");
}

GradientMethod gradient_method_from_string(const std::string& s) {
  if (s == "adjoint") return GradientMethod::kAdjoint;
  if (s == "shift" || s == "parameter_shift") return GradientMethod::kParameterShift;
  throw ConfigError("unknown gradient method '" + s +
                    "' (expected shift or adjoint)");
}

double loss(std::span<const double> probs, int label, LossKind kind) {
  check_label(label, probs.size());
  if (kind == LossKind::kBce) {
    if (probs.size() != 2) {
      throw ArgumentError("binary cross-entropy needs exactly two classes");
    }
    const double p1 = probs[1];
    const double y = label;
    return -(y * std::log(std::max(p1, kLogFloor)) +
             (1.0 - y) * std::log(std::max(1.0 - p1, kLogFloor)));
  }
  return -std::log(std::max(probs[label], kLogFloor));
}

std::vector<double> loss_grad_logits(std::span<const double> probs, int label,
                                     LossKind kind) {
  check_label(label, probs.size());
  if (kind == LossKind::kBce && probs.size() != 2) {
    throw ArgumentError("binary cross-entropy needs exactly two classes");
  }
  std::vector<double> g(probs.begin(), probs.end());
  g[label] -= 1.0;
  return g;
}

std::vector<std::vector<double>> parameter_shift_jacobian(
    const qsim::Circuit& circuit, std::span<const double> theta,
    std::span<const int> z_qubits) {
  circuit.validate();
  const std::size_t n_params = circuit.num_params();
  if (theta.size() < n_params) {
    throw ArgumentError("parameter vector shorter than the circuit needs");
  }
  const auto gate_of = circuit.param_gate_index();
  std::vector<double> shifted(theta.begin(), theta.end());
  auto eval_at = [&](std::size_t p, double delta) {
    shifted[p] = theta[p] + delta;
    auto e = z_readout(qsim::run_circuit(circuit, shifted), z_qubits);
    shifted[p] = theta[p];
    return e;
  };

  std::vector<std::vector<double>> jac(z_qubits.size(),
                                       std::vector<double>(n_params, 0.0));
  for (std::size_t p = 0; p < n_params; ++p) {
    const auto& g = circuit.ops[gate_of[p]];
    const auto plus = eval_at(p, kHalfPi);
    const auto minus = eval_at(p, -kHalfPi);
    if (g.kind == qsim::GateKind::kRy) {
      for (std::size_t k = 0; k < z_qubits.size(); ++k) {
        jac[k][p] = 0.5 * (plus[k] - minus[k]);
      }
    } else {
      const auto plus3 = eval_at(p, 3.0 * kHalfPi);
      const auto minus3 = eval_at(p, -3.0 * kHalfPi);
      for (std::size_t k = 0; k < z_qubits.size(); ++k) {
        jac[k][p] = kShiftNear * (plus[k] - minus[k]) -
                    kShiftFar * (plus3[k] - minus3[k]);
      }
    }
  }
  return jac;
}

std::vector<double> adjoint_gradient(qsim::RealStateVector final_state,
                                     std::span<const qsim::GateOp> ops,
                                     std::span<const double> theta,
                                     std::span<const int> z_qubits,
                                     std::span<const double> weights) {
  // Ops before the first trainable one never need undoing.
  std::size_t first = ops.size();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].trainable()) {
      first = i;
      break;
    }
  }
  const auto plan =
      qsim::make_block_plan(final_state.num_qubits(), ops.subspan(first));
  return adjoint_gradient(std::move(final_state), plan, theta, z_qubits, weights);
}

std::vector<double> adjoint_gradient(qsim::RealStateVector final_state,
                                     const qsim::BlockPlan& plan,
                                     std::span<const double> theta,
                                     std::span<const int> z_qubits,
                                     std::span<const double> weights) {
  if (z_qubits.size() != weights.size()) {
    throw ArgumentError("one weight per measured qubit required");
  }
  for (int q : z_qubits) {
    if (q < 0 || q >= final_state.num_qubits()) {
      throw ArgumentError("measured qubit " + std::to_string(q) + " out of range");
    }
  }
  std::size_t n_params = 0;
  for (const auto& g : plan.ops) {
    if (g.trainable()) n_params = std::max<std::size_t>(n_params, g.param_id + 1);
  }
  if (theta.size() < n_params) {
    throw ArgumentError("parameter vector shorter than the circuit needs");
  }
  std::vector<double> grad(n_params, 0.0);

  // lambda = M |phi> with M = sum_k w_k Z_k, diagonal in the basis. The
  // diagonal depends only on the measured bits, so tabulate it per pattern.
  const std::size_t patterns = std::size_t{1} << z_qubits.size();
  std::vector<double> diag(patterns, 0.0);
  for (std::size_t p = 0; p < patterns; ++p) {
    for (std::size_t k = 0; k < z_qubits.size(); ++k) {
      diag[p] += ((p >> k) & 1u) ? -weights[k] : weights[k];
    }
  }
  qsim::RealStateVector lambda = final_state;
  auto lam = lambda.amplitudes();
  bool contiguous = true;
  for (std::size_t k = 1; k < z_qubits.size(); ++k) {
    contiguous = contiguous && z_qubits[k] == z_qubits[0] + static_cast<int>(k);
  }
  if (contiguous && !z_qubits.empty()) {
    const int shift = z_qubits[0];
    const std::size_t mask = patterns - 1;
    for (std::size_t i = 0; i < lam.size(); ++i) lam[i] *= diag[(i >> shift) & mask];
  } else {
    for (std::size_t i = 0; i < lam.size(); ++i) {
      std::size_t p = 0;
      for (std::size_t k = 0; k < z_qubits.size(); ++k) {
        p |= ((i >> z_qubits[k]) & 1u) << k;
      }
      lam[i] *= diag[p];
    }
  }
  qsim::adjoint_sweep(plan, final_state, lambda, theta, grad);
  return grad;
}

SampleGradient grad_parameter_shift(const QnnModel& model,
                                    std::span<const double> x_std, int label,
                                    std::span<const double> theta,
                                    LossKind kind) {
  const auto& cfg = model.config();
  qsim::Circuit full = build_encoding(x_std, cfg);
  full.ops.insert(full.ops.end(), model.variational().ops.begin(),
                  model.variational().ops.end());
  if (theta.size() != model.num_params()) {
    throw ArgumentError("parameter vector length does not match the model");
  }
  const auto qubits = ancilla_qubits(cfg);
  SampleGradient out =
      head(z_readout(qsim::run_circuit(full, theta), qubits), label, kind);
  const auto dl_de = loss_grad_logits(out.probs, label, kind);
  const auto jac = parameter_shift_jacobian(full, theta, qubits);
  out.grad.assign(model.num_params(), 0.0);
  for (std::size_t p = 0; p < out.grad.size(); ++p) {
    for (std::size_t k = 0; k < qubits.size(); ++k) {
      out.grad[p] += dl_de[k] * jac[k][p];
    }
  }
  return out;
}

SampleGradient grad_adjoint(const QnnModel& model,
                            std::span<const double> x_std, int label,
                            std::span<const double> theta, LossKind kind) {
  auto state = model.final_state(x_std, theta);
  SampleGradient out = head(model.readout(state), label, kind);
  const auto dl_de = loss_grad_logits(out.probs, label, kind);
  out.grad = adjoint_gradient(std::move(state), model.plan(), theta,
                              ancilla_qubits(model.config()), dl_de);
  return out;
}

AdamOptimizer::AdamOptimizer(std::size_t n_params, AdamConfig config)
    : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {}

void AdamOptimizer::step(std::span<double> theta, std::span<const double> grad) {
  if (theta.size() != m_.size() || grad.size() != m_.size()) {
    throw ArgumentError("Adam step dimension mismatch");
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw TrainingError("non-finite gradient component " + std::to_string(i) +
                          " at step " + std::to_string(t_ + 1) + ": " +
                          std::to_string(grad[i]));
    }
  }
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    theta[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ConfigError("learning rate must be finite and non-negative");
  }
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"batch_size", c.batch_size},
                     {"lr", c.lr},
                     {"loss", to_string(c.loss_kind)},
                     {"gradient_method", to_string(c.gradient_method)},
                     {"seed", c.seed},
                     {"shuffle", c.shuffle}};
}

void to_json(nlohmann::json& j, const EpochRecord& r) {
  j = nlohmann::json{{"epoch", r.epoch},
                     {"train_loss", r.train_loss},
                     {"train_acc", r.train_acc},
                     {"test_acc", r.test_acc},
                     {"seconds", r.seconds}};
}

namespace {

std::vector<SampleGradient> per_sample_gradients(
    const QnnModel& model, const LabeledSet& data,
    std::span<const std::size_t> batch, std::span<const double> theta,
    const TrainConfig& config) {
  std::vector<SampleGradient> out(batch.size());
  const int threads = config.threads > 0 ? config.threads : thread_budget();
  parallel_for(batch.size(), threads, [&](std::size_t b) {
    const std::size_t i = batch[b];
    out[b] = config.gradient_method == GradientMethod::kAdjoint
                 ? grad_adjoint(model, data.x[i], data.y[i], theta, config.loss_kind)
                 : grad_parameter_shift(model, data.x[i], data.y[i], theta,
                                        config.loss_kind);
  });
  return out;
}

}  // namespace

SampleGradient batch_gradient(const QnnModel& model, const LabeledSet& data,
                              std::span<const std::size_t> batch,
                              std::span<const double> theta,
                              const TrainConfig& config) {
  if (batch.empty()) throw ArgumentError("empty batch");
  const auto parts = per_sample_gradients(model, data, batch, theta, config);
  SampleGradient mean;
  mean.grad.assign(theta.size(), 0.0);
  for (const auto& p : parts) {
    mean.loss += p.loss;
    for (std::size_t j = 0; j < mean.grad.size(); ++j) mean.grad[j] += p.grad[j];
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  mean.loss *= inv;
  for (double& g : mean.grad) g *= inv;
  return mean;
}

TrainReport train(const QnnModel& model, const LabeledSet& train_set,
                  const LabeledSet& test_set, const TrainConfig& config,
                  std::vector<double> theta, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.size() == 0) throw ConfigError("training split is empty");
  if (test_set.size() == 0) throw ConfigError("test split is empty");
  if (theta.size() != model.num_params()) {
    throw ArgumentError("initial parameters do not match the model");
  }
  const int threads = config.threads > 0 ? config.threads : thread_budget();
  const auto t_start = Clock::now();

  std::mt19937_64 rng(config.seed);
  AdamOptimizer adam(theta.size(), AdamConfig{config.lr});
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sample_loss(train_set.size());
  std::vector<char> sample_hit(train_set.size());

  TrainReport report;
  report.best_epoch = 0;
  report.best_test_acc = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t_epoch = Clock::now();
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::span<const std::size_t> batch(order.data() + start, stop - start);
      const auto parts = per_sample_gradients(model, train_set, batch, theta, config);
      std::vector<double> grad(theta.size(), 0.0);
      for (std::size_t b = 0; b < parts.size(); ++b) {
        const std::size_t i = batch[b];
        sample_loss[i] = parts[b].loss;
        sample_hit[i] = argmax(parts[b].probs) == train_set.y[i];
        for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += parts[b].grad[j];
      }
      const double inv = 1.0 / static_cast<double>(parts.size());
      for (double& g : grad) g *= inv;
      adam.step(theta, grad);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = std::accumulate(sample_loss.begin(), sample_loss.end(), 0.0) /
                     static_cast<double>(sample_loss.size());
    rec.train_acc = static_cast<double>(std::count(sample_hit.begin(), sample_hit.end(), 1)) /
                    static_cast<double>(sample_hit.size());
    rec.test_acc = accuracy(model, test_set, theta, threads);
    rec.seconds = seconds_since(t_epoch);
    report.epochs.push_back(rec);
    if (rec.test_acc > report.best_test_acc) {
      report.best_test_acc = rec.test_acc;
      report.best_epoch = epoch;
      report.best_theta = theta;
    }
    if (on_epoch) on_epoch(rec);
  }
  report.final_theta = std::move(theta);
  report.wall_seconds = seconds_since(t_start);
  return report;
}

std::vector<int> predict_all(const QnnModel& model, const LabeledSet& data,
                             std::span<const double> theta, int threads) {
  std::vector<int> pred(data.size());
  parallel_for(data.size(), threads > 0 ? threads : thread_budget(),
               [&](std::size_t i) { pred[i] = argmax(model.forward(data.x[i], theta)); });
  return pred;
}

double accuracy(const QnnModel& model, const LabeledSet& data,
                std::span<const double> theta, int threads) {
  if (data.size() == 0) return 0.0;
  const auto pred = predict_all(model, data, theta, threads);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == data.y[i];
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

}  // namespace pqdvqc
