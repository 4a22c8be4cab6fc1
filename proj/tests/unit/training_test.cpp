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
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "pqdvqc/error.hpp"
#include "pqdvqc/qnn.hpp"
#include "pqdvqc/training.hpp"

namespace pqdvqc {
namespace {

using qsim::GateOp;

ModelConfig toy(int n_data, int n_ancilla, int layers) {
  ModelConfig c;
  c.n_data = n_data;
  c.n_ancilla = n_ancilla;
  c.n_layers = layers;
  c.seed = 3;
  return c;
}

std::vector<double> random_vector(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double model_loss(const QnnModel& m, const std::vector<double>& x, int y,
                  const std::vector<double>& theta, LossKind kind) {
  return loss(softmax(m.forward(x, theta)), y, kind);
}

std::vector<double> finite_difference(const QnnModel& m, const std::vector<double>& x, int y,
                                      std::vector<double> theta, LossKind kind) {
  const double h = 1e-5;
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    theta[i] = t + h;
    const double up = model_loss(m, x, y, theta, kind);
    theta[i] = t - h;
    const double down = model_loss(m, x, y, theta, kind);
    theta[i] = t;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

TEST(Loss, HandValues) {
  const std::vector<double> onehot = {0.0, 1.0, 0.0};
  EXPECT_EQ(loss(onehot, 1, LossKind::kCce), 0.0);
  const std::vector<double> half = {0.5, 0.5};
  EXPECT_NEAR(loss(half, 0, LossKind::kBce), std::log(2.0), 1e-15);
  EXPECT_NEAR(loss(half, 1, LossKind::kBce), 0.6931, 1e-4);
  EXPECT_NEAR(loss(half, 1, LossKind::kCce), std::log(2.0), 1e-15);
  const std::vector<double> three = {0.2, 0.5, 0.3};
  EXPECT_NEAR(loss(three, 0, LossKind::kCce), -std::log(0.2), 1e-15);
  EXPECT_NEAR(loss(three, 2, LossKind::kCce), -std::log(0.3), 1e-15);
  const std::vector<double> zero = {1.0, 0.0};
  EXPECT_NEAR(loss(zero, 1, LossKind::kCce), -std::log(kLogFloor), 1e-9);
}

TEST(Loss, Errors) {
  const std::vector<double> three = {0.2, 0.5, 0.3};
  EXPECT_THROW(loss(three, 3, LossKind::kCce), ArgumentError);
  EXPECT_THROW(loss(three, -1, LossKind::kCce), ArgumentError);
  EXPECT_THROW(loss(three, 0, LossKind::kBce), ArgumentError);
}

TEST(Loss, LogitGradientMatchesDifferences) {
  std::mt19937_64 rng(1);
  for (auto kind : {LossKind::kCce, LossKind::kBce}) {
    const std::size_t k = kind == LossKind::kBce ? 2 : 5;
    const auto e = random_vector(k, -1, 1, rng);
    const int y = 1;
    const auto g = loss_grad_logits(softmax(e), y, kind);
    for (std::size_t i = 0; i < k; ++i) {
      auto up = e, down = e;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double fd = (loss(softmax(up), y, kind) - loss(softmax(down), y, kind)) / 2e-6;
      EXPECT_NEAR(g[i], fd, 1e-8);
    }
  }
}

TEST(Names, RoundTrip) {
  EXPECT_EQ(loss_kind_from_string(to_string(LossKind::kBce)), LossKind::kBce);
  EXPECT_EQ(gradient_method_from_string("shift"), GradientMethod::kParameterShift);
  EXPECT_EQ(gradient_method_from_string("adjoint"), GradientMethod::kAdjoint);
  EXPECT_THROW(loss_kind_from_string("mse"), ConfigError);
  EXPECT_THROW(gradient_method_from_string("backprop"), ConfigError);
}

TEST(ShiftRule, SingleRotation) {
  qsim::Circuit c{1, {GateOp::ry_param(0, 0)}};
  const std::vector<int> z = {0};
  for (double t : {std::numbers::pi / 4, -1.1, 2.9}) {
    const std::vector<double> theta = {t};
    const auto j = parameter_shift_jacobian(c, theta, z);
    EXPECT_NEAR(j[0][0], -std::sin(t), 1e-12);
  }
  const std::vector<double> quarter = {std::numbers::pi / 4};
  EXPECT_NEAR(parameter_shift_jacobian(c, quarter, z)[0][0], -0.7071, 1e-4);
}

TEST(ShiftRule, ControlledRotationExact) {
  // <Z_1> after H(0), CRy(0 -> 1, t) is (1 + cos t) / 2.
  qsim::Circuit c{2, {GateOp::h(0), GateOp::cry_param(0, 1, 0)}};
  const std::vector<int> z = {1};
  for (double t : {0.3, 1.7, -2.2}) {
    const std::vector<double> theta = {t};
    EXPECT_NEAR(parameter_shift_jacobian(c, theta, z)[0][0], -std::sin(t) / 2, 1e-12);
  }
}

TEST(ShiftRule, CausallyIrrelevantGateHasZeroGradient) {
  qsim::Circuit c{3, {GateOp::h(0), GateOp::ry_param(0, 0), GateOp::cry_param(0, 1, 1),
                      GateOp::ry_param(2, 2), GateOp::cry_param(1, 2, 3)}};
  const std::vector<double> theta = {0.4, 1.2, -0.8, 2.0};
  const std::vector<int> z = {1};
  const auto j = parameter_shift_jacobian(c, theta, z);
  EXPECT_NEAR(j[0][2], 0.0, 1e-10);
  EXPECT_NEAR(j[0][3], 0.0, 1e-10);
  EXPECT_GT(std::abs(j[0][1]), 1e-3);
}

TEST(Adjoint, MatchesShiftJacobian) {
  std::mt19937_64 rng(2);
  qsim::Circuit c{4, {}};
  int p = 0;
  for (int q = 0; q < 4; ++q) c.ops.push_back(GateOp::h(q));
  for (int rep = 0; rep < 2; ++rep) {
    for (int q = 0; q < 4; ++q) c.ops.push_back(GateOp::ry_param(q, p++));
    for (int q = 0; q < 4; ++q) c.ops.push_back(GateOp::cry_param(q, (q + 1) % 4, p++));
  }
  const auto theta = random_vector(c.num_params(), -3, 3, rng);
  const std::vector<int> z = {2, 3};
  const std::vector<double> w = {0.7, -1.3};
  const auto j = parameter_shift_jacobian(c, theta, z);
  auto state = qsim::RealStateVector::zero(4);
  for (const auto& g : c.ops) qsim::apply_gate(state, g, g.trainable() ? theta[g.param_id] : g.theta);
  const auto grad = adjoint_gradient(state, c.ops, theta, z, w);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    EXPECT_NEAR(grad[i], w[0] * j[0][i] + w[1] * j[1][i], 1e-10);
  }
  const std::vector<double> one_weight = {1.0};
  EXPECT_THROW(adjoint_gradient(state, c.ops, theta, z, one_weight), ArgumentError);
}

TEST(Gradients, FiniteDifferenceAndMethodAgreement) {
  std::mt19937_64 rng(3);
  for (auto [cfg, kind] : {std::pair{toy(2, 2, 1), LossKind::kBce},
                           std::pair{toy(2, 2, 2), LossKind::kCce},
                           std::pair{toy(3, 3, 1), LossKind::kCce},
                           std::pair{toy(4, 2, 1), LossKind::kBce}}) {
    const QnnModel model(cfg);
    for (int trial = 0; trial < 4; ++trial) {
      const auto x = random_vector(cfg.n_data, -1, 1, rng);
      const auto theta = random_vector(model.num_params(), -3, 3, rng);
      const int y = trial % cfg.n_ancilla;
      const auto shift = grad_parameter_shift(model, x, y, theta, kind);
      const auto adj = grad_adjoint(model, x, y, theta, kind);
      const auto fd = finite_difference(model, x, y, theta, kind);
      EXPECT_NEAR(shift.loss, adj.loss, 1e-14);
      for (std::size_t i = 0; i < theta.size(); ++i) {
        EXPECT_NEAR(shift.grad[i], fd[i], 1e-5);
        EXPECT_NEAR(adj.grad[i], fd[i], 1e-5);
        EXPECT_NEAR(shift.grad[i], adj.grad[i], 1e-8);
      }
    }
  }
}

TEST(Gradients, BlockedAdjointMatchesShift) {
  std::mt19937_64 rng(4);
  const QnnModel model(toy(9, 4, 1));
  ASSERT_FALSE(model.plan().direct);
  const auto x = random_vector(9, -1, 1, rng);
  const auto theta = random_vector(model.num_params(), -3, 3, rng);
  const auto shift = grad_parameter_shift(model, x, 2, theta, LossKind::kCce);
  const auto adj = grad_adjoint(model, x, 2, theta, LossKind::kCce);
  for (std::size_t i = 0; i < theta.size(); ++i) EXPECT_NEAR(shift.grad[i], adj.grad[i], 1e-8);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  AdamOptimizer opt(3, {});
  std::vector<double> theta = {0.1, -0.2, 0.3};
  const auto before = theta;
  const std::vector<double> zero(3, 0.0);
  for (int i = 0; i < 5; ++i) opt.step(theta, zero);
  EXPECT_EQ(theta, before);
  EXPECT_EQ(opt.steps(), 5u);
}

TEST(Adam, MomentsStartAtZeroAndCount) {
  AdamOptimizer opt(2, {});
  for (double v : opt.first_moment()) EXPECT_EQ(v, 0.0);
  for (double v : opt.second_moment()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(opt.steps(), 0u);
  std::vector<double> theta = {0.0, 0.0};
  const std::vector<double> g = {1.0, -2.0};
  opt.step(theta, g);
  EXPECT_EQ(opt.steps(), 1u);
  EXPECT_NEAR(opt.first_moment()[0], 0.1, 1e-15);
  EXPECT_NEAR(opt.second_moment()[1], 0.004, 1e-15);
}

TEST(Adam, FirstStepMovesAgainstGradient) {
  AdamOptimizer opt(2, {});
  std::vector<double> theta = {0.0, 0.0};
  const std::vector<double> g = {0.3, -5.0};
  opt.step(theta, g);
  EXPECT_NEAR(theta[0], -0.01, 1e-9);
  EXPECT_NEAR(theta[1], 0.01, 1e-9);
}

TEST(Adam, SteadyStateStepIsLearningRate) {
  AdamOptimizer opt(1, {});
  std::vector<double> theta = {0.0};
  const std::vector<double> g = {-0.02};
  double prev = 0.0;
  for (int i = 0; i < 2000; ++i) {
    prev = theta[0];
    opt.step(theta, g);
  }
  EXPECT_NEAR(theta[0] - prev, 0.01, 1e-6);
}

TEST(Adam, RejectsBadGradients) {
  AdamOptimizer opt(2, {});
  std::vector<double> theta = {0.0, 0.0};
  const std::vector<double> nan = {0.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(opt.step(theta, nan), TrainingError);
  const std::vector<double> short_g = {1.0};
  EXPECT_THROW(opt.step(theta, short_g), ArgumentError);
}

LabeledSet separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> side(0.5, 1.0), other(-1.0, 1.0);
  LabeledSet s;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    s.x.push_back({y ? side(rng) : -side(rng), other(rng)});
    s.y.push_back(y);
  }
  return s;
}

TrainConfig quick_config() {
  TrainConfig c;
  c.epochs = 30;
  c.batch_size = 8;
  c.lr = 0.05;
  c.loss_kind = LossKind::kBce;
  c.seed = 7;
  c.threads = 1;
  return c;
}

TEST(Train, LearnsSeparableToySet) {
  const QnnModel model(toy(2, 2, 1));
  const auto train_set = separable(64, 1);
  const auto test_set = separable(32, 2);
  const auto report = train(model, train_set, test_set, quick_config(),
                            init_parameters(model.config()));
  ASSERT_EQ(report.epochs.size(), 30u);
  EXPECT_EQ(report.epochs.back().train_acc, 1.0);
  EXPECT_LT(report.epochs.back().train_loss, report.epochs.front().train_loss);
  EXPECT_GE(report.best_test_acc, report.epochs.back().test_acc);
  EXPECT_EQ(report.epochs[report.best_epoch - 1].test_acc, report.best_test_acc);
}

TEST(Train, DeterministicAcrossRunsAndThreads) {
  const QnnModel model(toy(2, 2, 1));
  const auto train_set = separable(40, 3);
  const auto test_set = separable(10, 4);
  auto cfg = quick_config();
  cfg.epochs = 4;
  for (auto method : {GradientMethod::kAdjoint, GradientMethod::kParameterShift}) {
    cfg.gradient_method = method;
    cfg.threads = 1;
    const auto a = train(model, train_set, test_set, cfg, init_parameters(model.config()));
    const auto b = train(model, train_set, test_set, cfg, init_parameters(model.config()));
    cfg.threads = 3;
    const auto c = train(model, train_set, test_set, cfg, init_parameters(model.config()));
    EXPECT_EQ(a.final_theta, b.final_theta);
    EXPECT_EQ(a.final_theta, c.final_theta);
    for (std::size_t e = 0; e < a.epochs.size(); ++e) {
      EXPECT_EQ(a.epochs[e].train_loss, b.epochs[e].train_loss);
      EXPECT_EQ(a.epochs[e].train_loss, c.epochs[e].train_loss);
    }
  }
}

TEST(Train, ZeroLearningRateIsNoOp) {
  const QnnModel model(toy(2, 2, 1));
  auto cfg = quick_config();
  cfg.epochs = 3;
  cfg.lr = 0.0;
  const auto theta = init_parameters(model.config());
  const auto r = train(model, separable(16, 5), separable(8, 6), cfg, theta);
  EXPECT_EQ(r.final_theta, theta);
  EXPECT_EQ(r.epochs[0].train_loss, r.epochs[2].train_loss);
}

TEST(Train, ConfigErrors) {
  const QnnModel model(toy(2, 2, 1));
  auto cfg = quick_config();
  const auto theta = init_parameters(model.config());
  EXPECT_THROW(train(model, LabeledSet{}, separable(4, 1), cfg, theta), ConfigError);
  EXPECT_THROW(train(model, separable(4, 1), LabeledSet{}, cfg, theta), ConfigError);
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = quick_config();
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = quick_config();
  const std::vector<double> wrong(3, 0.0);
  EXPECT_THROW(train(model, separable(4, 1), separable(4, 2), cfg, wrong), ArgumentError);
}

TEST(Train, BatchGradientIsMeanOfSamples) {
  std::mt19937_64 rng(8);
  const QnnModel model(toy(3, 3, 1));
  LabeledSet data;
  for (int i = 0; i < 7; ++i) {
    data.x.push_back(random_vector(3, -1, 1, rng));
    data.y.push_back(i % 3);
  }
  const auto theta = random_vector(model.num_params(), -2, 2, rng);
  TrainConfig cfg;
  cfg.threads = 2;
  const std::vector<std::size_t> batch = {6, 0, 3, 4};
  const auto g = batch_gradient(model, data, batch, theta, cfg);
  std::vector<double> mean(theta.size(), 0.0);
  double mean_loss = 0;
  for (std::size_t i : batch) {
    const auto s = grad_adjoint(model, data.x[i], data.y[i], theta, LossKind::kCce);
    mean_loss += s.loss / 4;
    for (std::size_t p = 0; p < mean.size(); ++p) mean[p] += s.grad[p] / 4;
  }
  EXPECT_NEAR(g.loss, mean_loss, 1e-12);
  for (std::size_t p = 0; p < mean.size(); ++p) EXPECT_NEAR(g.grad[p], mean[p], 1e-12);
  EXPECT_THROW(batch_gradient(model, data, {}, theta, cfg), ArgumentError);
}

TEST(Train, PredictionsAgreeWithForward) {
  std::mt19937_64 rng(9);
  const QnnModel model(toy(3, 3, 1));
  const auto theta = random_vector(model.num_params(), -2, 2, rng);
  LabeledSet data;
  for (int i = 0; i < 12; ++i) {
    data.x.push_back(random_vector(3, -1, 1, rng));
    data.y.push_back(i % 3);
  }
  const auto pred = predict_all(model, data, theta, 3);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(pred[i], argmax(model.forward(data.x[i], theta)));
    hits += pred[i] == data.y[i];
  }
  EXPECT_DOUBLE_EQ(accuracy(model, data, theta, 1), double(hits) / 12.0);
}

}  // namespace
}  // namespace pqdvqc
