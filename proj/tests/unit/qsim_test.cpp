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
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "pqdvqc/error.hpp"
#include "pqdvqc/qsim.hpp"

namespace pqdvqc::qsim {
namespace {

using ::pqdvqc::testing::dense_expect_z;
using ::pqdvqc::testing::dense_run;

Circuit random_circuit(int n, int n_gates, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2), qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  Circuit c;
  c.n_qubits = n;
  for (int i = 0; i < n_gates; ++i) {
    const int k = n == 1 ? kind(rng) % 2 : kind(rng);
    const int t = qubit(rng);
    if (k == 0) {
      c.ops.push_back(GateOp::h(t));
    } else if (k == 1) {
      c.ops.push_back(GateOp::ry(t, angle(rng)));
    } else {
      int ctl = qubit(rng);
      while (ctl == t) ctl = qubit(rng);
      c.ops.push_back(GateOp::cry(ctl, t, angle(rng)));
    }
  }
  return c;
}

double max_diff(const StateVector& s, const std::vector<std::complex<double>>& ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) worst = std::max(worst, std::abs(s[i] - ref[i]));
  return worst;
}

TEST(StateVector, ZeroState) {
  auto s = StateVector::zero(1);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s[0], std::complex<double>(1.0));
  EXPECT_EQ(s[1], std::complex<double>(0.0));
  auto t = StateVector::zero(3);
  EXPECT_EQ(t.dim(), 8u);
  EXPECT_EQ(t[0], std::complex<double>(1.0));
  for (std::size_t i = 1; i < 8; ++i) EXPECT_EQ(t[i], std::complex<double>(0.0));
}

TEST(StateVector, CapacityBound) {
  EXPECT_THROW(StateVector::zero(25), CapacityError);
  EXPECT_THROW(StateVector::zero(0), CapacityError);
}

TEST(Gates, RyZeroIsIdentity) {
  std::mt19937_64 rng(3);
  const Circuit c = random_circuit(3, 8, rng);
  auto s = run_circuit(c, {});
  const auto before = s;
  apply_gate(s, GateOp::ry(1, 0.0));
  for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(s[i], before[i]);
}

TEST(Gates, RyPiFlipsZeroToOne) {
  auto s = StateVector::zero(1);
  apply_gate(s, GateOp::ry(0, std::numbers::pi));
  EXPECT_NEAR(std::abs(s[0]), 0.0, 1e-15);
  EXPECT_NEAR(s[1].real(), 1.0, 1e-15);
}

TEST(Gates, ControlInZeroLeavesTarget) {
  auto s = StateVector::zero(2);
  apply_gate(s, GateOp::ry(1, 0.7));
  const auto before = s;
  apply_gate(s, GateOp::cry(0, 1, 1.3));
  for (std::size_t i = 0; i < s.dim(); ++i) EXPECT_EQ(s[i], before[i]);
}

TEST(Gates, LittleEndianIndexing) {
  auto s = StateVector::zero(3);
  apply_gate(s, GateOp::ry(1, std::numbers::pi));
  EXPECT_NEAR(s[2].real(), 1.0, 1e-15);
  apply_gate(s, GateOp::cry(1, 0, std::numbers::pi));
  EXPECT_NEAR(s[3].real(), 1.0, 1e-15);
}

TEST(Gates, BadIndicesThrow) {
  auto s = StateVector::zero(2);
  EXPECT_THROW(apply_gate(s, GateOp::ry(2, 0.1)), ArgumentError);
  EXPECT_THROW(apply_gate(s, GateOp::cry(0, 0, 0.1)), ArgumentError);
  EXPECT_THROW(apply_gate(s, GateOp::cry(-1, 1, 0.1)), ArgumentError);
  EXPECT_THROW(expect_z(s, 2), ArgumentError);
}

TEST(Gates, DenseOracleThreeQubits) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const Circuit c = random_circuit(3, 10, rng);
    const auto s = run_circuit(c, {});
    EXPECT_LT(max_diff(s, dense_run(3, c.ops, {})), 1e-12);
  }
}

TEST(Gates, InverseRestoresState) {
  std::mt19937_64 rng(5);
  const Circuit c = random_circuit(4, 12, rng);
  auto s = run_circuit(c, {});
  const auto before = s;
  apply_gate(s, GateOp::ry(2, 0.83));
  apply_gate(s, GateOp::ry(2, -0.83));
  EXPECT_LT(max_diff(s, {before.amplitudes().begin(), before.amplitudes().end()}), 1e-12);
  apply_gate(s, GateOp::cry(3, 0, -1.7));
  apply_gate(s, GateOp::cry(3, 0, 1.7));
  EXPECT_LT(max_diff(s, {before.amplitudes().begin(), before.amplitudes().end()}), 1e-12);
}

TEST(Gates, DisjointGatesCommute) {
  std::mt19937_64 rng(8);
  const Circuit prefix = random_circuit(4, 6, rng);
  auto a = run_circuit(prefix, {});
  auto b = a;
  apply_gate(a, GateOp::ry(0, 0.4));
  apply_gate(a, GateOp::cry(2, 3, 1.1));
  apply_gate(b, GateOp::cry(2, 3, 1.1));
  apply_gate(b, GateOp::ry(0, 0.4));
  EXPECT_LT(max_diff(a, {b.amplitudes().begin(), b.amplitudes().end()}), 1e-12);
}

TEST(Expectation, BasicValues) {
  auto s = StateVector::zero(1);
  EXPECT_DOUBLE_EQ(expect_z(s, 0), 1.0);
  apply_gate(s, GateOp::h(0));
  EXPECT_NEAR(expect_z(s, 0), 0.0, 1e-12);
  auto r = StateVector::zero(1);
  apply_gate(r, GateOp::ry(0, std::numbers::pi / 3.0));
  EXPECT_NEAR(expect_z(r, 0), 0.5, 1e-12);
}

TEST(Expectation, ShotSamplingConverges) {
  auto s = StateVector::zero(1);
  apply_gate(s, GateOp::ry(0, std::numbers::pi / 3.0));
  std::mt19937_64 rng(1);
  EXPECT_NEAR(sample_expect_z(s, 0, 200000, rng), 0.5, 0.01);
  EXPECT_THROW(sample_expect_z(s, 0, 0, rng), ArgumentError);
}

TEST(Circuit, EmptyAndFixedOnly) {
  Circuit c;
  c.n_qubits = 2;
  const auto s = run_circuit(c, {});
  EXPECT_EQ(s[0], std::complex<double>(1.0));
  c.ops.push_back(GateOp::ry(0, 0.3));
  const std::vector<double> unused = {5.0, 6.0};
  const auto a = run_circuit(c, {});
  const auto b = run_circuit(c, unused);
  for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Circuit, MissingParameterThrows) {
  Circuit c;
  c.n_qubits = 2;
  c.ops.push_back(GateOp::ry_param(0, 0));
  c.ops.push_back(GateOp::cry_param(0, 1, 1));
  EXPECT_EQ(c.num_params(), 2u);
  const std::vector<double> one = {0.1};
  EXPECT_THROW(run_circuit(c, one), ArgumentError);
}

TEST(Circuit, DumpListsOps) {
  Circuit c;
  c.n_qubits = 2;
  c.ops = {GateOp::h(0), GateOp::cry_param(0, 1, 0), GateOp::ry(1, 0.5)};
  const auto j = dump_circuit(c);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["kind"], "H");
  EXPECT_EQ(j[1]["control"], 0);
  EXPECT_EQ(j[1]["param_id"], 0);
  EXPECT_DOUBLE_EQ(j[2]["theta"].get<double>(), 0.5);
}

// Trainable ring-and-fan circuit on n qubits, wide enough to force blocking.
std::vector<GateOp> layered_ops(int n, int layers) {
  std::vector<GateOp> ops;
  int p = 0;
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < n; ++q) ops.push_back(GateOp::ry_param(q, p++));
    for (int q = 0; q < n; ++q) ops.push_back(GateOp::cry_param(q, (q + 1) % n, p++));
    for (int q = 0; q < n - 3; ++q) ops.push_back(GateOp::cry_param(q, n - 1 - q % 3, p++));
  }
  return ops;
}

class BlockPlanTest : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(BlockPlanTest, MatchesComplexSimulator) {
  const auto [n, local_bits] = GetParam();
  const auto ops = layered_ops(n, 2);
  Circuit c;
  c.n_qubits = n;
  for (int q = 0; q < n; ++q) c.ops.push_back(GateOp::h(q));
  c.ops.insert(c.ops.end(), ops.begin(), ops.end());
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  std::vector<double> theta(c.num_params());
  for (double& t : theta) t = angle(rng);

  const auto ref = run_circuit(c, theta);
  auto state = RealStateVector::zero(n);
  for (int q = 0; q < n; ++q) apply_gate(state, GateOp::h(q));
  const BlockPlan plan = make_block_plan(n, ops, local_bits);
  EXPECT_EQ(plan.direct, n <= local_bits);
  run_plan(plan, state, theta);
  double worst = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    worst = std::max(worst, std::abs(state[i] - ref[i].real()));
    EXPECT_EQ(ref[i].imag(), 0.0);
  }
  EXPECT_LT(worst, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Sizes, BlockPlanTest,
                         ::testing::Values(std::make_pair(6, 11), std::make_pair(9, 6),
                                           std::make_pair(12, 8), std::make_pair(13, 11),
                                           std::make_pair(14, 7)));

TEST(BlockPlan, RejectsBadConfiguration) {
  const auto ops = layered_ops(6, 1);
  EXPECT_THROW(make_block_plan(6, ops, 4), ArgumentError);
  EXPECT_THROW(make_block_plan(6, ops, 21), ArgumentError);
  std::vector<GateOp> bad = {GateOp::ry(7, 0.1)};
  EXPECT_THROW(make_block_plan(6, bad), ArgumentError);
}

TEST(Properties, NormPreservedAfterEveryGate) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 6;
    const Circuit c = random_circuit(n, 20, rng);
    auto s = StateVector::zero(n);
    for (const auto& g : c.ops) {
      apply_gate(s, g);
      ASSERT_NEAR(s.norm_sq(), 1.0, 1e-10);
      for (int q = 0; q < n; ++q) {
        const double z = expect_z(s, q);
        ASSERT_LE(std::abs(z), 1.0 + 1e-12);
      }
    }
  }
}

TEST(Properties, RandomCircuitsMatchDenseOracle) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const Circuit c = random_circuit(n, 4 + trial % 12, rng);
    const auto s = run_circuit(c, {});
    const auto ref = dense_run(n, c.ops, {});
    ASSERT_LT(max_diff(s, ref), 1e-12) << "trial " << trial;
    for (int q = 0; q < n; ++q) EXPECT_NEAR(expect_z(s, q), dense_expect_z(ref, q), 1e-12);
  }
}

}  // namespace
}  // namespace pqdvqc::qsim
