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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"
#include "pqdvqc/error.hpp"

namespace pqdvqc::qsim {

inline constexpr int kMaxQubits = 24;

// Basis index convention: qubit q is bit q of the index (qubit 0 is the
// least-significant bit).
template <typename Amp>
class BasicStateVector {
 public:
  using value_type = Amp;

  static BasicStateVector zero(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
      throw CapacityError("qubit count " + std::to_string(n_qubits) +
                          " outside 1.." + std::to_string(kMaxQubits));
    }
    BasicStateVector s;
    s.n_qubits_ = n_qubits;
    s.amps_.assign(std::size_t{1} << n_qubits, Amp(0));
    s.amps_[0] = Amp(1);
    return s;
  }

  int num_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<Amp> amplitudes() { return amps_; }
  std::span<const Amp> amplitudes() const { return amps_; }
  Amp& operator[](std::size_t i) { return amps_[i]; }
  const Amp& operator[](std::size_t i) const { return amps_[i]; }

  double norm_sq() const {
    double acc = 0.0;
    for (const Amp& a : amps_) acc += std::norm(a);
    return acc;
  }

 private:
  int n_qubits_ = 0;
  std::vector<Amp> amps_;
};

using StateVector = BasicStateVector<std::complex<double>>;
// H, Ry and CRy are real matrices, so a register started in |0...0> stays
// real under them; this variant halves the arithmetic of StateVector.
using RealStateVector = BasicStateVector<double>;

enum class GateKind { kH, kRy, kCRy };

const char* gate_name(GateKind kind);

struct GateOp {
  GateKind kind = GateKind::kH;
  int target = 0;
  int control = -1;    // CRy only
  double theta = 0.0;  // fixed angle when param_id < 0
  int param_id = -1;   // index into the parameter vector, -1 if fixed

  static GateOp h(int target) { return {GateKind::kH, target, -1, 0.0, -1}; }
  static GateOp ry(int target, double theta) {
    return {GateKind::kRy, target, -1, theta, -1};
  }
  static GateOp ry_param(int target, int param_id) {
    return {GateKind::kRy, target, -1, 0.0, param_id};
  }
  static GateOp cry(int control, int target, double theta) {
    return {GateKind::kCRy, target, control, theta, -1};
  }
  static GateOp cry_param(int control, int target, int param_id) {
    return {GateKind::kCRy, target, control, 0.0, param_id};
  }

  bool trainable() const { return param_id >= 0; }
  bool operator==(const GateOp&) const = default;
};

// Throws ArgumentError unless indices are in range and control != target.
void check_gate(const GateOp& g, int n_qubits);

namespace detail {

inline std::size_t insert_zero_bit(std::size_t i, int pos) {
  const std::size_t low = i & ((std::size_t{1} << pos) - 1);
  return ((i - low) << 1) | low;
}

// Calls fn(i0, i1) for every amplitude pair that differs only in bit
// `target`, restricted to indices whose bit `control` is set when control >= 0.
template <typename Fn>
inline void for_each_pair(std::size_t dim, int target, int control, Fn&& fn) {
  const std::size_t tmask = std::size_t{1} << target;
  if (control < 0) {
    for (std::size_t base = 0; base < dim; base += 2 * tmask) {
      for (std::size_t i0 = base; i0 < base + tmask; ++i0) fn(i0, i0 | tmask);
    }
    return;
  }
  const std::size_t cmask = std::size_t{1} << control;
  const int lo = std::min(target, control);
  const int hi = std::max(target, control);
  const std::size_t quarter = dim >> 2;
  for (std::size_t k = 0; k < quarter; ++k) {
    const std::size_t i0 = insert_zero_bit(insert_zero_bit(k, lo), hi) | cmask;
    fn(i0, i0 | tmask);
  }
}

}  // namespace detail

template <typename Amp>
void apply_h(BasicStateVector<Amp>& s, int target) {
  const double r = std::numbers::sqrt2 / 2.0;
  auto a = s.amplitudes();
  detail::for_each_pair(s.dim(), target, -1, [&](std::size_t i0, std::size_t i1) {
    const Amp x = a[i0];
    const Amp y = a[i1];
    a[i0] = r * (x + y);
    a[i1] = r * (x - y);
  });
}

// Ry(theta) = [[cos t/2, -sin t/2], [sin t/2, cos t/2]] on `target`, applied
// only where `control` is 1 when control >= 0.
template <typename Amp>
void apply_rotation(BasicStateVector<Amp>& s, int target, int control,
                    double theta) {
  const double c = std::cos(theta / 2.0);
  const double sn = std::sin(theta / 2.0);
  auto a = s.amplitudes();
  detail::for_each_pair(s.dim(), target, control,
                        [&](std::size_t i0, std::size_t i1) {
                          const Amp x = a[i0];
                          const Amp y = a[i1];
                          a[i0] = c * x - sn * y;
                          a[i1] = sn * x + c * y;
                        });
}

template <typename Amp>
void apply_gate(BasicStateVector<Amp>& s, const GateOp& g, double theta) {
  check_gate(g, s.num_qubits());
  switch (g.kind) {
    case GateKind::kH:
      apply_h(s, g.target);
      break;
    case GateKind::kRy:
      apply_rotation(s, g.target, -1, theta);
      break;
    case GateKind::kCRy:
      apply_rotation(s, g.target, g.control, theta);
      break;
  }
}

// Uses the gate's fixed angle.
template <typename Amp>
void apply_gate(BasicStateVector<Amp>& s, const GateOp& g) {
  apply_gate(s, g, g.theta);
}

template <typename Amp>
double expect_z(const BasicStateVector<Amp>& s, int q) {
  if (q < 0 || q >= s.num_qubits()) {
    throw ArgumentError("qubit " + std::to_string(q) + " out of range");
  }
  const std::size_t mask = std::size_t{1} << q;
  auto a = s.amplitudes();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = std::norm(a[i]);
    acc += (i & mask) ? -p : p;
  }
  return acc;
}

// Estimates <Z_q> from `shots` computational-basis samples.
template <typename Amp, typename Urbg>
double sample_expect_z(const BasicStateVector<Amp>& s, int q, std::size_t shots,
                       Urbg& rng) {
  if (shots == 0) throw ArgumentError("shot count must be positive");
  const double p0 = 0.5 * (1.0 + expect_z(s, q));
  std::binomial_distribution<std::size_t> draw(shots, std::clamp(p0, 0.0, 1.0));
  const double zeros = static_cast<double>(draw(rng));
  return (2.0 * zeros - static_cast<double>(shots)) / static_cast<double>(shots);
}

struct Circuit {
  int n_qubits = 0;
  std::vector<GateOp> ops;

  std::size_t num_params() const;
  std::size_t num_trainable_gates() const;
  // Gate index bound to each parameter id.
  std::vector<std::size_t> param_gate_index() const;
  // Gate ranges, unique and contiguous param ids.
  void validate() const;
};

// Cache-blocked execution of a gate sequence on a real state. Consecutive
// gates touching at most local_bits - 3 distinct qubits form a group; each
// group is applied to 2^local_bits-amplitude slices gathered into a local
// buffer whose three lowest bits are qubits the group does not touch.
struct BlockPlan {
  struct Group {
    std::size_t begin = 0;  // op range [begin, end)
    std::size_t end = 0;
    std::vector<GateOp> local;          // ops renumbered to buffer bits
    std::vector<std::size_t> offsets;   // buffer index -> state offset
    std::vector<std::size_t> bases;     // state offset of each slice
  };

  int n_qubits = 0;
  int local_bits = 0;
  bool direct = false;  // register small enough to run in place
  std::vector<GateOp> ops;
  std::vector<Group> groups;
};

inline constexpr int kDefaultLocalBits = 11;

BlockPlan make_block_plan(int n_qubits, std::span<const GateOp> ops,
                          int local_bits = kDefaultLocalBits);

// Applies the plan's ops in order; trainable ops read theta[param_id].
void run_plan(const BlockPlan& plan, RealStateVector& state,
              std::span<const double> theta);

// Reverse sweep for the adjoint method. On entry phi is the state after the
// ops and lam = M phi for a diagonal observable M. On exit both have been
// rolled back through every op and grad[param_id] holds
// d<phi|M|phi>/d theta for each trainable op.
void adjoint_sweep(const BlockPlan& plan, RealStateVector& phi,
                   RealStateVector& lam, std::span<const double> theta,
                   std::span<double> grad);

// Starts from |0...0> and applies every op; trainable ops read
// thetas[param_id].
StateVector run_circuit(const Circuit& c, std::span<const double> thetas);

nlohmann::json dump_circuit(const Circuit& c);

}  // namespace pqdvqc::qsim
