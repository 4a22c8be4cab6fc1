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
#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels.hpp"
#include "pqdvqc/error.hpp"
#include "pqdvqc/qsim.hpp"

namespace pqdvqc::qsim {
namespace {

constexpr int kSpectatorBits = 3;

int bit_count(std::uint64_t m) { return __builtin_popcountll(m); }

std::uint64_t op_mask(const GateOp& g) {
  std::uint64_t m = std::uint64_t{1} << g.target;
  if (g.control >= 0) m |= std::uint64_t{1} << g.control;
  return m;
}

// Offset of every index over `bits` (listed low to high in buffer order).
std::vector<std::size_t> offsets_over(const std::vector<int>& bits) {
  std::vector<std::size_t> out(std::size_t{1} << bits.size(), 0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    std::size_t off = 0;
    for (std::size_t b = 0; b < bits.size(); ++b) {
      if ((j >> b) & 1u) off |= std::size_t{1} << bits[b];
    }
    out[j] = off;
  }
  return out;
}

BlockPlan::Group make_group(int n_qubits, int local_bits,
                            std::span<const GateOp> ops, std::size_t begin,
                            std::size_t end, std::uint64_t touched) {
  BlockPlan::Group g;
  g.begin = begin;
  g.end = end;

  std::vector<int> free_bits;
  std::vector<int> touched_bits;
  for (int q = 0; q < n_qubits; ++q) {
    ((touched >> q) & 1u ? touched_bits : free_bits).push_back(q);
  }
  // Buffer bits: three untouched qubits, the touched ones, then more
  // untouched qubits up to local_bits. The rest index the slices.
  std::vector<int> local(free_bits.begin(), free_bits.begin() + kSpectatorBits);
  local.insert(local.end(), touched_bits.begin(), touched_bits.end());
  std::size_t next_free = kSpectatorBits;
  while (static_cast<int>(local.size()) < local_bits) local.push_back(free_bits[next_free++]);
  const std::vector<int> outer(free_bits.begin() + static_cast<long>(next_free),
                               free_bits.end());

  std::vector<int> position(n_qubits, -1);
  for (std::size_t b = 0; b < local.size(); ++b) position[local[b]] = static_cast<int>(b);
  for (std::size_t i = begin; i < end; ++i) {
    GateOp op = ops[i];
    op.target = position[op.target];
    if (op.control >= 0) op.control = position[op.control];
    g.local.push_back(op);
  }
  g.offsets = offsets_over(local);
  g.bases = offsets_over(outer);
  return g;
}

double angle_of(const GateOp& g, std::span<const double> theta) {
  return g.trainable() ? theta[g.param_id] : g.theta;
}

void apply_local(double* a, std::size_t dim, const GateOp& g, double angle) {
  if (g.kind == GateKind::kH) {
    kernels::hadamard(a, dim, g.target);
    return;
  }
  const int control = g.kind == GateKind::kCRy ? g.control : -1;
  kernels::rotate(a, dim, g.target, control, std::cos(angle / 2.0),
                  std::sin(angle / 2.0));
}

// Rolls one op back on phi and lam, returning its gradient contribution.
double undo_local(double* phi, double* lam, std::size_t dim, const GateOp& g,
                  double angle) {
  if (g.kind == GateKind::kH) {
    kernels::hadamard(phi, dim, g.target);
    kernels::hadamard(lam, dim, g.target);
    return 0.0;
  }
  const int control = g.kind == GateKind::kCRy ? g.control : -1;
  return kernels::adjoint_rotate(phi, lam, dim, g.target, control,
                                 std::cos(angle / 2.0), std::sin(angle / 2.0));
}

void check_theta(const BlockPlan& plan, std::span<const double> theta) {
  for (const auto& g : plan.ops) {
    if (g.trainable() && static_cast<std::size_t>(g.param_id) >= theta.size()) {
      throw ArgumentError("parameter " + std::to_string(g.param_id) +
                          " missing from a vector of " + std::to_string(theta.size()));
    }
  }
}

void check_state(const BlockPlan& plan, const RealStateVector& s) {
  if (s.num_qubits() != plan.n_qubits) {
    throw ArgumentError("plan built for " + std::to_string(plan.n_qubits) +
                        " qubits, state has " + std::to_string(s.num_qubits()));
  }
}

}  // namespace

BlockPlan make_block_plan(int n_qubits, std::span<const GateOp> ops,
                          int local_bits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw CapacityError("qubit count " + std::to_string(n_qubits) + " outside 1.." +
                        std::to_string(kMaxQubits));
  }
  if (local_bits < kSpectatorBits + 2 || local_bits > 20) {
    throw ArgumentError("local_bits must lie in 5..20");
  }
  for (const auto& g : ops) check_gate(g, n_qubits);

  BlockPlan plan;
  plan.n_qubits = n_qubits;
  plan.local_bits = local_bits;
  plan.ops.assign(ops.begin(), ops.end());
  plan.direct = n_qubits <= local_bits;
  if (plan.direct) return plan;

  // Greedy list scheduling: a gate may move ahead of earlier gates that share
  // none of its qubits. Each group keeps pulling in ready gates while its
  // qubit set fits in the buffer.
  const int capacity = local_bits - kSpectatorBits;
  std::vector<GateOp> order;
  order.reserve(ops.size());
  std::vector<bool> done(ops.size(), false);
  std::size_t remaining = ops.size();
  std::size_t first_open = 0;
  while (remaining > 0) {
    std::uint64_t touched = 0;
    const std::size_t begin = order.size();
    std::vector<GateOp> group_ops;
    bool progress = true;
    while (progress) {
      progress = false;
      std::uint64_t blocked = 0;  // qubits of earlier gates still pending
      for (std::size_t i = first_open; i < ops.size(); ++i) {
        if (done[i]) continue;
        const std::uint64_t m = op_mask(ops[i]);
        const bool ready = (m & blocked) == 0;
        if (ready && bit_count(touched | m) <= capacity) {
          touched |= m;
          done[i] = true;
          --remaining;
          order.push_back(ops[i]);
          progress = true;
        } else {
          blocked |= m;
        }
      }
      while (first_open < ops.size() && done[first_open]) ++first_open;
    }
    plan.groups.push_back(
        make_group(n_qubits, local_bits, order, begin, order.size(), touched));
  }
  plan.ops = std::move(order);
  return plan;
}

void run_plan(const BlockPlan& plan, RealStateVector& state,
              std::span<const double> theta) {
  check_state(plan, state);
  check_theta(plan, theta);
  double* a = state.amplitudes().data();
  if (plan.direct) {
    for (const auto& g : plan.ops) apply_local(a, state.dim(), g, angle_of(g, theta));
    return;
  }
  const std::size_t n = std::size_t{1} << plan.local_bits;
  std::vector<double> buf(n);
  for (const auto& grp : plan.groups) {
    std::vector<double> angles;
    for (const auto& g : grp.local) angles.push_back(angle_of(g, theta));
    for (std::size_t base : grp.bases) {
      kernels::gather(a, base, grp.offsets.data(), n, buf.data());
      for (std::size_t k = 0; k < grp.local.size(); ++k) {
        apply_local(buf.data(), n, grp.local[k], angles[k]);
      }
      kernels::scatter(buf.data(), base, grp.offsets.data(), n, a);
    }
  }
}

void adjoint_sweep(const BlockPlan& plan, RealStateVector& phi,
                   RealStateVector& lam, std::span<const double> theta,
                   std::span<double> grad) {
  check_state(plan, phi);
  check_state(plan, lam);
  check_theta(plan, theta);
  for (const auto& g : plan.ops) {
    if (g.trainable() && static_cast<std::size_t>(g.param_id) >= grad.size()) {
      throw ArgumentError("gradient vector too short");
    }
  }
  double* p = phi.amplitudes().data();
  double* l = lam.amplitudes().data();
  if (plan.direct) {
    for (std::size_t i = plan.ops.size(); i-- > 0;) {
      const auto& g = plan.ops[i];
      const double d = undo_local(p, l, phi.dim(), g, angle_of(g, theta));
      if (g.trainable()) grad[g.param_id] += d;
    }
    return;
  }
  const std::size_t n = std::size_t{1} << plan.local_bits;
  std::vector<double> bp(n);
  std::vector<double> bl(n);
  for (std::size_t gi = plan.groups.size(); gi-- > 0;) {
    const auto& grp = plan.groups[gi];
    std::vector<double> angles;
    for (const auto& g : grp.local) angles.push_back(angle_of(g, theta));
    std::vector<double> acc(grp.local.size(), 0.0);
    for (std::size_t base : grp.bases) {
      kernels::gather(p, base, grp.offsets.data(), n, bp.data());
      kernels::gather(l, base, grp.offsets.data(), n, bl.data());
      for (std::size_t k = grp.local.size(); k-- > 0;) {
        acc[k] += undo_local(bp.data(), bl.data(), n, grp.local[k], angles[k]);
      }
      kernels::scatter(bp.data(), base, grp.offsets.data(), n, p);
      kernels::scatter(bl.data(), base, grp.offsets.data(), n, l);
    }
    for (std::size_t k = 0; k < grp.local.size(); ++k) {
      if (grp.local[k].trainable()) grad[grp.local[k].param_id] += acc[k];
    }
  }
}

}  // namespace pqdvqc::qsim
