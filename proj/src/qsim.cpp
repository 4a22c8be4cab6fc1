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
#include "pqdvqc/qsim.hpp"

namespace pqdvqc::qsim {

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::kH:
      return "H";
    case GateKind::kRy:
      return "Ry";
    case GateKind::kCRy:
      return "CRy";
  }
  return "?";
}

void check_gate(const GateOp& g, int n_qubits) {
  if (g.target < 0 || g.target >= n_qubits) {
    throw ArgumentError(std::string(gate_name(g.kind)) + " target " +
                        std::to_string(g.target) + " out of range for " +
                        std::to_string(n_qubits) + " qubits");
  }
  if (g.kind == GateKind::kCRy) {
    if (g.control < 0 || g.control >= n_qubits) {
      throw ArgumentError("CRy control " + std::to_string(g.control) +
                          " out of range");
    }
    if (g.control == g.target) {
      throw ArgumentError("CRy control equals target");
    }
  }
  if (g.kind == GateKind::kH && g.param_id >= 0) {
    throw ArgumentError("H takes no parameter");
  }
}

std::size_t Circuit::num_params() const {
  std::size_t n = 0;
  for (const auto& g : ops) {
    if (g.trainable()) n = std::max(n, static_cast<std::size_t>(g.param_id) + 1);
  }
  return n;
}

std::size_t Circuit::num_trainable_gates() const {
  std::size_t n = 0;
  for (const auto& g : ops) n += g.trainable() ? 1 : 0;
  return n;
}

std::vector<std::size_t> Circuit::param_gate_index() const {
  std::vector<std::size_t> idx(num_params(), ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].trainable()) idx[ops[i].param_id] = i;
  }
  return idx;
}

void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw CapacityError("circuit width " + std::to_string(n_qubits) +
                        " outside 1.." + std::to_string(kMaxQubits));
  }
  std::vector<bool> seen(num_params(), false);
  for (const auto& g : ops) {
    check_gate(g, n_qubits);
    if (!g.trainable()) continue;
    if (seen[g.param_id]) {
      throw ArgumentError("parameter id " + std::to_string(g.param_id) +
                          " bound to more than one gate");
    }
    seen[g.param_id] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ArgumentError("parameter ids are not contiguous: " +
                          std::to_string(i) + " is unused");
    }
  }
}

StateVector run_circuit(const Circuit& c, std::span<const double> thetas) {
  c.validate();
  if (thetas.size() < c.num_params()) {
    throw ArgumentError("circuit needs " + std::to_string(c.num_params()) +
                        " parameters, got " + std::to_string(thetas.size()));
  }
  auto s = StateVector::zero(c.n_qubits);
  for (const auto& g : c.ops) {
    apply_gate(s, g, g.trainable() ? thetas[g.param_id] : g.theta);
  }
  return s;
}

nlohmann::json dump_circuit(const Circuit& c) {
  auto ops = nlohmann::json::array();
  for (const auto& g : c.ops) {
    nlohmann::json j{{"kind", gate_name(g.kind)}, {"target", g.target}};
    j["control"] = g.kind == GateKind::kCRy ? nlohmann::json(g.control)
                                            : nlohmann::json(nullptr);
    if (g.trainable()) {
      j["param_id"] = g.param_id;
    } else if (g.kind != GateKind::kH) {
      j["theta"] = g.theta;
    }
    ops.push_back(std::move(j));
  }
  return ops;
}

}  // namespace pqdvqc::qsim
