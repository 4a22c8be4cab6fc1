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
#include "pqdvqc/qnn.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pqdvqc/error.hpp"

namespace pqdvqc {
namespace {

constexpr double kMinMaxAbs = 1e-12;
constexpr double kInitHalfWidth = 0.1;

void check_domain(std::span<const double> x_std, const ModelConfig& config) {
  if (x_std.size() != static_cast<std::size_t>(config.n_data)) {
    throw ArgumentError("input has " + std::to_string(x_std.size()) +
                        " features, model expects " +
                        std::to_string(config.n_data));
  }
  for (double v : x_std) {
    if (!(std::abs(v) <= 1.0)) {
      throw ArgumentError("encoded value " + std::to_string(v) +
                          " outside the arcsin domain [-1, 1]");
    }
  }
}

}  // namespace

std::size_t ModelConfig::num_params() const {
  return static_cast<std::size_t>(n_layers) *
         static_cast<std::size_t>(3 * n_qubits() + n_data);
}

void ModelConfig::validate() const {
  if (n_data < 1) throw ConfigError("model needs at least one data qubit");
  if (n_ancilla < 1) throw ConfigError("model needs at least one ancilla");
  if (n_layers < 1) throw ConfigError("model needs at least one layer");
  if (n_qubits() > qsim::kMaxQubits) {
    throw CapacityError("model needs " + std::to_string(n_qubits()) +
                        " qubits, limit is " + std::to_string(qsim::kMaxQubits));
  }
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"n_data", c.n_data},
                     {"n_ancilla", c.n_ancilla},
                     {"n_layers", c.n_layers},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  j.at("n_data").get_to(c.n_data);
  j.at("n_ancilla").get_to(c.n_ancilla);
  j.at("n_layers").get_to(c.n_layers);
  j.at("seed").get_to(c.seed);
}

void to_json(nlohmann::json& j, const StandardizationStats& s) {
  j = nlohmann::json{{"mean", s.mean},
                     {"stddev", s.stddev},
                     {"max_abs", s.max_abs},
                     {"degenerate", s.degenerate}};
}

void from_json(const nlohmann::json& j, StandardizationStats& s) {
  j.at("mean").get_to(s.mean);
  j.at("stddev").get_to(s.stddev);
  j.at("max_abs").get_to(s.max_abs);
  j.at("degenerate").get_to(s.degenerate);
}

StandardizationStats fit_standardizer(std::span<const std::vector<double>> rows) {
  if (rows.size() < 2) {
    throw ConfigError("standardizer needs at least two training rows");
  }
  const std::size_t dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw ArgumentError("ragged feature rows");
  }
  const double n = static_cast<double>(rows.size());
  StandardizationStats s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);
  s.max_abs.assign(dim, kMinMaxAbs);
  s.degenerate.assign(dim, false);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < dim; ++i) s.mean[i] += r[i];
  }
  for (double& m : s.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < dim; ++i) {
      s.stddev[i] += (r[i] - s.mean[i]) * (r[i] - s.mean[i]);
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    s.stddev[i] = std::sqrt(s.stddev[i] / (n - 1.0));
    if (!(s.stddev[i] > 0.0) || !std::isfinite(s.stddev[i])) {
      s.stddev[i] = 1.0;
      s.degenerate[i] = true;
    }
  }
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < dim; ++i) {
      s.max_abs[i] =
          std::max(s.max_abs[i], std::abs((r[i] - s.mean[i]) / s.stddev[i]));
    }
  }
  return s;
}

std::vector<double> standardize(std::span<const double> x,
                                const StandardizationStats& stats) {
  if (x.size() != stats.dim()) {
    throw ArgumentError("feature vector has " + std::to_string(x.size()) +
                        " entries, standardizer was fitted on " +
                        std::to_string(stats.dim()));
  }
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - stats.mean[i]) / stats.stddev[i];
    out[i] = std::clamp(z / stats.max_abs[i], -1.0, 1.0);
  }
  return out;
}

std::vector<LayerSlots> layer_map(const ModelConfig& config) {
  const std::size_t n = static_cast<std::size_t>(config.n_qubits());
  const std::size_t per_layer = 3 * n + static_cast<std::size_t>(config.n_data);
  std::vector<LayerSlots> slots;
  for (int l = 0; l < config.n_layers; ++l) {
    const std::size_t base = per_layer * static_cast<std::size_t>(l);
    slots.push_back({base, base + n, base + 2 * n, base + 3 * n});
  }
  return slots;
}

nlohmann::json layer_map_json(const ModelConfig& config) {
  const int n = config.n_qubits();
  auto out = nlohmann::json::array();
  int layer = 0;
  for (const auto& s : layer_map(config)) {
    out.push_back({{"layer", layer++},
                   {"oeo_rotation", {s.oeo_rotation, n}},
                   {"oeo_ring", {s.oeo_ring, n}},
                   {"dea_rotation", {s.dea_rotation, n}},
                   {"dea_entangle", {s.dea_entangle, config.n_data}}});
  }
  return out;
}

qsim::Circuit build_encoding(std::span<const double> x_std,
                             const ModelConfig& config) {
  config.validate();
  check_domain(x_std, config);
  qsim::Circuit c{config.n_qubits(), {}};
  for (int i = 0; i < config.n_data; ++i) {
    c.ops.push_back(qsim::GateOp::h(i));
    c.ops.push_back(qsim::GateOp::ry(i, std::asin(x_std[i])));
  }
  return c;
}

qsim::Circuit build_variational(const ModelConfig& config) {
  config.validate();
  const int n = config.n_qubits();
  qsim::Circuit c{n, {}};
  for (const auto& slot : layer_map(config)) {
    for (int q = 0; q < n; ++q) {
      c.ops.push_back(qsim::GateOp::ry_param(q, static_cast<int>(slot.oeo_rotation) + q));
    }
    for (int q = 0; q < n; ++q) {
      const int next = (q + 1) % n;
      c.ops.push_back(
          qsim::GateOp::cry_param(q, next, static_cast<int>(slot.oeo_ring) + q));
    }
    for (int q = 0; q < n; ++q) {
      c.ops.push_back(qsim::GateOp::ry_param(q, static_cast<int>(slot.dea_rotation) + q));
    }
    for (int i = 0; i < config.n_data; ++i) {
      c.ops.push_back(qsim::GateOp::cry_param(
          i, config.ancilla_qubit(i % config.n_ancilla),
          static_cast<int>(slot.dea_entangle) + i));
    }
  }
  c.validate();
  return c;
}

std::vector<double> init_parameters(const ModelConfig& config) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> u(-kInitHalfWidth, kInitHalfWidth);
  std::vector<double> theta(config.num_params());
  for (double& t : theta) t = u(rng);
  return theta;
}

qsim::RealStateVector encoded_state(std::span<const double> x_std,
                                    const ModelConfig& config) {
  config.validate();
  check_domain(x_std, config);
  auto s = qsim::RealStateVector::zero(config.n_qubits());
  auto a = s.amplitudes();
  // Doubling construction: after qubit q, a[0 .. 2^(q+1)) holds the product
  // state of qubits 0..q.
  std::size_t len = 1;
  a[0] = 1.0;
  const double r = std::sqrt(0.5);
  for (int q = 0; q < config.n_data; ++q) {
    const double half = std::asin(x_std[q]) / 2.0;
    const double c = std::cos(half);
    const double sn = std::sin(half);
    const double v0 = r * (c - sn);
    const double v1 = r * (sn + c);
    for (std::size_t i = 0; i < len; ++i) {
      a[len + i] = a[i] * v1;
      a[i] *= v0;
    }
    len <<= 1;
  }
  // Ancillas stay |0>: upper amplitudes remain zero.
  return s;
}

QnnModel::QnnModel(ModelConfig config)
    : config_(config),
      variational_(build_variational(config)),
      plan_(qsim::make_block_plan(config.n_qubits(), variational_.ops)) {}

void QnnModel::check_inputs(std::span<const double> x_std,
                            std::span<const double> theta) const {
  if (theta.size() != num_params()) {
    throw ArgumentError("parameter vector has " + std::to_string(theta.size()) +
                        " entries, model has " + std::to_string(num_params()));
  }
  check_domain(x_std, config_);
}

qsim::RealStateVector QnnModel::final_state(std::span<const double> x_std,
                                            std::span<const double> theta) const {
  check_inputs(x_std, theta);
  auto s = encoded_state(x_std, config_);
  qsim::run_plan(plan_, s, theta);
  return s;
}

std::vector<double> QnnModel::readout(const qsim::RealStateVector& s) const {
  // Ancillas are the top bits, so i >> n_data is the ancilla pattern.
  const std::size_t patterns = std::size_t{1} << config_.n_ancilla;
  std::vector<double> mass(patterns, 0.0);
  const auto a = s.amplitudes();
  const std::size_t block = std::size_t{1} << config_.n_data;
  for (std::size_t p = 0; p < patterns; ++p) {
    double acc = 0.0;
    for (std::size_t i = p * block; i < (p + 1) * block; ++i) acc += a[i] * a[i];
    mass[p] = acc;
  }
  std::vector<double> e(config_.n_ancilla, 0.0);
  for (std::size_t p = 0; p < patterns; ++p) {
    for (int k = 0; k < config_.n_ancilla; ++k) {
      e[k] += ((p >> k) & 1u) ? -mass[p] : mass[p];
    }
  }
  return e;
}

std::vector<double> QnnModel::forward(std::span<const double> x_std,
                                      std::span<const double> theta) const {
  return readout(final_state(x_std, theta));
}

std::vector<double> QnnModel::forward_reference(
    std::span<const double> x_std, std::span<const double> theta) const {
  check_inputs(x_std, theta);
  qsim::Circuit full = build_encoding(x_std, config_);
  full.ops.insert(full.ops.end(), variational_.ops.begin(),
                  variational_.ops.end());
  const auto s = qsim::run_circuit(full, theta);
  std::vector<double> e(config_.n_ancilla);
  for (int k = 0; k < config_.n_ancilla; ++k) {
    e[k] = qsim::expect_z(s, config_.ancilla_qubit(k));
  }
  return e;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

int argmax(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("argmax of an empty vector");
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

nlohmann::json checkpoint_to_json(const Checkpoint& c) {
  return nlohmann::json{{"format_version", kCheckpointVersion},
                        {"config", c.config},
                        {"stats", c.stats},
                        {"theta", c.theta},
                        {"layer_map", layer_map_json(c.config)},
                        {"label_map", c.label_map},
                        {"experiment", c.experiment}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw LoadError("checkpoint format_version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint c;
    j.at("config").get_to(c.config);
    j.at("stats").get_to(c.stats);
    j.at("theta").get_to(c.theta);
    j.at("label_map").get_to(c.label_map);
    c.experiment = j.value("experiment", "");
    c.config.validate();
    if (c.theta.size() != c.config.num_params()) {
      throw LoadError("checkpoint holds " + std::to_string(c.theta.size()) +
                      " parameters, config implies " +
                      std::to_string(c.config.num_params()));
    }
    if (c.stats.dim() != static_cast<std::size_t>(c.config.n_data) ||
        c.stats.stddev.size() != c.stats.dim() ||
        c.stats.max_abs.size() != c.stats.dim()) {
      throw LoadError("standardizer dimension does not match n_data");
    }
    for (int cls : c.label_map) {
      if (cls < -1 || cls >= c.config.n_ancilla) {
        throw LoadError("label map entry " + std::to_string(cls) +
                        " outside the model's classes");
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("checkpoint config invalid: ") + e.what());
  }
}

}  // namespace pqdvqc
