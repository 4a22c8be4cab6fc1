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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pqdvqc/qsim.hpp"

namespace pqdvqc {

// Register layout: data qubits occupy 0..n_data-1, ancilla k is qubit
// n_data + k and reads out class k.
struct ModelConfig {
  int n_data = 9;
  int n_ancilla = 2;
  int n_layers = 1;
  std::uint64_t seed = 0;

  int n_qubits() const { return n_data + n_ancilla; }
  // L * (3N + n_data)
  std::size_t num_params() const;
  int ancilla_qubit(int k) const { return n_data + k; }
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;
  std::vector<double> max_abs;
  std::vector<bool> degenerate;  // constant training column, stddev forced to 1

  std::size_t dim() const { return mean.size(); }
};

void to_json(nlohmann::json& j, const StandardizationStats& s);
void from_json(const nlohmann::json& j, StandardizationStats& s);

// Per-column mean and sample (n-1) standard deviation over the training rows,
// then the largest |z-score| per column. Needs at least two rows.
StandardizationStats fit_standardizer(
    std::span<const std::vector<double>> rows);

// clamp(((x - mean) / stddev) / max_abs, -1, 1)
std::vector<double> standardize(std::span<const double> x,
                                const StandardizationStats& stats);

// Offsets of each parameter group inside the flat parameter vector.
struct LayerSlots {
  std::size_t oeo_rotation;  // n_qubits angles
  std::size_t oeo_ring;      // n_qubits angles
  std::size_t dea_rotation;  // n_qubits angles
  std::size_t dea_entangle;  // n_data angles
};

std::vector<LayerSlots> layer_map(const ModelConfig& config);
nlohmann::json layer_map_json(const ModelConfig& config);

// H then Ry(asin x_i) on each data qubit; ancillas untouched.
qsim::Circuit build_encoding(std::span<const double> x_std,
                             const ModelConfig& config);

// L repetitions of: Ry on every qubit, CRy ring i -> i+1 closed by
// (N-1) -> 0, Ry on every qubit, CRy data_i -> ancilla_(i mod K).
qsim::Circuit build_variational(const ModelConfig& config);

// Independent uniform draws in [-0.1, 0.1] from config.seed.
std::vector<double> init_parameters(const ModelConfig& config);

// Product state produced by build_encoding, assembled directly.
qsim::RealStateVector encoded_state(std::span<const double> x_std,
                                    const ModelConfig& config);

class QnnModel {
 public:
  explicit QnnModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  const qsim::Circuit& variational() const { return variational_; }
  const qsim::BlockPlan& plan() const { return plan_; }
  std::size_t num_params() const { return config_.num_params(); }

  // Per-ancilla <Z> for an already standardized input.
  std::vector<double> forward(std::span<const double> x_std,
                              std::span<const double> theta) const;
  // Same quantity through the generic complex simulator; slower.
  std::vector<double> forward_reference(std::span<const double> x_std,
                                        std::span<const double> theta) const;
  // Final real state, used by the adjoint sweep.
  qsim::RealStateVector final_state(std::span<const double> x_std,
                                    std::span<const double> theta) const;
  std::vector<double> readout(const qsim::RealStateVector& s) const;

 private:
  void check_inputs(std::span<const double> x_std,
                    std::span<const double> theta) const;

  ModelConfig config_;
  qsim::Circuit variational_;
  qsim::BlockPlan plan_;
};

std::vector<double> softmax(std::span<const double> logits);
// Lowest index wins ties.
int argmax(std::span<const double> v);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  StandardizationStats stats;
  std::vector<double> theta;
  // Disturbance code (0..10) -> class index, -1 when the code is not modelled.
  std::vector<int> label_map;
  std::string experiment;
};

nlohmann::json checkpoint_to_json(const Checkpoint& c);
// Throws LoadError on version or dimension mismatch.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

}  // namespace pqdvqc
