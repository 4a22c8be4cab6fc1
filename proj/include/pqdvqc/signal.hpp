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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pqdvqc {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive one independent stream per sample so
// generation order and parallel scheduling never change the output.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

enum class DisturbanceClass : int {
  kNormal = 0,
  kHarmonic = 1,
  kSag = 2,
  kSwell = 3,
  kInterruption = 4,
  kFlicker = 5,
  kOscillatoryTransient = 6,
  kImpulsiveTransient = 7,
  kSagHarmonic = 8,
  kSwellHarmonic = 9,
  kInterruptionHarmonic = 10,
};

inline constexpr int kNumDisturbanceClasses = 11;

std::string_view class_tag(DisturbanceClass c);   // "D0".."D10"
std::string_view class_name(DisturbanceClass c);  // "sag", "swell+harmonic", ...
DisturbanceClass class_from_code(int code);       // throws ArgumentError

struct SignalSpec {
  double sample_rate_hz = 3200.0;
  double fundamental_hz = 50.0;
  double duration_s = 0.2;
  std::uint64_t rng_seed = 0;

  // Throws ConfigError when the rate, duration or Nyquist condition fails.
  void validate() const;
  std::size_t sample_count() const;
  double period_s() const { return 1.0 / fundamental_hz; }
};

void to_json(nlohmann::json& j, const SignalSpec& s);
void from_json(const nlohmann::json& j, SignalSpec& s);

// Sampled model parameters. Only the fields used by a class are engaged.
struct DisturbanceParams {
  std::optional<double> alpha;
  std::optional<double> alpha3, alpha5, alpha7;
  std::optional<double> phi3, phi5, phi7;
  std::optional<double> alpha_f, beta;
  std::optional<double> tau, f_n;
  std::optional<double> t1, t2, t3, t4;

  bool operator==(const DisturbanceParams&) const = default;
};

void to_json(nlohmann::json& j, const DisturbanceParams& p);
void from_json(const nlohmann::json& j, DisturbanceParams& p);

// Throws ConfigError if a parameter required by `c` is missing or outside its
// model range, or if an event window leaves the record.
void check_params(DisturbanceClass c, const DisturbanceParams& p,
                  const SignalSpec& spec);

struct Waveform {
  std::vector<double> samples;
  SignalSpec spec;
  DisturbanceClass label = DisturbanceClass::kNormal;
  DisturbanceParams params;
};

// Unit step with closed-left semantics: u(0) = 1.
inline double unit_step(double t) { return t >= 0.0 ? 1.0 : 0.0; }

DisturbanceParams draw_params(DisturbanceClass c, const SignalSpec& spec,
                              Rng& rng);

// Evaluates the closed-form model at t = k / sample_rate_hz.
std::vector<double> evaluate_model(DisturbanceClass c,
                                   const DisturbanceParams& p,
                                   const SignalSpec& spec);

Waveform synthesize(DisturbanceClass c, const SignalSpec& spec, Rng& rng);

// Adds zero-mean Gaussian noise whose record power is set so that
// 10 log10(Ps / Pn) == snr_db exactly. std::nullopt means no noise. A record
// with zero power is returned unchanged.
Waveform add_awgn(const Waveform& w, std::optional<double> snr_db, Rng& rng);

double mean_power(std::span<const double> x);

struct Dataset {
  SignalSpec spec;
  std::optional<double> snr_db;
  std::vector<Waveform> waveforms;
};

// One waveform per entry of `labels`; waveform i draws from stream
// derive_seed(spec.rng_seed, i) and its noise from a second derived stream.
Dataset generate_labeled(std::span<const DisturbanceClass> labels,
                         const SignalSpec& spec, std::optional<double> snr_db);

// Class-major layout: per_class waveforms of classes[0], then classes[1], ...
Dataset generate_dataset(std::span<const DisturbanceClass> classes,
                         std::size_t per_class, const SignalSpec& spec,
                         std::optional<double> snr_db = std::nullopt);

// Re-noises every waveform of a clean dataset. Streams are derived from
// `seed` and the sample index.
Dataset add_awgn(const Dataset& clean, std::optional<double> snr_db,
                 std::uint64_t seed);

}  // namespace pqdvqc
