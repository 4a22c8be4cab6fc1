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
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "pqdvqc/signal.hpp"

namespace pqdvqc {

using Complex = std::complex<double>;

// Forward DFT with the 1/N normalization on the forward transform:
// H[k] = (1/N) sum_m h[m] exp(-j 2 pi k m / N).
std::vector<Complex> dft(std::span<const double> h);

// Discrete Stockwell transform of a real record. Row n holds the voice at
// n / (N T) Hz for n = 0..N/2; row 0 is the record mean in every column.
class SpectralMatrix {
 public:
  SpectralMatrix(std::size_t rows, std::size_t cols, double sample_rate_hz);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double sample_rate_hz() const { return sample_rate_hz_; }
  double row_freq_hz(std::size_t n) const;

  const Complex& operator()(std::size_t row, std::size_t col) const {
    return values_[row * cols_ + col];
  }
  Complex& operator()(std::size_t row, std::size_t col) {
    return values_[row * cols_ + col];
  }
  std::span<const Complex> row(std::size_t n) const {
    return {values_.data() + n * cols_, cols_};
  }
  std::span<Complex> row(std::size_t n) {
    return {values_.data() + n * cols_, cols_};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  double sample_rate_hz_;
  std::vector<Complex> values_;
};

// Holds the spectrum of one record and produces single S-transform voices on
// demand, so callers that need a handful of rows skip the full matrix.
class StockwellTransform {
 public:
  // Requires an even record length of at least 4 (ArgumentError otherwise).
  explicit StockwellTransform(std::span<const double> h);

  std::size_t size() const { return spectrum_.size(); }
  std::vector<Complex> voice(std::size_t n) const;

 private:
  double mean_;
  std::vector<Complex> spectrum_;
};

SpectralMatrix stransform(std::span<const double> h, double sample_rate_hz);

// Population-sigma skewness and (non-excess) kurtosis; both return 0 when the
// sequence is constant.
double skewness(std::span<const double> x);
double kurtosis(std::span<const double> x);
// Sample (n-1) standard deviation; 0 for a single element.
double stddev(std::span<const double> x);

inline constexpr std::size_t kNumFeatures = 9;
using FeatureVector = std::array<double, kNumFeatures>;

struct FeatureSettings {
  int harmonic_ceiling = 30;
  // Columns within this many fundamental periods of either record edge are
  // dropped from the fundamental-threshold fractions and the THD mean.
  double edge_periods = 1.0;
  // Report 2|S| (single-sided) as the per-unit amplitude below Nyquist.
  bool single_sided = true;
  // Keep only harmonics below Nyquist instead of failing.
  bool truncate_above_nyquist = false;
};

void to_json(nlohmann::json& j, const FeatureSettings& s);
void from_json(const nlohmann::json& j, FeatureSettings& s);

struct FeatureResult {
  FeatureVector features{};
  int highest_harmonic = 0;  // highest harmonic actually tracked
  bool truncated = false;
};

// Per-unit amplitude track of harmonic h (h = 1 is the fundamental).
std::vector<double> harmonic_track(const StockwellTransform& st,
                                   double sample_rate_hz, double fundamental_hz,
                                   int h, bool single_sided = true);

FeatureResult extract_features(const Waveform& w,
                               const FeatureSettings& settings = {});

}  // namespace pqdvqc
