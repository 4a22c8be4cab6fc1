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
#include "pqdvqc/stransform.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include "pqdvqc/error.hpp"

namespace pqdvqc {
namespace {

constexpr double kPi = std::numbers::pi;

// fftw planning is not thread-safe; execution on new arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mu_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void execute_inplace(std::vector<Complex>& data, int sign) {
  fftw_plan plan = PlanCache::instance().get(data.size(), sign);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) /
         static_cast<double>(x.size());
}

std::size_t harmonic_row(std::size_t n, double rate, double f0, int h) {
  return static_cast<std::size_t>(
      std::llround(h * f0 * static_cast<double>(n) / rate));
}

}  // namespace

std::vector<Complex> dft(std::span<const double> h) {
  if (h.empty()) throw ArgumentError("dft of an empty sequence");
  std::vector<Complex> out(h.begin(), h.end());
  execute_inplace(out, FFTW_FORWARD);
  const double inv_n = 1.0 / static_cast<double>(h.size());
  for (auto& v : out) v *= inv_n;
  return out;
}

SpectralMatrix::SpectralMatrix(std::size_t rows, std::size_t cols,
                               double sample_rate_hz)
    : rows_(rows),
      cols_(cols),
      sample_rate_hz_(sample_rate_hz),
      values_(rows * cols) {}

double SpectralMatrix::row_freq_hz(std::size_t n) const {
  return static_cast<double>(n) * sample_rate_hz_ / static_cast<double>(cols_);
}

StockwellTransform::StockwellTransform(std::span<const double> h) {
  if (h.size() < 4 || h.size() % 2 != 0) {
    throw ArgumentError("S-transform needs an even record of at least 4 "
                        "samples, got " + std::to_string(h.size()));
  }
  mean_ = mean_of(h);
  spectrum_ = dft(h);
}

std::vector<Complex> StockwellTransform::voice(std::size_t n) const {
  const std::size_t len = spectrum_.size();
  if (n > len / 2) throw ArgumentError("voice index above Nyquist row");
  if (n == 0) return std::vector<Complex>(len, Complex(mean_, 0.0));

  const double nn = static_cast<double>(n);
  std::vector<Complex> buf(len);
  for (std::size_t k = 0; k < len; ++k) {
    // Gaussian is centred on k = 0 over the circular index range.
    const double kk = k <= len / 2 ? static_cast<double>(k)
                                   : static_cast<double>(k) - static_cast<double>(len);
    const double g = std::exp(-2.0 * kPi * kPi * kk * kk / (nn * nn));
    buf[k] = spectrum_[(k + n) % len] * g;
  }
  execute_inplace(buf, FFTW_BACKWARD);
  return buf;
}

SpectralMatrix stransform(std::span<const double> h, double sample_rate_hz) {
  StockwellTransform st(h);
  const std::size_t len = h.size();
  SpectralMatrix s(len / 2 + 1, len, sample_rate_hz);
  for (std::size_t n = 0; n <= len / 2; ++n) {
    auto v = st.voice(n);
    std::copy(v.begin(), v.end(), s.row(n).begin());
  }
  return s;
}

double skewness(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  const double mu = mean_of(x);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

double kurtosis(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  const double mu = mean_of(x);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d2 = (v - mu) * (v - mu);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0) return 0.0;
  return m4 / (m2 * m2);
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

void to_json(nlohmann::json& j, const FeatureSettings& s) {
  j = nlohmann::json{{"harmonic_ceiling", s.harmonic_ceiling},
                     {"edge_periods", s.edge_periods},
                     {"single_sided", s.single_sided},
                     {"truncate_above_nyquist", s.truncate_above_nyquist}};
}

void from_json(const nlohmann::json& j, FeatureSettings& s) {
  j.at("harmonic_ceiling").get_to(s.harmonic_ceiling);
  j.at("edge_periods").get_to(s.edge_periods);
  j.at("single_sided").get_to(s.single_sided);
  j.at("truncate_above_nyquist").get_to(s.truncate_above_nyquist);
}

std::vector<double> harmonic_track(const StockwellTransform& st,
                                   double sample_rate_hz, double fundamental_hz,
                                   int h, bool single_sided) {
  const std::size_t len = st.size();
  const std::size_t row = harmonic_row(len, sample_rate_hz, fundamental_hz, h);
  if (row == 0 || row > len / 2) {
    throw ConfigError("harmonic " + std::to_string(h) +
                      " is not resolvable at this sample rate");
  }
  const double scale = (single_sided && row < len / 2) ? 2.0 : 1.0;
  auto voice = st.voice(row);
  std::vector<double> amp(len);
  for (std::size_t m = 0; m < len; ++m) amp[m] = scale * std::abs(voice[m]);
  return amp;
}

FeatureResult extract_features(const Waveform& w,
                               const FeatureSettings& settings) {
  const SignalSpec& spec = w.spec;
  spec.validate();
  const double rate = spec.sample_rate_hz;
  const double f0 = spec.fundamental_hz;
  const std::size_t len = w.samples.size();
  if (len != spec.sample_count()) {
    throw ArgumentError("waveform length does not match its spec");
  }
  if (settings.harmonic_ceiling < 7) {
    throw ConfigError("harmonic ceiling must be at least 7");
  }

  FeatureResult result;
  const double nyquist = rate / 2.0;
  int top = settings.harmonic_ceiling;
  if (top * f0 >= nyquist) {
    if (!settings.truncate_above_nyquist) {
      throw ConfigError("harmonic " + std::to_string(top) + " (" +
                        std::to_string(top * f0) +
                        " Hz) is at or above Nyquist; raise the rate or enable "
                        "truncation");
    }
    top = static_cast<int>(std::ceil(nyquist / f0)) - 1;
    result.truncated = true;
  }
  if (top < 1) throw ConfigError("fundamental lies above Nyquist");
  result.highest_harmonic = top;

  StockwellTransform st(w.samples);
  std::vector<std::vector<double>> tracks(top + 1);
  for (int h = 1; h <= top; ++h) {
    tracks[h] = harmonic_track(st, rate, f0, h, settings.single_sided);
  }

  const auto edge = static_cast<std::size_t>(
      std::llround(settings.edge_periods * rate / f0));
  if (2 * edge >= len) {
    throw ConfigError("edge exclusion leaves no interior columns");
  }
  const std::size_t first = edge;
  const std::size_t last = len - edge;  // exclusive
  const double interior = static_cast<double>(last - first);

  FeatureVector& f = result.features;
  const auto& fund = tracks[1];
  std::size_t above = 0;
  std::size_t below = 0;
  std::size_t deep = 0;
  for (std::size_t m = first; m < last; ++m) {
    if (fund[m] > 1.02) ++above;
    if (fund[m] < 0.98) ++below;
    if (fund[m] < 0.15) ++deep;
  }
  f[0] = above / interior;
  f[1] = below / interior;
  f[2] = deep / interior;

  auto sum_over = [&](int lo, int hi, double (*stat)(std::span<const double>)) {
    double acc = 0.0;
    for (int h = lo; h <= std::min(hi, top); ++h) acc += stat(tracks[h]);
    return acc;
  };
  f[3] = sum_over(2, 7, skewness);
  f[4] = sum_over(8, 18, kurtosis);
  f[5] = sum_over(8, 18, stddev);
  f[6] = sum_over(19, 30, kurtosis);
  f[7] = sum_over(19, 30, stddev);

  double thd_sum = 0.0;
  std::size_t thd_cols = 0;
  for (std::size_t m = first; m < last; ++m) {
    if (fund[m] < 1e-6) continue;
    double hs = 0.0;
    for (int h = 2; h <= top; ++h) hs += tracks[h][m] * tracks[h][m];
    thd_sum += std::sqrt(hs) / fund[m];
    ++thd_cols;
  }
  f[8] = thd_cols > 0 ? thd_sum / static_cast<double>(thd_cols) : 0.0;
  return result;
}

}  // namespace pqdvqc
