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
#include "pqdvqc/signal.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pqdvqc/error.hpp"

namespace pqdvqc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRangeTol = 1e-12;

struct Range {
  double lo;
  double hi;
};

// Parameter ranges of the disturbance models; window lengths are in periods.
constexpr Range kHarmonicAmp{0.0, 0.15};
constexpr Range kHarmonicPhase{0.0, kTwoPi};
constexpr Range kSagSwellDepth{0.1, 0.9};
constexpr Range kInterruptionDepth{0.9, 1.0};
constexpr Range kLongWindowPeriods{4.0, 9.0};
constexpr Range kFlickerAmp{0.3, 0.5};
constexpr Range kFlickerBeta{0.1, 0.4};
constexpr Range kOscAmp{0.1, 0.8};
constexpr Range kImpulseAmp{1.0, 10.0};
constexpr Range kDecay{0.008, 0.04};
constexpr Range kShortWindowPeriods{0.05, 3.0};
constexpr Range kOscFreqHz{300.0, 900.0};

double uniform(Rng& rng, Range r) {
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

bool has_harmonics(DisturbanceClass c) {
  return c == DisturbanceClass::kHarmonic ||
         c == DisturbanceClass::kSagHarmonic ||
         c == DisturbanceClass::kSwellHarmonic ||
         c == DisturbanceClass::kInterruptionHarmonic;
}

// Sign of the envelope step: -1 sag-like, +1 swell-like, 0 none.
int envelope_sign(DisturbanceClass c) {
  switch (c) {
    case DisturbanceClass::kSag:
    case DisturbanceClass::kInterruption:
    case DisturbanceClass::kSagHarmonic:
    case DisturbanceClass::kInterruptionHarmonic:
      return -1;
    case DisturbanceClass::kSwell:
    case DisturbanceClass::kSwellHarmonic:
      return +1;
    default:
      return 0;
  }
}

Range envelope_depth(DisturbanceClass c) {
  if (c == DisturbanceClass::kInterruption ||
      c == DisturbanceClass::kInterruptionHarmonic) {
    return kInterruptionDepth;
  }
  return kSagSwellDepth;
}

bool is_transient(DisturbanceClass c) {
  return c == DisturbanceClass::kOscillatoryTransient ||
         c == DisturbanceClass::kImpulsiveTransient;
}

// Draws a window length in [lo, hi] periods and a start so the window fits.
std::pair<double, double> draw_window(Rng& rng, const SignalSpec& spec,
                                      Range periods) {
  const double lo = periods.lo * spec.period_s();
  const double hi = std::min(periods.hi * spec.period_s(), spec.duration_s);
  if (lo > spec.duration_s) {
    throw ConfigError("record of " + std::to_string(spec.duration_s) +
                      " s is shorter than the minimum event window");
  }
  const double len = uniform(rng, {lo, hi});
  const double start = uniform(rng, {0.0, spec.duration_s - len});
  return {start, start + len};
}

void require_in(const char* name, const std::optional<double>& v, Range r) {
  if (!v) {
    throw ConfigError(std::string("missing parameter '") + name + "'");
  }
  if (!std::isfinite(*v) || *v < r.lo - kRangeTol || *v > r.hi + kRangeTol) {
    std::ostringstream os;
    os << "parameter '" << name << "' = " << *v << " outside [" << r.lo
       << ", " << r.hi << "]";
    throw ConfigError(os.str());
  }
}

void require_window(const char* a, const char* b, const std::optional<double>& start,
                    const std::optional<double>& end, Range periods,
                    const SignalSpec& spec) {
  require_in(a, start, {0.0, spec.duration_s});
  require_in(b, end, {0.0, spec.duration_s});
  const double len_periods = (*end - *start) / spec.period_s();
  if (len_periods < periods.lo - 1e-9 || len_periods > periods.hi + 1e-9) {
    std::ostringstream os;
    os << "event window " << b << " - " << a << " = " << len_periods
       << " periods outside [" << periods.lo << ", " << periods.hi << "]";
    throw ConfigError(os.str());
  }
}

void put(nlohmann::json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

void get(const nlohmann::json& j, const char* key, std::optional<double>& v) {
  if (auto it = j.find(key); it != j.end()) v = it->get<double>();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string_view class_tag(DisturbanceClass c) {
  static constexpr std::array<std::string_view, kNumDisturbanceClasses> kTags{
      "D0", "D1", "D2", "D3", "D4", "D5", "D6", "D7", "D8", "D9", "D10"};
  return kTags.at(static_cast<int>(c));
}

std::string_view class_name(DisturbanceClass c) {
  static constexpr std::array<std::string_view, kNumDisturbanceClasses> kNames{
      "normal",
      "harmonic",
      "sag",
      "swell",
      "interruption",
      "flicker",
      "oscillatory transient",
      "impulsive transient",
      "sag+harmonic",
      "swell+harmonic",
      "interruption+harmonic"};
  return kNames.at(static_cast<int>(c));
}

DisturbanceClass class_from_code(int code) {
  if (code < 0 || code >= kNumDisturbanceClasses) {
    throw ArgumentError("disturbance code " + std::to_string(code) +
                        " outside 0..10");
  }
  return static_cast<DisturbanceClass>(code);
}

void SignalSpec::validate() const {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ConfigError("sample rate must be positive");
  }
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("duration must be positive");
  }
  if (!(fundamental_hz > 0.0)) {
    throw ConfigError("fundamental frequency must be positive");
  }
  if (!(sample_rate_hz > 2.0 * fundamental_hz)) {
    throw ConfigError("sample rate must exceed twice the fundamental");
  }
  if (std::llround(sample_rate_hz * duration_s) < 1) {
    throw ConfigError("record holds no samples");
  }
}

std::size_t SignalSpec::sample_count() const {
  return static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
}

void to_json(nlohmann::json& j, const SignalSpec& s) {
  j = nlohmann::json{{"sample_rate_hz", s.sample_rate_hz},
                     {"fundamental_hz", s.fundamental_hz},
                     {"duration_s", s.duration_s},
                     {"rng_seed", s.rng_seed}};
}

void from_json(const nlohmann::json& j, SignalSpec& s) {
  j.at("sample_rate_hz").get_to(s.sample_rate_hz);
  j.at("fundamental_hz").get_to(s.fundamental_hz);
  j.at("duration_s").get_to(s.duration_s);
  j.at("rng_seed").get_to(s.rng_seed);
}

void to_json(nlohmann::json& j, const DisturbanceParams& p) {
  j = nlohmann::json::object();
  put(j, "alpha", p.alpha);
  put(j, "alpha3", p.alpha3);
  put(j, "alpha5", p.alpha5);
  put(j, "alpha7", p.alpha7);
  put(j, "phi3", p.phi3);
  put(j, "phi5", p.phi5);
  put(j, "phi7", p.phi7);
  put(j, "alpha_f", p.alpha_f);
  put(j, "beta", p.beta);
  put(j, "tau", p.tau);
  put(j, "f_n", p.f_n);
  put(j, "t1", p.t1);
  put(j, "t2", p.t2);
  put(j, "t3", p.t3);
  put(j, "t4", p.t4);
}

void from_json(const nlohmann::json& j, DisturbanceParams& p) {
  p = {};
  get(j, "alpha", p.alpha);
  get(j, "alpha3", p.alpha3);
  get(j, "alpha5", p.alpha5);
  get(j, "alpha7", p.alpha7);
  get(j, "phi3", p.phi3);
  get(j, "phi5", p.phi5);
  get(j, "phi7", p.phi7);
  get(j, "alpha_f", p.alpha_f);
  get(j, "beta", p.beta);
  get(j, "tau", p.tau);
  get(j, "f_n", p.f_n);
  get(j, "t1", p.t1);
  get(j, "t2", p.t2);
  get(j, "t3", p.t3);
  get(j, "t4", p.t4);
}

void check_params(DisturbanceClass c, const DisturbanceParams& p,
                  const SignalSpec& spec) {
  if (has_harmonics(c)) {
    require_in("alpha3", p.alpha3, kHarmonicAmp);
    require_in("alpha5", p.alpha5, kHarmonicAmp);
    require_in("alpha7", p.alpha7, kHarmonicAmp);
    require_in("phi3", p.phi3, kHarmonicPhase);
    require_in("phi5", p.phi5, kHarmonicPhase);
    require_in("phi7", p.phi7, kHarmonicPhase);
  }
  if (envelope_sign(c) != 0) {
    require_in("alpha", p.alpha, envelope_depth(c));
    require_window("t1", "t2", p.t1, p.t2, kLongWindowPeriods, spec);
  }
  if (c == DisturbanceClass::kFlicker) {
    require_in("alpha_f", p.alpha_f, kFlickerAmp);
    require_in("beta", p.beta, kFlickerBeta);
  }
  if (is_transient(c)) {
    require_in("alpha", p.alpha,
               c == DisturbanceClass::kOscillatoryTransient ? kOscAmp
                                                            : kImpulseAmp);
    require_in("tau", p.tau, kDecay);
    require_window("t3", "t4", p.t3, p.t4, kShortWindowPeriods, spec);
  }
  if (c == DisturbanceClass::kOscillatoryTransient) {
    require_in("f_n", p.f_n,
               {kOscFreqHz.lo, std::min(kOscFreqHz.hi, spec.sample_rate_hz / 2)});
  }
}

DisturbanceParams draw_params(DisturbanceClass c, const SignalSpec& spec,
                              Rng& rng) {
  spec.validate();
  DisturbanceParams p;
  if (envelope_sign(c) != 0) {
    p.alpha = uniform(rng, envelope_depth(c));
    auto [t1, t2] = draw_window(rng, spec, kLongWindowPeriods);
    p.t1 = t1;
    p.t2 = t2;
  }
  if (has_harmonics(c)) {
    p.alpha3 = uniform(rng, kHarmonicAmp);
    p.alpha5 = uniform(rng, kHarmonicAmp);
    p.alpha7 = uniform(rng, kHarmonicAmp);
    p.phi3 = uniform(rng, kHarmonicPhase);
    p.phi5 = uniform(rng, kHarmonicPhase);
    p.phi7 = uniform(rng, kHarmonicPhase);
  }
  switch (c) {
    case DisturbanceClass::kFlicker:
      p.alpha_f = uniform(rng, kFlickerAmp);
      p.beta = uniform(rng, kFlickerBeta);
      break;
    case DisturbanceClass::kOscillatoryTransient:
    case DisturbanceClass::kImpulsiveTransient: {
      const bool osc = c == DisturbanceClass::kOscillatoryTransient;
      p.alpha = uniform(rng, osc ? kOscAmp : kImpulseAmp);
      p.tau = uniform(rng, kDecay);
      auto [t3, t4] = draw_window(rng, spec, kShortWindowPeriods);
      p.t3 = t3;
      p.t4 = t4;
      if (osc) {
        const double nyquist = spec.sample_rate_hz / 2.0;
        if (nyquist <= kOscFreqHz.lo) {
          throw ConfigError("oscillatory transient band lies above Nyquist");
        }
        double f;
        do {
          f = uniform(rng, kOscFreqHz);
        } while (f >= nyquist);
        p.f_n = f;
      }
      break;
    }
    default:
      break;
  }
  check_params(c, p, spec);
  return p;
}

std::vector<double> evaluate_model(DisturbanceClass c,
                                   const DisturbanceParams& p,
                                   const SignalSpec& spec) {
  spec.validate();
  check_params(c, p, spec);
  const std::size_t n = spec.sample_count();
  const double w = kTwoPi * spec.fundamental_hz;
  const int sign = envelope_sign(c);
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / spec.sample_rate_hz;
    double envelope = 1.0;
    if (sign != 0) {
      envelope += sign * *p.alpha * (unit_step(t - *p.t1) - unit_step(t - *p.t2));
    }
    if (c == DisturbanceClass::kFlicker) {
      envelope += *p.alpha_f * std::sin(*p.beta * w * t);
    }
    double x = envelope * std::sin(w * t);
    if (has_harmonics(c)) {
      x += *p.alpha3 * std::sin(3 * w * t + *p.phi3) +
           *p.alpha5 * std::sin(5 * w * t + *p.phi5) +
           *p.alpha7 * std::sin(7 * w * t + *p.phi7);
    }
    if (is_transient(c)) {
      const double gate = unit_step(t - *p.t3) - unit_step(t - *p.t4);
      if (gate != 0.0) {
        double burst = *p.alpha * std::exp(-(t - *p.t3) / *p.tau);
        if (c == DisturbanceClass::kOscillatoryTransient) {
          burst *= std::sin(kTwoPi * *p.f_n * (t - *p.t3));
        }
        x += burst * gate;
      }
    }
    v[k] = x;
  }
  return v;
}

Waveform synthesize(DisturbanceClass c, const SignalSpec& spec, Rng& rng) {
  Waveform w;
  w.spec = spec;
  w.label = c;
  w.params = draw_params(c, spec, rng);
  w.samples = evaluate_model(c, w.params, spec);
  return w;
}

double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

Waveform add_awgn(const Waveform& w, std::optional<double> snr_db, Rng& rng) {
  if (!snr_db) return w;
  if (!std::isfinite(*snr_db)) {
    throw ArgumentError("SNR must be finite; use no-noise for a clean record");
  }
  const double ps = mean_power(w.samples);
  if (ps == 0.0 || w.samples.empty()) return w;

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(w.samples.size());
  for (double& v : noise) v = gauss(rng);
  const double raw = mean_power(noise);
  const double target = ps / std::pow(10.0, *snr_db / 10.0);
  const double scale = raw > 0.0 ? std::sqrt(target / raw) : 0.0;

  Waveform out = w;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    out.samples[i] += scale * noise[i];
  }
  return out;
}

Dataset generate_labeled(std::span<const DisturbanceClass> labels,
                         const SignalSpec& spec, std::optional<double> snr_db) {
  spec.validate();
  if (labels.empty()) throw ConfigError("dataset needs at least one class");
  Dataset d;
  d.spec = spec;
  d.waveforms.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Rng rng(derive_seed(spec.rng_seed, i));
    d.waveforms.push_back(synthesize(labels[i], spec, rng));
  }
  return snr_db ? add_awgn(d, snr_db, derive_seed(spec.rng_seed, ~0ull)) : d;
}

Dataset generate_dataset(std::span<const DisturbanceClass> classes,
                         std::size_t per_class, const SignalSpec& spec,
                         std::optional<double> snr_db) {
  if (classes.empty()) throw ConfigError("class set is empty");
  if (per_class < 1) throw ConfigError("per-class count must be at least 1");
  std::vector<DisturbanceClass> labels;
  labels.reserve(classes.size() * per_class);
  for (DisturbanceClass c : classes) labels.insert(labels.end(), per_class, c);
  return generate_labeled(labels, spec, snr_db);
}

Dataset add_awgn(const Dataset& clean, std::optional<double> snr_db,
                 std::uint64_t seed) {
  Dataset out;
  out.spec = clean.spec;
  out.snr_db = snr_db;
  out.waveforms.reserve(clean.waveforms.size());
  for (std::size_t i = 0; i < clean.waveforms.size(); ++i) {
    Rng rng(derive_seed(seed, i));
    out.waveforms.push_back(add_awgn(clean.waveforms[i], snr_db, rng));
  }
  return out;
}

}  // namespace pqdvqc
