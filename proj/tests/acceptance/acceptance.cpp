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
// Acceptance runner: one PASS/FAIL line per criterion.
//
//   pqdvqc_acceptance [--only 1,2,...] [--seed S] [--epochs7 E] [--epochs10 E]
//
// Exit status is 0 only when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "pqdvqc/experiment.hpp"
#include "pqdvqc/qnn.hpp"
#include "pqdvqc/qsim.hpp"
#include "pqdvqc/stransform.hpp"
#include "pqdvqc/training.hpp"

namespace {

using namespace pqdvqc;
using Clock = std::chrono::steady_clock;

struct Settings {
  std::uint64_t seed = 1;
  int epochs7 = 60;
  int epochs10 = 30;
  std::size_t per_class = 200;
  bool verbose = false;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string pct(double v) { return fmt("%.2f%%", 100.0 * v); }

EpochCallback progress(const Settings& s, const std::string& tag) {
  if (!s.verbose) return {};
  return [tag](const EpochRecord& r) {
    std::fprintf(stderr, "  [%s] epoch %3d loss %.4f train %.4f test %.4f\n", tag.c_str(),
                 r.epoch, r.train_loss, r.train_acc, r.test_acc);
  };
}

qsim::Circuit random_circuit(int n, int n_gates, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2), qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  qsim::Circuit c;
  c.n_qubits = n;
  for (int i = 0; i < n_gates; ++i) {
    const int k = n == 1 ? kind(rng) % 2 : kind(rng);
    const int t = qubit(rng);
    if (k == 0) {
      c.ops.push_back(qsim::GateOp::h(t));
    } else if (k == 1) {
      c.ops.push_back(qsim::GateOp::ry(t, angle(rng)));
    } else {
      int ctl = qubit(rng);
      while (ctl == t) ctl = qubit(rng);
      c.ops.push_back(qsim::GateOp::cry(ctl, t, angle(rng)));
    }
  }
  return c;
}

Outcome gate_correctness(const Settings& s) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(derive_seed(s.seed, 101));
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const auto c = random_circuit(n, 4 + trial % 17, rng);
    const auto state = qsim::run_circuit(c, {});
    const auto ref = testing::dense_run(n, c.ops, {});
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(state[i] - ref[i]));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-12 && secs < 10.0,
          "max amplitude error " + fmt("%.2e", worst) + ", " + fmt("%.2f s", secs)};
}

Outcome gradient_correctness(const Settings& s) {
  const auto t0 = Clock::now();
  ModelConfig cfg;
  cfg.n_data = 2;
  cfg.n_ancilla = 2;
  cfg.n_layers = 2;
  const QnnModel model(cfg);
  std::mt19937_64 rng(derive_seed(s.seed, 102));
  std::uniform_real_distribution<double> in(-1, 1), ang(-std::numbers::pi, std::numbers::pi);
  double fd_err = 0, adj_err = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x = {in(rng), in(rng)};
    std::vector<double> theta(model.num_params());
    for (double& t : theta) t = ang(rng);
    const int y = trial % 2;
    const auto shift = grad_parameter_shift(model, x, y, theta, LossKind::kCce);
    const auto adj = grad_adjoint(model, x, y, theta, LossKind::kCce);
    const double h = 1e-5;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto up = theta, down = theta;
      up[i] += h;
      down[i] -= h;
      const double fd = (loss(softmax(model.forward(x, up)), y, LossKind::kCce) -
                         loss(softmax(model.forward(x, down)), y, LossKind::kCce)) /
                        (2 * h);
      fd_err = std::max(fd_err, std::abs(shift.grad[i] - fd));
      adj_err = std::max(adj_err, std::abs(shift.grad[i] - adj.grad[i]));
    }
  }
  const double secs = seconds_since(t0);
  return {fd_err < 1e-5 && adj_err < 1e-8 && secs < 60.0,
          "shift-vs-fd " + fmt("%.2e", fd_err) + ", shift-vs-adjoint " + fmt("%.2e", adj_err) +
              ", " + fmt("%.2f s", secs)};
}

Outcome stransform_sanity(const Settings& s) {
  const SignalSpec spec;
  const std::size_t n = spec.sample_count();
  std::vector<double> sine(n);
  for (std::size_t k = 0; k < n; ++k)
    sine[k] = std::sin(2 * std::numbers::pi * spec.fundamental_hz * double(k) / spec.sample_rate_hz);
  const StockwellTransform st(sine);
  const auto track = harmonic_track(st, spec.sample_rate_hz, spec.fundamental_hz, 1);
  const auto edge = static_cast<std::size_t>(spec.sample_rate_hz / spec.fundamental_hz);
  double amp_err = 0;
  for (std::size_t m = edge; m < n - edge; ++m) amp_err = std::max(amp_err, std::abs(track[m] - 1.0));

  std::mt19937_64 rng(derive_seed(s.seed, 103));
  std::uniform_int_distribution<int> half(2, 400);
  std::normal_distribution<double> g(0.2, 1.5);
  double mean_err = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> h(2 * half(rng));
    for (double& v : h) v = g(rng);
    double mean = 0;
    for (double v : h) mean += v;
    mean /= double(h.size());
    const auto m = stransform(h, 1000.0);
    for (std::size_t c = 0; c < m.cols(); ++c) mean_err = std::max(mean_err, std::abs(m(0, c) - mean));
  }
  return {amp_err < 0.02 && mean_err < 1e-12,
          "sine amplitude error " + pct(amp_err) + ", row-0 mean error " + fmt("%.2e", mean_err)};
}

// Centred moving average of width 5, then the largest rise between epochs.
double smoothed_rise(const TrainReport& r) {
  std::vector<double> smooth;
  const int n = static_cast<int>(r.epochs.size());
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    int cnt = 0;
    for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j, ++cnt) acc += r.epochs[j].train_loss;
    smooth.push_back(acc / cnt);
  }
  double rise = 0;
  for (std::size_t i = 1; i < smooth.size(); ++i) rise = std::max(rise, smooth[i] - smooth[i - 1]);
  return rise;
}

ExperimentSpec desk_spec(ExperimentId id, const Settings& s) {
  auto spec = default_experiment(id);
  set_master_seed(spec, s.seed);
  return spec;
}

Outcome detection(const Settings& s) {
  auto spec = desk_spec(ExperimentId::kDetect2, s);
  spec.per_class = 1000;
  const auto t0 = Clock::now();
  const auto r = run_pipeline(spec, std::nullopt, progress(s, "detect2"));
  const auto& rep = r.fit.report;
  return {rep.best_test_acc >= 0.97,
          "best " + pct(rep.best_test_acc) + " at epoch " + std::to_string(rep.best_epoch) +
              ", final " + pct(rep.epochs.back().test_acc) + ", smoothed loss rise " +
              fmt("%.1e", smoothed_rise(rep)) + ", " + fmt("%.0f s", seconds_since(t0))};
}

Outcome seven_class(const Settings& s) {
  auto spec = desk_spec(ExperimentId::kSingle7, s);
  spec.per_class = s.per_class;
  spec.train.epochs = s.epochs7;
  const auto t0 = Clock::now();
  const auto r = run_pipeline(spec, std::nullopt, progress(s, "single7"));
  const auto& rep = r.fit.report;
  return {rep.best_test_acc >= 0.90 && spec.train.epochs >= 60,
          "best " + pct(rep.best_test_acc) + " at epoch " + std::to_string(rep.best_epoch) + "/" +
              std::to_string(spec.train.epochs) + ", final " + pct(rep.epochs.back().test_acc) +
              ", " + fmt("%.0f s", seconds_since(t0))};
}

Outcome ten_class(const Settings& s) {
  auto spec = desk_spec(ExperimentId::kMixed10, s);
  spec.per_class = s.per_class;
  spec.train.epochs = s.epochs10;
  const auto t0 = Clock::now();
  const auto r = run_pipeline(spec, std::nullopt, progress(s, "mixed10"));
  const auto& rep = r.fit.report;
  const auto& cm = r.best_eval.confusion;
  std::size_t errors = 0, late = 0;
  for (std::size_t t = 0; t < cm.size(); ++t) {
    for (std::size_t p = 0; p < cm.size(); ++p) {
      if (t == p) continue;
      errors += cm[t][p];
      if (t >= 5) late += cm[t][p];  // D6..D10
    }
  }
  const double share = errors ? double(late) / double(errors) : 1.0;
  return {rep.best_test_acc >= 0.85 && share >= 0.5,
          "best " + pct(rep.best_test_acc) + " at epoch " + std::to_string(rep.best_epoch) + "/" +
              std::to_string(spec.train.epochs) + ", D6-D10 share of errors " + pct(share) +
              ", " + fmt("%.0f s", seconds_since(t0))};
}

Outcome noise_robustness(const Settings& s) {
  auto spec = desk_spec(ExperimentId::kNoiseSweep, s);
  spec.per_class = s.per_class;
  spec.train.epochs = s.epochs7;
  const auto t0 = Clock::now();
  std::vector<double> acc;
  std::string levels;
  for (const auto& snr : spec.snr_levels) {
    const std::string tag = snr ? fmt("%.0f dB", *snr) : "clean";
    const auto r = run_pipeline(spec, snr, progress(s, tag));
    acc.push_back(r.fit.report.best_test_acc);
    levels += (levels.empty() ? "" : ", ") + tag + " " + pct(acc.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < acc.size(); ++i) monotone = monotone && acc[i] <= acc[i - 1] + 0.01;
  const double drop = acc.front() - acc.back();
  return {drop <= 0.05 && monotone,
          levels + "; drop " + fmt("%.2f", 100 * drop) + " points" +
              (monotone ? "" : ", not monotone") + ", " + fmt("%.0f s", seconds_since(t0))};
}

Outcome parameter_economy(const Settings&) {
  const auto spec = default_experiment(ExperimentId::kSingle7);
  const QnnModel model(spec.model);
  const std::size_t p = model.num_params();
  const std::size_t gates = model.variational().num_trainable_gates();
  return {p <= 150 && gates == p,
          "P = " + std::to_string(p) + " (" + std::to_string(gates) + " trainable gates)"};
}

Outcome property_suites(const Settings&) {
  const auto t0 = Clock::now();
  const std::vector<std::string> suites = {PQDVQC_PROPERTY_SUITES};
  std::string failed;
  for (const auto& exe : suites) {
    const std::string cmd = "\"" + exe + "\" --gtest_filter='Properties.*' --gtest_brief=1 > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) failed += " " + exe.substr(exe.find_last_of('/') + 1);
  }
  const double secs = seconds_since(t0);
  return {failed.empty() && secs < 120.0,
          std::to_string(suites.size()) + " suites, " + fmt("%.1f s", secs) +
              (failed.empty() ? "" : ", failed:" + failed)};
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  std::vector<int> only;
  CLI::App app{"acceptance criteria"};
  app.add_option("--only", only, "criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 9));
  app.add_option("--seed", s.seed, "master seed");
  app.add_option("--epochs7", s.epochs7, "epochs for the seven-class runs")->check(CLI::PositiveNumber);
  app.add_option("--epochs10", s.epochs10, "epochs for the ten-class run")->check(CLI::PositiveNumber);
  app.add_option("--per-class", s.per_class, "desk-scale samples per class")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", s.verbose, "per-epoch progress on stderr");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome(const Settings&)>>> criteria = {
      {"gate correctness", gate_correctness},
      {"gradient correctness", gradient_correctness},
      {"S-transform sanity", stransform_sanity},
      {"detection, best test accuracy >= 97%", detection},
      {"seven-class, best test accuracy >= 90%", seven_class},
      {"ten-class, best test accuracy >= 85%, errors in D6-D10", ten_class},
      {"noise robustness, drop <= 5 points, non-increasing", noise_robustness},
      {"parameter economy, P <= 150", parameter_economy},
      {"property suites under 2 minutes", property_suites},
  };
  const std::set<int> selected(only.begin(), only.end());
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second(s);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << " (" << o.detail << ")" << std::endl;
  }
  return all ? 0 : 1;
}
