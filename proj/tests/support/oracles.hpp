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

// Slow, independent reference implementations used as test oracles.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "pqdvqc/qsim.hpp"

namespace pqdvqc::testing {

using C = std::complex<double>;
using Matrix = std::vector<std::vector<C>>;

inline Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<C>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t ra = a.size(), rb = b.size();
  Matrix out(ra * rb, std::vector<C>(ra * rb, 0.0));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ra; ++j)
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < rb; ++l) out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
  return out;
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] += b[i][j];
  return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size();
  Matrix out(n, std::vector<C>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Matrix ry_matrix(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  return {{c, -s}, {s, c}};
}

inline Matrix h_matrix() {
  const double r = 1.0 / std::sqrt(2.0);
  return {{r, r}, {r, -r}};
}

// Kronecker product over qubits n-1 ... 0 (qubit 0 is the rightmost factor,
// i.e. the least-significant index bit).
inline Matrix place(int n, const std::vector<std::pair<int, Matrix>>& factors) {
  Matrix out = {{1.0}};
  for (int q = n - 1; q >= 0; --q) {
    Matrix f = identity(2);
    for (const auto& [qq, m] : factors)
      if (qq == q) f = m;
    out = kron(out, f);
  }
  return out;
}

// Full 2^n x 2^n unitary of one gate.
inline Matrix dense_gate(int n, const qsim::GateOp& g, double theta) {
  using qsim::GateKind;
  switch (g.kind) {
    case GateKind::kH:
      return place(n, {{g.target, h_matrix()}});
    case GateKind::kRy:
      return place(n, {{g.target, ry_matrix(theta)}});
    case GateKind::kCRy: {
      const Matrix p0 = {{1.0, 0.0}, {0.0, 0.0}};
      const Matrix p1 = {{0.0, 0.0}, {0.0, 1.0}};
      return add(place(n, {{g.control, p0}}),
                 place(n, {{g.control, p1}, {g.target, ry_matrix(theta)}}));
    }
  }
  return identity(std::size_t{1} << n);
}

inline std::vector<C> dense_run(int n, std::span<const qsim::GateOp> ops,
                                std::span<const double> theta) {
  Matrix u = identity(std::size_t{1} << n);
  for (const auto& g : ops) {
    const double a = g.trainable() ? theta[g.param_id] : g.theta;
    u = matmul(dense_gate(n, g, a), u);
  }
  std::vector<C> psi(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) psi[i] = u[i][0];
  return psi;
}

inline double dense_expect_z(const std::vector<C>& psi, int q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    acc += ((i >> q) & 1u ? -1.0 : 1.0) * std::norm(psi[i]);
  return acc;
}

// H[k] = (1/N) sum_m h[m] exp(-2 pi i k m / N), by direct summation.
inline std::vector<C> direct_dft(std::span<const double> h) {
  const std::size_t n = h.size();
  std::vector<C> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    C acc = 0.0;
    for (std::size_t m = 0; m < n; ++m)
      acc += h[m] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * m % n) / double(n));
    out[k] = acc / double(n);
  }
  return out;
}

// S[m, n] as a time-domain sum: the record times exp(-2 pi i n j / N) under a
// Gaussian window of standard deviation N / n samples centred on column m,
// wrapped around the record until the tails vanish.
inline C direct_stockwell(std::span<const double> h, std::size_t m, std::size_t n) {
  const double big_n = double(h.size());
  const double nn = double(n);
  C acc = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    double w = 0.0;
    const int wraps = 2 + static_cast<int>(40 / n);
    for (int p = -wraps; p <= wraps; ++p) {
      const double d = double(m) - double(j) + p * big_n;
      w += nn / (big_n * std::sqrt(2.0 * std::numbers::pi)) *
           std::exp(-d * d * nn * nn / (2.0 * big_n * big_n));
    }
    acc += h[j] * w * std::polar(1.0, -2.0 * std::numbers::pi * double(n * j % h.size()) / big_n);
  }
  return acc;
}

// Whole row n of the S-transform from the time-domain sum. The window depends
// only on (m - j) mod N, so it is tabulated once.
inline std::vector<C> direct_voice(std::span<const double> h, std::size_t n) {
  const std::size_t len = h.size();
  const double big_n = double(len);
  const double nn = double(n);
  std::vector<double> window(len, 0.0);
  for (std::size_t d = 0; d < len; ++d) {
    const int wraps = 2 + static_cast<int>(40 / n);
    for (int p = -wraps; p <= wraps; ++p) {
      const double x = double(d) + p * big_n;
      window[d] += nn / (big_n * std::sqrt(2.0 * std::numbers::pi)) *
                   std::exp(-x * x * nn * nn / (2.0 * big_n * big_n));
    }
  }
  std::vector<C> carrier(len);
  for (std::size_t j = 0; j < len; ++j)
    carrier[j] = h[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(n * j % len) / big_n);
  std::vector<C> out(len, 0.0);
  for (std::size_t m = 0; m < len; ++m)
    for (std::size_t j = 0; j < len; ++j) out[m] += carrier[j] * window[(m + len - j) % len];
  return out;
}

}  // namespace pqdvqc::testing
