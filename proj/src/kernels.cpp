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
#include "kernels.hpp"

#include <algorithm>
#include <numbers>

#if defined(__GNUC__) && !defined(__clang__) && defined(__x86_64__)
#define PQDVQC_CLONES __attribute__((target_clones("avx512f", "avx2", "default")))
#else
#define PQDVQC_CLONES
#endif

namespace pqdvqc::qsim::kernels {

PQDVQC_CLONES
void hadamard(double* a, std::size_t dim, int target) {
  const double r = std::numbers::sqrt2 / 2.0;
  const std::size_t t = std::size_t{1} << target;
  for (std::size_t base = 0; base < dim; base += 2 * t) {
    double* x = a + base;
    double* y = x + t;
#pragma omp simd
    for (std::size_t i = 0; i < t; ++i) {
      const double p = x[i];
      const double q = y[i];
      x[i] = r * (p + q);
      y[i] = r * (p - q);
    }
  }
}

PQDVQC_CLONES
void rotate(double* a, std::size_t dim, int target, int control, double c,
            double s) {
  const std::size_t t = std::size_t{1} << target;
  if (control < 0) {
    for (std::size_t base = 0; base < dim; base += 2 * t) {
      double* x = a + base;
      double* y = x + t;
#pragma omp simd
      for (std::size_t i = 0; i < t; ++i) {
        const double p = x[i];
        const double q = y[i];
        x[i] = c * p - s * q;
        y[i] = s * p + c * q;
      }
    }
    return;
  }
  const std::size_t cm = std::size_t{1} << control;
  const std::size_t lo = std::size_t{1} << std::min(target, control);
  const std::size_t hi = std::size_t{1} << std::max(target, control);
  for (std::size_t o = 0; o < dim; o += 2 * hi) {
    for (std::size_t m = o; m < o + hi; m += 2 * lo) {
      double* x = a + m + cm;
      double* y = x + t;
#pragma omp simd
      for (std::size_t i = 0; i < lo; ++i) {
        const double p = x[i];
        const double q = y[i];
        x[i] = c * p - s * q;
        y[i] = s * p + c * q;
      }
    }
  }
}

PQDVQC_CLONES
double adjoint_rotate(double* phi, double* lam, std::size_t dim, int target,
                      int control, double c, double s) {
  const std::size_t t = std::size_t{1} << target;
  const std::size_t cm = control < 0 ? 0 : std::size_t{1} << control;
  const int lo_bit = control < 0 ? target : std::min(target, control);
  const int hi_bit = control < 0 ? target : std::max(target, control);
  const std::size_t lo = std::size_t{1} << lo_bit;
  const std::size_t hi = std::size_t{1} << hi_bit;
  double acc = 0.0;
  for (std::size_t o = 0; o < dim; o += 2 * hi) {
    for (std::size_t m = o; m < o + hi; m += 2 * lo) {
      double* x = phi + m + cm;
      double* y = x + t;
      double* u = lam + m + cm;
      double* v = u + t;
      double part = 0.0;
#pragma omp simd reduction(+ : part)
      for (std::size_t i = 0; i < lo; ++i) {
        const double p0 = x[i];
        const double p1 = y[i];
        const double l0 = u[i];
        const double l1 = v[i];
        part += l1 * p0 - l0 * p1;
        x[i] = c * p0 + s * p1;
        y[i] = c * p1 - s * p0;
        u[i] = c * l0 + s * l1;
        v[i] = c * l1 - s * l0;
      }
      acc += part;
    }
  }
  return acc;
}

void gather(const double* a, std::size_t base, const std::size_t* offsets,
            std::size_t n, double* out) {
  const double* src = a + base;
  for (std::size_t j = 0; j < n; ++j) out[j] = src[offsets[j]];
}

void scatter(const double* in, std::size_t base, const std::size_t* offsets,
             std::size_t n, double* a) {
  double* dst = a + base;
  for (std::size_t j = 0; j < n; ++j) dst[offsets[j]] = in[j];
}

}  // namespace pqdvqc::qsim::kernels
