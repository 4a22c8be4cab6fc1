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

// Real-amplitude gate kernels on raw arrays. Any target/control layout is
// handled; loops are contiguous and vectorize once both bits are >= 3.

#include <cstddef>

namespace pqdvqc::qsim::kernels {

void hadamard(double* a, std::size_t dim, int target);

// Ry with cos/sin of half the angle; control < 0 means uncontrolled.
void rotate(double* a, std::size_t dim, int target, int control, double c,
            double s);

// Returns sum over the (controlled) pairs of lam1*phi0 - lam0*phi1, then
// applies the inverse rotation to both arrays.
double adjoint_rotate(double* phi, double* lam, std::size_t dim, int target,
                      int control, double c, double s);

void gather(const double* a, std::size_t base, const std::size_t* offsets,
            std::size_t n, double* out);
void scatter(const double* in, std::size_t base, const std::size_t* offsets,
             std::size_t n, double* a);

}  // namespace pqdvqc::qsim::kernels
