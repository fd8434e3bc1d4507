// Copyright 2026 The jointgap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>

#if defined(__x86_64__) || defined(_M_X64)
#define JOINTGAP_X86 1
#else
#define JOINTGAP_X86 0
#endif

namespace jointgap::kernels::detail {

void abs_diff_scalar(const double* a, const double* b, double* out, std::size_t n);
void lerp_gather_scalar(const double* src, const std::uint64_t* idx, const double* w,
                        double* out, std::size_t n);
std::size_t count_above_scalar(const double* x, std::size_t n, double threshold);
double max_abs_scalar(const double* x, std::size_t n);

#if JOINTGAP_X86
void abs_diff_avx2(const double* a, const double* b, double* out, std::size_t n);
void lerp_gather_avx2(const double* src, const std::uint64_t* idx, const double* w,
                      double* out, std::size_t n);
std::size_t count_above_avx2(const double* x, std::size_t n, double threshold);
double max_abs_avx2(const double* x, std::size_t n);
#endif

}  // namespace jointgap::kernels::detail
