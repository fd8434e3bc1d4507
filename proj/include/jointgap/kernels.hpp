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

// Data-parallel primitives behind the trajectory analysis code: per-sample
// |a-b|, interpolation gathers, velocity-limit scans. Each kernel has a
// scalar reference implementation and an AVX2 variant; the backend is picked
// once at runtime (cpuid, overridable via JOINTGAP_KERNELS=scalar|avx2).
//
// Every kernel is bit-exact across backends: the AVX2 variants use the same
// per-element expressions (no FMA, no reordered reductions), so the
// equivalence tests compare results with operator==.

namespace jointgap::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
    // out[i] = |a[i] - b[i]|
    void (*abs_diff)(const double* a, const double* b, double* out, std::size_t n);
    // out[i] = (1 - w[i]) * src[idx[i]] + w[i] * src[idx[i] + 1]
    void (*lerp_gather)(const double* src, const std::uint64_t* idx, const double* w,
                        double* out, std::size_t n);
    // number of i with |x[i]| > threshold
    std::size_t (*count_above)(const double* x, std::size_t n, double threshold);
    // max over |x[i]|; 0 for n == 0
    double (*max_abs)(const double* x, std::size_t n);
};

// Table for an explicit backend. Asking for Avx2 on a machine without AVX2
// support throws ValidationError (the equivalence tests probe first).
const KernelTable& table(Backend backend);

// Backend selected for this process: JOINTGAP_KERNELS override if set,
// otherwise AVX2 when the CPU supports it, scalar elsewhere.
Backend active_backend();
const KernelTable& active_table();

bool avx2_supported();
const char* backend_name(Backend backend);

// Convenience wrappers over active_table().
inline void abs_diff(const double* a, const double* b, double* out, std::size_t n) {
    active_table().abs_diff(a, b, out, n);
}
inline void lerp_gather(const double* src, const std::uint64_t* idx, const double* w,
                        double* out, std::size_t n) {
    active_table().lerp_gather(src, idx, w, out, n);
}
inline std::size_t count_above(const double* x, std::size_t n, double threshold) {
    return active_table().count_above(x, n, threshold);
}
inline double max_abs(const double* x, std::size_t n) {
    return active_table().max_abs(x, n);
}

}  // namespace jointgap::kernels
