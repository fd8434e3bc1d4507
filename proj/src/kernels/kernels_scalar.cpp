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

#include "kernels_impl.hpp"

#include <cmath>

namespace jointgap::kernels::detail {

void abs_diff_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::fabs(a[i] - b[i]);
    }
}

void lerp_gather_scalar(const double* src, const std::uint64_t* idx, const double* w,
                        double* out, std::size_t n) {
    // (1-w)*lo + w*hi rather than lo + w*(hi-lo): returns the endpoints
    // exactly at w == 0 and w == 1.
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = src[idx[i]];
        const double hi = src[idx[i] + 1];
        out[i] = (1.0 - w[i]) * lo + w[i] * hi;
    }
}

std::size_t count_above_scalar(const double* x, std::size_t n, double threshold) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(x[i]) > threshold) {
            ++count;
        }
    }
    return count;
}

double max_abs_scalar(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > m) {
            m = v;
        }
    }
    return m;
}

}  // namespace jointgap::kernels::detail
