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

// Compiled with -mavx2 only; callers go through the runtime-dispatched
// table so this TU is never entered on CPUs without AVX2.

#include "kernels_impl.hpp"

#if JOINTGAP_X86

#include <immintrin.h>

#include <cmath>

namespace jointgap::kernels::detail {

namespace {

// Clears the sign bit, same as std::fabs.
inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

inline double hmax_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

}  // namespace

void abs_diff_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(out + i, abs_pd(_mm256_sub_pd(va, vb)));
    }
    for (; i < n; ++i) {
        out[i] = std::fabs(a[i] - b[i]);
    }
}

void lerp_gather_avx2(const double* src, const std::uint64_t* idx, const double* w,
                      double* out, std::size_t n) {
    // No FMA: separate mul/mul/add keeps the rounding identical to the
    // scalar (1-w)*lo + w*hi expression.
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256i vidx =
            _mm256_loadu_si256(reinterpret_cast<const __m256i*>(idx + i));
        const __m256i vidx1 = _mm256_add_epi64(vidx, _mm256_set1_epi64x(1));
        const __m256d lo = _mm256_i64gather_pd(src, vidx, 8);
        const __m256d hi = _mm256_i64gather_pd(src, vidx1, 8);
        const __m256d vw = _mm256_loadu_pd(w + i);
        const __m256d left = _mm256_mul_pd(_mm256_sub_pd(one, vw), lo);
        const __m256d right = _mm256_mul_pd(vw, hi);
        _mm256_storeu_pd(out + i, _mm256_add_pd(left, right));
    }
    for (; i < n; ++i) {
        const double lo = src[idx[i]];
        const double hi = src[idx[i] + 1];
        out[i] = (1.0 - w[i]) * lo + w[i] * hi;
    }
}

std::size_t count_above_avx2(const double* x, std::size_t n, double threshold) {
    const __m256d vthr = _mm256_set1_pd(threshold);
    std::size_t count = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = abs_pd(_mm256_loadu_pd(x + i));
        const __m256d gt = _mm256_cmp_pd(v, vthr, _CMP_GT_OQ);
        count += static_cast<std::size_t>(__builtin_popcount(
            static_cast<unsigned>(_mm256_movemask_pd(gt))));
    }
    for (; i < n; ++i) {
        if (std::fabs(x[i]) > threshold) {
            ++count;
        }
    }
    return count;
}

double max_abs_avx2(const double* x, std::size_t n) {
    // max is exact in floating point, so the lane-wise reduction matches the
    // scalar loop bit for bit.
    __m256d vmax = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vmax = _mm256_max_pd(vmax, abs_pd(_mm256_loadu_pd(x + i)));
    }
    double m = hmax_pd(vmax);
    for (; i < n; ++i) {
        const double v = std::fabs(x[i]);
        if (v > m) {
            m = v;
        }
    }
    return m;
}

}  // namespace jointgap::kernels::detail

#endif  // JOINTGAP_X86
