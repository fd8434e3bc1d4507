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

#include "jointgap/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "jointgap/errors.hpp"
#include "kernels_impl.hpp"

namespace jointgap::kernels {

namespace {

const KernelTable kScalarTable = {
    detail::abs_diff_scalar,
    detail::lerp_gather_scalar,
    detail::count_above_scalar,
    detail::max_abs_scalar,
};

#if JOINTGAP_X86
const KernelTable kAvx2Table = {
    detail::abs_diff_avx2,
    detail::lerp_gather_avx2,
    detail::count_above_avx2,
    detail::max_abs_avx2,
};
#endif

Backend detect_backend() {
    const char* env = std::getenv("JOINTGAP_KERNELS");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) {
            return Backend::Scalar;
        }
        if (std::strcmp(env, "avx2") == 0) {
            // Requested but unsupported falls back to scalar rather than
            // aborting batch runs on older machines.
            return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
        }
        // Anything else, including "auto", falls through to detection.
    }
    return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

bool avx2_supported() {
#if JOINTGAP_X86
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const KernelTable& table(Backend backend) {
    if (backend == Backend::Avx2) {
#if JOINTGAP_X86
        if (avx2_supported()) {
            return kAvx2Table;
        }
#endif
        throw ValidationError("AVX2 kernel backend requested but not supported on this CPU");
    }
    return kScalarTable;
}

Backend active_backend() {
    static const Backend backend = detect_backend();
    return backend;
}

const KernelTable& active_table() {
    static const KernelTable& t = table(active_backend());
    return t;
}

const char* backend_name(Backend backend) {
    return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace jointgap::kernels
