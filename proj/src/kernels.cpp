// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>

#include "cpuf/kernels.hpp"

// Runtime backend selection. Decided once per process; CPUF_KERNELS=scalar
// forces the reference path (used by the equivalence tests).

namespace cpuf::kernels {

namespace {

struct Backend {
    const char* name;
    void (*prf_fill)(PrfKey, uint64_t, size_t, uint32_t*, uint32_t*);
    uint64_t (*hamming)(const uint8_t*, const uint8_t*, size_t);
    void (*xor_bytes)(uint8_t*, const uint8_t*, const uint8_t*, size_t);
};

Backend select_backend() {
    const char* forced = std::getenv("CPUF_KERNELS");
    const bool force_scalar = forced && std::strcmp(forced, "scalar") == 0;
#if defined(CPUF_HAVE_AVX2_KERNELS)
    if (!force_scalar && avx2::supported())
        return Backend{"avx2", &avx2::prf_fill, &avx2::hamming_distance, &avx2::xor_bytes};
#else
    (void)force_scalar;
#endif
    return Backend{"scalar", &scalar::prf_fill, &scalar::hamming_distance, &scalar::xor_bytes};
}

const Backend& backend() {
    static const Backend b = select_backend();
    return b;
}

} // namespace

const char* active_backend() { return backend().name; }

void prf_fill(PrfKey key, uint64_t first, size_t n, uint32_t* out0, uint32_t* out1) {
    backend().prf_fill(key, first, n, out0, out1);
}

uint64_t hamming_distance(const uint8_t* a, const uint8_t* b, size_t n) {
    return backend().hamming(a, b, n);
}

void xor_bytes(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n) {
    backend().xor_bytes(dst, a, b, n);
}

} // namespace cpuf::kernels
