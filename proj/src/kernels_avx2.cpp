// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include "cpuf/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

namespace cpuf::kernels::avx2 {

bool supported() {
#if defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

// High 32 bits of the lane-wise 32x32 product. mul_epu32 covers the
// even lanes; the odd lanes are shifted down, multiplied, and blended
// back into the odd slots.
inline __m256i mulhi_epu32(__m256i a, __m256i b) {
    const __m256i even = _mm256_mul_epu32(a, b);
    const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), _mm256_srli_epi64(b, 32));
    const __m256i himask = _mm256_set1_epi64x(int64_t(0xFFFFFFFF00000000ull));
    return _mm256_blend_epi32(_mm256_srli_epi64(even, 32), _mm256_and_si256(odd, himask), 0xAA);
}

} // namespace

void prf_fill(PrfKey key, uint64_t first, size_t n, uint32_t* out0, uint32_t* out1) {
    const __m256i m0 = _mm256_set1_epi32(int32_t(kPhiloxM0));
    const __m256i m1 = _mm256_set1_epi32(int32_t(kPhiloxM1));

    __m256i round_k0[10], round_k1[10];
    {
        uint32_t k0 = key.k0;
        uint32_t k1 = key.k1;
        for (int round = 0; round < 10; ++round) {
            round_k0[round] = _mm256_set1_epi32(int32_t(k0));
            round_k1[round] = _mm256_set1_epi32(int32_t(k1));
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
    }

    const __m256i lane_offsets = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);

    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        // Eight consecutive counters in struct-of-arrays form. The fast
        // path assumes the batch stays within one 2^32 window; batches
        // straddling the carry build their lanes explicitly.
        const uint64_t base = first + i;
        __m256i x0, x1;
        if (uint32_t(base) <= 0xFFFFFFF8u) {
            x0 = _mm256_add_epi32(_mm256_set1_epi32(int32_t(uint32_t(base))), lane_offsets);
            x1 = _mm256_set1_epi32(int32_t(uint32_t(base >> 32)));
        } else {
            alignas(32) uint32_t lo[8], hi[8];
            for (int lane = 0; lane < 8; ++lane) {
                const uint64_t idx = base + uint64_t(lane);
                lo[lane] = uint32_t(idx);
                hi[lane] = uint32_t(idx >> 32);
            }
            x0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(lo));
            x1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(hi));
        }
        __m256i x2 = _mm256_setzero_si256();
        __m256i x3 = _mm256_setzero_si256();

        for (int round = 0; round < 10; ++round) {
            const __m256i hi0 = mulhi_epu32(x0, m0);
            const __m256i lo0 = _mm256_mullo_epi32(x0, m0);
            const __m256i hi1 = mulhi_epu32(x2, m1);
            const __m256i lo1 = _mm256_mullo_epi32(x2, m1);
            x0 = _mm256_xor_si256(_mm256_xor_si256(hi1, x1), round_k0[round]);
            x1 = lo1;
            x2 = _mm256_xor_si256(_mm256_xor_si256(hi0, x3), round_k1[round]);
            x3 = lo0;
        }

        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out0 + i), x0);
        if (out1) _mm256_storeu_si256(reinterpret_cast<__m256i*>(out1 + i), x1);
    }

    if (i < n) scalar::prf_fill(key, first + i, n - i, out0 + i, out1 ? out1 + i : nullptr);
}

uint64_t hamming_distance(const uint8_t* a, const uint8_t* b, size_t n) {
    // Nibble-LUT popcount with SAD accumulation.
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1,
                                         2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0F);
    __m256i acc = _mm256_setzero_si256();

    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i x = _mm256_xor_si256(va, vb);
        const __m256i lo = _mm256_and_si256(x, low_mask);
        const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(x, 4), low_mask);
        const __m256i cnt =
            _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
    }

    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    uint64_t count = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    if (i < n) count += scalar::hamming_distance(a + i, b + i, n - i);
    return count;
}

void xor_bytes(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n) {
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_xor_si256(va, vb));
    }
    if (i < n) scalar::xor_bytes(dst + i, a + i, b + i, n - i);
}

} // namespace cpuf::kernels::avx2

#endif // x86-64
