// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cstring>

#include "cpuf/kernels.hpp"

// Reference kernels. Philox4x32-10 follows the original round
// constants; the scalar block function is the ground truth the AVX2
// batch variant is tested against.

namespace cpuf::kernels {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    const uint64_t p = uint64_t(a) * uint64_t(b);
    hi = uint32_t(p >> 32);
    lo = uint32_t(p);
}

} // namespace

uint64_t mix64(uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

PrfKey make_key(uint64_t seed, std::string_view label) {
    // FNV-1a over the label, folded into the seed through splitmix.
    uint64_t h = 0xCBF29CE484222325ull;
    for (char c : label) {
        h ^= uint8_t(c);
        h *= 0x100000001B3ull;
    }
    const uint64_t k = mix64(seed ^ mix64(h));
    return PrfKey{uint32_t(k), uint32_t(k >> 32)};
}

PrfBlock prf_block(PrfKey key, uint64_t index) {
    uint32_t x0 = uint32_t(index);
    uint32_t x1 = uint32_t(index >> 32);
    uint32_t x2 = 0;
    uint32_t x3 = 0;
    uint32_t k0 = key.k0;
    uint32_t k1 = key.k1;
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, x0, hi0, lo0);
        mulhilo(kPhiloxM1, x2, hi1, lo1);
        const uint32_t n0 = hi1 ^ x1 ^ k0;
        const uint32_t n1 = lo1;
        const uint32_t n2 = hi0 ^ x3 ^ k1;
        const uint32_t n3 = lo0;
        x0 = n0;
        x1 = n1;
        x2 = n2;
        x3 = n3;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return PrfBlock{{x0, x1, x2, x3}};
}

namespace scalar {

void prf_fill(PrfKey key, uint64_t first, size_t n, uint32_t* out0, uint32_t* out1) {
    for (size_t i = 0; i < n; ++i) {
        const PrfBlock b = prf_block(key, first + i);
        out0[i] = b.w[0];
        if (out1) out1[i] = b.w[1];
    }
}

uint64_t hamming_distance(const uint8_t* a, const uint8_t* b, size_t n) {
    uint64_t count = 0;
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint64_t wa, wb;
        std::memcpy(&wa, a + i, 8);
        std::memcpy(&wb, b + i, 8);
        count += std::popcount(wa ^ wb);
    }
    for (; i < n; ++i) count += std::popcount(uint32_t(a[i] ^ b[i]));
    return count;
}

void xor_bytes(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint64_t wa, wb;
        std::memcpy(&wa, a + i, 8);
        std::memcpy(&wb, b + i, 8);
        wa ^= wb;
        std::memcpy(dst + i, &wa, 8);
    }
    for (; i < n; ++i) dst[i] = uint8_t(a[i] ^ b[i]);
}

} // namespace scalar

void prf_fill_bytes(PrfKey key, uint64_t first_block, uint8_t* out, size_t n) {
    // Word-0 lane of consecutive blocks, serialized little-endian.
    uint64_t block = first_block;
    size_t produced = 0;
    uint32_t w[256];
    while (produced < n) {
        const size_t words_left = (n - produced + 3) / 4;
        const size_t batch = std::min<size_t>(256, words_left);
        prf_fill(key, block, batch, w, nullptr);
        for (size_t i = 0; i < batch && produced < n; ++i)
            for (int sh = 0; sh < 4 && produced < n; ++sh) out[produced++] = uint8_t(w[i] >> (8 * sh));
        block += batch;
    }
}

} // namespace cpuf::kernels
