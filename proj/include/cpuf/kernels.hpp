// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops of the simulator: the counter-based PRF that
// derives per-cell manufacturing parameters, bulk XOR, and Hamming
// distance over response buffers. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant selected at runtime.
// The two variants are bit-for-bit equivalent and equivalence-tested.

namespace cpuf::kernels {

/// 64-bit PRF key, expanded from a seed and a domain label.
struct PrfKey {
    uint32_t k0 = 0;
    uint32_t k1 = 0;
};

/// Derives an independent key for one (seed, label) stream. Distinct
/// labels give statistically independent value fields from one seed.
PrfKey make_key(uint64_t seed, std::string_view label);

/// One Philox4x32-10 block for counter {index_lo, index_hi, 0, 0}.
struct PrfBlock {
    uint32_t w[4];
};
PrfBlock prf_block(PrfKey key, uint64_t index);

/// Fills out0[i] (and out1[i] when non-null) with words 0 and 1 of the
/// PRF block at index first+i, for i in [0, n). Dispatched.
void prf_fill(PrfKey key, uint64_t first, size_t n, uint32_t* out0, uint32_t* out1);

/// Deterministic byte stream: bytes of the word-0 lane of consecutive
/// PRF blocks, starting at block index `first_block`.
void prf_fill_bytes(PrfKey key, uint64_t first_block, uint8_t* out, size_t n);

/// Number of differing bits between a and b (n bytes each). Dispatched.
uint64_t hamming_distance(const uint8_t* a, const uint8_t* b, size_t n);

/// dst[i] = a[i] ^ b[i]; dst may alias a or b. Dispatched.
void xor_bytes(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n);

/// Name of the active backend: "avx2" or "scalar". Selection happens
/// once per process; set CPUF_KERNELS=scalar to force the reference
/// implementation.
const char* active_backend();

// Reference implementations, always available; the dispatched entry
// points above must agree with these exactly.
namespace scalar {
void prf_fill(PrfKey key, uint64_t first, size_t n, uint32_t* out0, uint32_t* out1);
uint64_t hamming_distance(const uint8_t* a, const uint8_t* b, size_t n);
void xor_bytes(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define CPUF_HAVE_AVX2_KERNELS 1
namespace avx2 {
bool supported();
void prf_fill(PrfKey key, uint64_t first, size_t n, uint32_t* out0, uint32_t* out1);
uint64_t hamming_distance(const uint8_t* a, const uint8_t* b, size_t n);
void xor_bytes(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n);
} // namespace avx2
#endif

/// splitmix64 finalizer; used for seed fan-out and label hashing.
uint64_t mix64(uint64_t x);

} // namespace cpuf::kernels
