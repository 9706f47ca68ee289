// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace cpuf {

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile function, p in (0, 1). Solved by Newton
/// iteration on normal_cdf from a rational starting guess; accurate to
/// ~1e-14 and fully deterministic for a given libm.
double inverse_normal_cdf(double p);

/// Maps a 32-bit PRF word to the open interval (0, 1): (w + 0.5) / 2^32.
double uniform_from_u32(uint32_t w);

/// Standard normal variate derived from one PRF word.
double normal_from_u32(uint32_t w);

/// Integer threshold U in [0, 2^32] such that comparing a PRF word
/// w < U is equivalent (up to the 2^-32 grid) to testing
/// normal_from_u32(w) <= z. Monotone in z, so per-cell decisions made
/// this way inherit the monotonicity of the underlying model exactly.
uint64_t u32_threshold_for_z(double z);

} // namespace cpuf
