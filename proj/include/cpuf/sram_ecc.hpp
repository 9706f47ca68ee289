// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cpuf/bits.hpp"

namespace cpuf {

/// Error-correction data for one start-up value: the concatenation of
/// per-segment words D_s = repSeg_s XOR s, where repSeg_s replicates
/// the segment's majority bit. |data| always equals the start-up value
/// length, so at 8-bit segments D is one byte per golden byte.
///
/// D_s reveals the golden segment up to complement (given the majority
/// bit, s = D_s XOR repSeg_s), so this data is treated as public
/// challenge material, never as key material.
struct EccData {
    unsigned segment_bits = 8;
    Bits data;

    size_t segment_count() const { return segment_bits ? data.size() / segment_bits : 0; }
    bool empty() const { return data.empty(); }

    bool operator==(const EccData&) const = default;
};

/// One representative (majority) bit per segment, in segment order.
struct CorrectedValue {
    Bits bits;

    bool operator==(const CorrectedValue&) const = default;
};

constexpr unsigned kDefaultSegmentBits = 8;

/// Builds error-correction data from a golden start-up value. Per
/// non-overlapping segment s: majority bit repBit_s (ties toward 1),
/// repSeg_s = repBit_s replicated, D_s = repSeg_s XOR s.
EccData gen_err_corr_data(const Bits& golden_startup, unsigned segment_bits = kDefaultSegmentBits);

/// Corrects an erroneous start-up value: per segment, corSeg_s =
/// D_s XOR s_err, and the output bit is corSeg_s's majority (ties
/// toward 1). Recovers the golden majority vector whenever each
/// segment carries at most floor((N-1)/2) bit-errors; at exactly N/2
/// errors it still succeeds iff the golden majority bit is 1.
CorrectedValue corr_startup_val(const Bits& erroneous_startup, unsigned segment_bits,
                                const EccData& ecc);

/// Majority bit of every segment of v (ties toward 1). This is what a
/// zero-error correction reproduces.
Bits segment_majority(const Bits& v, unsigned segment_bits);

} // namespace cpuf
