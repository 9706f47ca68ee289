// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <string>

#include "cpuf/errors.hpp"
#include "cpuf/sram_ecc.hpp"

namespace cpuf {

namespace {

void check_segmentation(size_t nbits, unsigned segment_bits, const char* what) {
    if (segment_bits < 2 || segment_bits > 32)
        throw InvalidArgumentError(std::string(what) + ": segment width " +
                                   std::to_string(segment_bits) + " outside [2, 32]");
    if (nbits == 0 || nbits % segment_bits != 0)
        throw InvalidLengthError(std::string(what) + ": " + std::to_string(nbits) +
                                 " bits not divisible into " + std::to_string(segment_bits) +
                                 "-bit segments");
}

inline bool majority_bit(uint32_t segment, unsigned width) {
    // Ties resolve to 1: ones >= zeros.
    const unsigned ones = unsigned(std::popcount(segment));
    return 2 * ones >= width;
}

} // namespace

EccData gen_err_corr_data(const Bits& golden_startup, unsigned segment_bits) {
    check_segmentation(golden_startup.size(), segment_bits, "gen_err_corr_data");
    const uint32_t seg_mask =
        segment_bits == 32 ? 0xFFFFFFFFu : ((uint32_t(1) << segment_bits) - 1);

    EccData ecc;
    ecc.segment_bits = segment_bits;
    ecc.data = Bits(golden_startup.size());
    for (size_t off = 0; off < golden_startup.size(); off += segment_bits) {
        const uint32_t seg = golden_startup.extract(off, segment_bits);
        const uint32_t rep_seg = majority_bit(seg, segment_bits) ? seg_mask : 0u;
        ecc.data.inject(off, segment_bits, rep_seg ^ seg);
    }
    return ecc;
}

CorrectedValue corr_startup_val(const Bits& erroneous_startup, unsigned segment_bits,
                                const EccData& ecc) {
    check_segmentation(erroneous_startup.size(), segment_bits, "corr_startup_val");
    if (ecc.segment_bits != segment_bits)
        throw InvalidLengthError("corr_startup_val: correction data was generated with " +
                                 std::to_string(ecc.segment_bits) + "-bit segments, not " +
                                 std::to_string(segment_bits));
    if (ecc.data.size() != erroneous_startup.size())
        throw InvalidLengthError("corr_startup_val: correction data covers " +
                                 std::to_string(ecc.data.size()) + " bits, start-up value has " +
                                 std::to_string(erroneous_startup.size()));

    CorrectedValue cv;
    cv.bits = Bits(erroneous_startup.size() / segment_bits);
    size_t s = 0;
    for (size_t off = 0; off < erroneous_startup.size(); off += segment_bits, ++s) {
        const uint32_t cor_seg =
            ecc.data.extract(off, segment_bits) ^ erroneous_startup.extract(off, segment_bits);
        cv.bits.set(s, majority_bit(cor_seg, segment_bits));
    }
    return cv;
}

Bits segment_majority(const Bits& v, unsigned segment_bits) {
    check_segmentation(v.size(), segment_bits, "segment_majority");
    Bits out(v.size() / segment_bits);
    size_t s = 0;
    for (size_t off = 0; off < v.size(); off += segment_bits, ++s)
        out.set(s, majority_bit(v.extract(off, segment_bits), segment_bits));
    return out;
}

} // namespace cpuf
