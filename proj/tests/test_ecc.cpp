// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <random>

#include "cpuf/sram_ecc.hpp"
#include "cpuf/errors.hpp"

using namespace cpuf;

namespace {

Bits bits_from_byte(uint8_t b) { return Bits::from_bytes({b}); }

// Independent majority oracle: counts ones per segment directly on the
// raw bits, with the tie resolving to 1.
Bits majority_oracle(const Bits& v, unsigned n) {
    Bits out(v.size() / n);
    for (size_t s = 0; s < out.size(); ++s) {
        unsigned ones = 0;
        for (unsigned i = 0; i < n; ++i) ones += v.get(s * n + i);
        out.set(s, 2 * ones >= n);
    }
    return out;
}

Bits random_bits(std::mt19937_64& gen, size_t nbits) {
    Bits b(nbits);
    for (size_t i = 0; i < nbits; ++i) b.set(i, gen() & 1);
    return b;
}

} // namespace

TEST_CASE("hand-traced generation: 0b11110000 at N=8") {
    // ones = zeros = 4, tie resolves to 1: repSeg = 0xFF, D = 0x0F.
    const EccData ecc = gen_err_corr_data(bits_from_byte(0xF0), 8);
    CHECK(ecc.data.bytes().size() == 1);
    CHECK(ecc.data.bytes()[0] == 0x0F);
    CHECK(ecc.segment_count() == 1);
}

TEST_CASE("all-ones and all-zeros golden values produce zero correction data") {
    const EccData ones = gen_err_corr_data(bits_from_byte(0xFF), 8);
    CHECK(ones.data.bytes()[0] == 0x00);
    const EccData zeros = gen_err_corr_data(bits_from_byte(0x00), 8);
    CHECK(zeros.data.bytes()[0] == 0x00);
    // They decode to opposite representative bits.
    CHECK(corr_startup_val(bits_from_byte(0xFF), 8, ones).bits.get(0) == true);
    CHECK(corr_startup_val(bits_from_byte(0x00), 8, zeros).bits.get(0) == false);
}

TEST_CASE("hand-traced correction: one bit-error against 0b11110000") {
    const EccData ecc = gen_err_corr_data(bits_from_byte(0xF0), 8);
    // Erroneous reading 0b01110000: corSeg = 0x0F ^ 0x70 = 0x7F, seven
    // ones, representative bit 1 — the golden majority bit.
    const CorrectedValue cv = corr_startup_val(bits_from_byte(0x70), 8, ecc);
    CHECK(cv.bits.size() == 1);
    CHECK(cv.bits.get(0) == true);
}

TEST_CASE("zero errors reproduce the segment majority of any golden value") {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Bits golden = random_bits(gen, 256);
        const EccData ecc = gen_err_corr_data(golden, 8);
        const CorrectedValue cv = corr_startup_val(golden, 8, ecc);
        CHECK(cv.bits == majority_oracle(golden, 8));
        CHECK(cv.bits == segment_majority(golden, 8));
    }
}

TEST_CASE("exhaustive single-segment behaviour at N=8") {
    // For every golden byte and every error pattern: correction
    // reproduces the golden majority bit exactly when the error weight
    // is at most 3, or equals 4 with golden majority 1 (the tie case).
    for (unsigned golden = 0; golden < 256; ++golden) {
        const Bits g = bits_from_byte(uint8_t(golden));
        const EccData ecc = gen_err_corr_data(g, 8);
        const bool rep = 2 * unsigned(std::popcount(golden)) >= 8;
        for (unsigned err = 0; err < 256; ++err) {
            const unsigned weight = unsigned(std::popcount(err));
            const Bits read = bits_from_byte(uint8_t(golden ^ err));
            const bool corrected = corr_startup_val(read, 8, ecc).bits.get(0);
            const bool should_succeed = weight <= 3 || (weight == 4 && rep);
            if (should_succeed)
                CHECK(corrected == rep);
            else if (weight == 4)
                CHECK(corrected != rep); // failed ties always break toward 1
        }
    }
}

TEST_CASE("perfect correction bound holds for every segment width") {
    // Random golden values at several widths; all error patterns of
    // weight <= floor((N-1)/2) in one segment must correct.
    std::mt19937_64 gen(2);
    for (unsigned n : {2u, 3u, 4u, 5u, 8u, 12u, 16u}) {
        const size_t segments = 6;
        const Bits golden = random_bits(gen, n * segments);
        const EccData ecc = gen_err_corr_data(golden, n);
        const Bits expect = majority_oracle(golden, n);
        const unsigned max_w = (n - 1) / 2;
        for (size_t seg = 0; seg < segments; ++seg) {
            for (uint32_t err = 0; err < (1u << n); ++err) {
                if (unsigned(std::popcount(err)) > max_w) continue;
                Bits read = golden;
                read.inject(seg * n, n, read.extract(seg * n, n) ^ err);
                CHECK(corr_startup_val(read, n, ecc).bits == expect);
            }
        }
    }
}

TEST_CASE("correction data equals repSeg xor segment, re-derivable from golden") {
    std::mt19937_64 gen(3);
    const Bits golden = random_bits(gen, 128);
    const EccData ecc = gen_err_corr_data(golden, 8);
    for (size_t seg = 0; seg < 16; ++seg) {
        const uint32_t s = golden.extract(seg * 8, 8);
        const uint32_t rep = (2 * unsigned(std::popcount(s)) >= 8) ? 0xFFu : 0x00u;
        CHECK(ecc.data.extract(seg * 8, 8) == (rep ^ s));
    }
    // Helper data is public: D_s plus the majority bit reveals the
    // segment, so nothing here may ever be treated as secret.
    for (size_t seg = 0; seg < 16; ++seg) {
        const uint32_t d = ecc.data.extract(seg * 8, 8);
        const uint32_t rep = segment_majority(golden, 8).get(seg) ? 0xFFu : 0x00u;
        CHECK((d ^ rep) == golden.extract(seg * 8, 8));
    }
}

TEST_CASE("length contract and error paths") {
    std::mt19937_64 gen(4);
    const Bits golden = random_bits(gen, 256);
    const EccData ecc = gen_err_corr_data(golden, 8);
    CHECK(ecc.data.size() == golden.size());
    CHECK(corr_startup_val(golden, 8, ecc).bits.size() == golden.size() / 8);

    CHECK_THROWS_AS(gen_err_corr_data(random_bits(gen, 20), 8), InvalidLengthError);
    CHECK_THROWS_AS(gen_err_corr_data(Bits(0), 8), InvalidLengthError);
    CHECK_THROWS_AS(gen_err_corr_data(golden, 1), InvalidArgumentError);
    CHECK_THROWS_AS(corr_startup_val(random_bits(gen, 248), 8, ecc), InvalidLengthError);
    // Width disagreement between the data and the correction call.
    CHECK_THROWS_AS(corr_startup_val(golden, 4, ecc), InvalidLengthError);
}
