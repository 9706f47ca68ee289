// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cpuf {

/// Fixed-length bit vector, MSB-first within each byte.
///
/// Bit index 0 is the most significant bit of byte 0, so the textual
/// reading order of a value like 0b11110000 matches bit order 0..7.
/// The same convention is used for SRAM start-up values, corrected
/// values, error-correction data and DRAM cell addressing.
class Bits {
public:
    Bits() = default;
    explicit Bits(size_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}

    static Bits from_bytes(std::vector<uint8_t> bytes);
    static Bits from_bytes(std::vector<uint8_t> bytes, size_t nbits);

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }
    void set(size_t i, bool v) {
        const uint8_t mask = uint8_t(0x80u >> (i & 7));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= uint8_t(~mask);
    }
    void flip(size_t i) { bytes_[i >> 3] ^= uint8_t(0x80u >> (i & 7)); }

    /// Reads `width` (<= 32) consecutive bits starting at `bit_off`,
    /// returned right-aligned with bit_off landing in the MSB.
    uint32_t extract(size_t bit_off, unsigned width) const;
    /// Writes `width` (<= 32) consecutive bits starting at `bit_off`.
    void inject(size_t bit_off, unsigned width, uint32_t value);

    uint64_t popcount() const;

    const std::vector<uint8_t>& bytes() const { return bytes_; }
    std::vector<uint8_t>& bytes() { return bytes_; }

    std::string to_string() const; // "0b..." for small values, debugging aid

    bool operator==(const Bits& other) const = default;

private:
    std::vector<uint8_t> bytes_;
    size_t nbits_ = 0;
};

/// Hamming distance between two equal-length bit vectors.
uint64_t hamming(const Bits& a, const Bits& b);

} // namespace cpuf
