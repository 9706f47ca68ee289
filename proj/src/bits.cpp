// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <bit>

#include "cpuf/bits.hpp"
#include "cpuf/errors.hpp"
#include "cpuf/kernels.hpp"

namespace cpuf {

Bits Bits::from_bytes(std::vector<uint8_t> bytes) {
    const size_t nbits = bytes.size() * 8;
    return from_bytes(std::move(bytes), nbits);
}

Bits Bits::from_bytes(std::vector<uint8_t> bytes, size_t nbits) {
    if (nbits > bytes.size() * 8)
        throw InvalidLengthError("bit count exceeds byte buffer");
    Bits b;
    b.bytes_ = std::move(bytes);
    b.nbits_ = nbits;
    b.bytes_.resize((nbits + 7) / 8);
    // Clear any slack bits past the end so equality stays well defined.
    if (nbits % 8 != 0 && !b.bytes_.empty())
        b.bytes_.back() &= uint8_t(0xFF00u >> (nbits % 8));
    return b;
}

uint32_t Bits::extract(size_t bit_off, unsigned width) const {
    if (width == 8 && (bit_off & 7) == 0) return bytes_[bit_off >> 3];
    uint32_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | uint32_t(get(bit_off + i));
    return v;
}

void Bits::inject(size_t bit_off, unsigned width, uint32_t value) {
    if (width == 8 && (bit_off & 7) == 0) {
        bytes_[bit_off >> 3] = uint8_t(value);
        return;
    }
    for (unsigned i = 0; i < width; ++i) set(bit_off + i, (value >> (width - 1 - i)) & 1u);
}

uint64_t Bits::popcount() const {
    uint64_t c = 0;
    for (uint8_t b : bytes_) c += std::popcount(uint32_t(b));
    return c;
}

std::string Bits::to_string() const {
    std::string s = "0b";
    for (size_t i = 0; i < nbits_; ++i) s.push_back(get(i) ? '1' : '0');
    return s;
}

uint64_t hamming(const Bits& a, const Bits& b) {
    if (a.size() != b.size())
        throw InvalidLengthError("hamming: length mismatch (" + std::to_string(a.size()) + " vs " +
                                 std::to_string(b.size()) + " bits)");
    return kernels::hamming_distance(a.bytes().data(), b.bytes().data(), a.bytes().size());
}

} // namespace cpuf
