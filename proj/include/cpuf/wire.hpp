// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "cpuf/errors.hpp"

// Canonical byte encodings: little-endian fixed-width integers, doubles
// as their IEEE-754 bit pattern, byte fields length-prefixed. Every
// serialized artifact (challenges, responses, CRP databases) uses these
// helpers so round-trips are byte-exact.

namespace cpuf::wire {

class Writer {
public:
    void u8(uint8_t v) { out_.push_back(v); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(uint8_t(v >> (8 * i)));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(uint8_t(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void bytes(std::span<const uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void prefixed_bytes(std::span<const uint8_t> b) {
        u64(b.size());
        bytes(b);
    }

    const std::vector<uint8_t>& data() const { return out_; }
    std::vector<uint8_t> take() { return std::move(out_); }

private:
    std::vector<uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return take(1)[0]; }
    uint32_t u32() {
        auto b = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(b[i]) << (8 * i);
        return v;
    }
    uint64_t u64() {
        auto b = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(b[i]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::vector<uint8_t> bytes(size_t n) {
        auto b = take(n);
        return std::vector<uint8_t>(b.begin(), b.end());
    }
    std::vector<uint8_t> prefixed_bytes() { return bytes(u64()); }

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

private:
    std::span<const uint8_t> take(size_t n) {
        if (pos_ + n > data_.size())
            throw FormatError("truncated input: need " + std::to_string(n) + " bytes at offset " +
                              std::to_string(pos_));
        auto s = data_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

} // namespace cpuf::wire
