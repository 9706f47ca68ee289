// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <string>

#include "cpuf/kernels.hpp"
#include "cpuf/pipeline.hpp"
#include "cpuf/sha256.hpp"

namespace cpuf {

void Challenge::validate(const DeviceInstance& device, unsigned segment_bits,
                         bool require_ecc) const {
    if (size_s == 0 || (size_s * 8) % segment_bits != 0)
        throw InvalidLengthError("challenge " + std::to_string(id) + ": size_s of " +
                                 std::to_string(size_s) + " bytes does not divide into " +
                                 std::to_string(segment_bits) + "-bit segments");
    if (size_d == 0 || size_d % kHashChunkBytes != 0)
        throw InvalidLengthError("challenge " + std::to_string(id) + ": size_d must be a positive multiple of " +
                                 std::to_string(kHashChunkBytes) + " bytes");
    if (bitstream_c.size() != size_d)
        throw InvalidLengthError("challenge " + std::to_string(id) + ": bitstream_c is " +
                                 std::to_string(bitstream_c.size()) + " bytes, size_d is " +
                                 std::to_string(size_d));
    if (addr_s > device.sram_bytes() || size_s > device.sram_bytes() - addr_s)
        throw OutOfRangeError("challenge " + std::to_string(id) + ": SRAM region out of range");
    if (addr_d < kGuardBandBytes || addr_d > device.dram_bytes() ||
        size_d + kGuardBandBytes > device.dram_bytes() - addr_d)
        throw OutOfRangeError("challenge " + std::to_string(id) +
                              ": DRAM region plus guard bands out of range");
    if (!(refresh_pause_s >= 0.0))
        throw InvalidArgumentError("challenge " + std::to_string(id) + ": negative refresh pause");
    if (require_ecc) {
        if (ecc.empty())
            throw InvalidArgumentError("challenge " + std::to_string(id) +
                                       ": error-correction data missing");
        if (ecc.segment_bits != segment_bits || ecc.data.size() != size_s * 8)
            throw InvalidLengthError("challenge " + std::to_string(id) +
                                     ": error-correction data inconsistent with size_s");
    }
}

std::vector<uint8_t> xor_stage(const CorrectedValue& cv, std::span<const uint8_t> bitstream_c) {
    if (cv.bits.empty()) throw InvalidArgumentError("xor_stage: empty corrected value");
    if (bitstream_c.empty()) throw InvalidArgumentError("xor_stage: empty bitstream");

    // Expand the cyclic tiling of cv once over lcm(|cv|, 8) bits, then
    // replicate bytewise across the full length.
    const size_t cv_bits = cv.bits.size();
    const size_t tile_bits = std::lcm(cv_bits, size_t(8));
    const size_t tile_bytes = tile_bits / 8;
    std::vector<uint8_t> tile(tile_bytes, 0);
    for (size_t p = 0; p < tile_bits; ++p)
        if (cv.bits.get(p % cv_bits)) tile[p >> 3] |= uint8_t(0x80u >> (p & 7));

    std::vector<uint8_t> pattern(bitstream_c.size());
    for (size_t i = 0; i < pattern.size(); ++i) pattern[i] = tile[i % tile_bytes];

    std::vector<uint8_t> out(bitstream_c.size());
    kernels::xor_bytes(out.data(), bitstream_c.data(), pattern.data(), out.size());
    return out;
}

std::vector<uint8_t> hash_stage(std::span<const uint8_t> xored) {
    if (xored.empty() || xored.size() % kHashChunkBytes != 0)
        throw InvalidLengthError("hash_stage: input of " + std::to_string(xored.size()) +
                                 " bytes is not a positive multiple of " +
                                 std::to_string(kHashChunkBytes));
    std::vector<uint8_t> out(xored.size());
    for (size_t off = 0; off < xored.size(); off += kHashChunkBytes) {
        const auto digest = sha256(xored.subspan(off, kHashChunkBytes));
        std::copy(digest.begin(), digest.end(), out.begin() + off);
    }
    return out;
}

namespace {

Response run_pipeline(const DeviceInstance& device, const Challenge& challenge,
                      const Environment& env, bool use_hash) {
    challenge.validate(device, challenge.ecc.segment_bits, /*require_ecc=*/true);

    const Bits v_err = sram_power_up(device, {challenge.addr_s, challenge.size_s}, env);
    const CorrectedValue cv = corr_startup_val(v_err, challenge.ecc.segment_bits, challenge.ecc);
    std::vector<uint8_t> data = xor_stage(cv, challenge.bitstream_c);
    if (use_hash) data = hash_stage(data);
    std::vector<uint8_t> readout =
        dram_refresh_pause(device, {challenge.addr_d, challenge.size_d}, data, challenge.wrapper,
                           challenge.refresh_pause_s, env);
    return Response{challenge.id, std::move(readout)};
}

} // namespace

Response generate_response(const DeviceInstance& device, const Challenge& challenge,
                           const Environment& env) {
    return run_pipeline(device, challenge, env, true);
}

Response generate_response_no_hash(const DeviceInstance& device, const Challenge& challenge,
                                   const Environment& env) {
    return run_pipeline(device, challenge, env, false);
}

Response client_generate_response(const DeviceInstance& device, const ClientEpoch& epoch,
                                  const Challenge& challenge, const Environment& env,
                                  bool use_hash) {
    return run_pipeline(device, epoch.apply(challenge), env, use_hash);
}

void serialize_challenge(const Challenge& c, wire::Writer& w) {
    w.u64(c.id);
    w.u64(c.addr_s);
    w.u64(c.size_s);
    w.u32(uint32_t(c.ecc.data.bytes().size()));
    w.bytes(c.ecc.data.bytes());
    w.prefixed_bytes(c.bitstream_c);
    w.u64(c.addr_d);
    w.u64(c.size_d);
    w.u8(uint8_t(c.wrapper));
    w.f64(c.refresh_pause_s);
}

Challenge deserialize_challenge(wire::Reader& r, unsigned segment_bits) {
    Challenge c;
    c.id = r.u64();
    c.addr_s = r.u64();
    c.size_s = r.u64();
    const uint32_t ecc_len = r.u32();
    if (ecc_len > 0) {
        c.ecc.segment_bits = segment_bits;
        c.ecc.data = Bits::from_bytes(r.bytes(ecc_len));
    }
    c.bitstream_c = r.prefixed_bytes();
    c.addr_d = r.u64();
    c.size_d = r.u64();
    const uint8_t wrapper = r.u8();
    if (wrapper >= kWrapperKinds) throw FormatError("challenge: bad wrapper kind");
    c.wrapper = WrapperPattern(wrapper);
    c.refresh_pause_s = r.f64();
    return c;
}

void serialize_response(const Response& resp, wire::Writer& w) {
    w.u64(resp.id);
    w.prefixed_bytes(resp.bitstream_r);
}

Response deserialize_response(wire::Reader& r) {
    Response resp;
    resp.id = r.u64();
    resp.bitstream_r = r.prefixed_bytes();
    return resp;
}

} // namespace cpuf
