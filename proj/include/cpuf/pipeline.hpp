// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpuf/entropy_models.hpp"
#include "cpuf/sram_ecc.hpp"
#include "cpuf/wire.hpp"

namespace cpuf {

/// Hash stage chunk width; equals the SHA-256 digest size so the stage
/// preserves length.
constexpr uint64_t kHashChunkBytes = 32;

constexpr uint64_t kDefaultSizeS = 32;                 // bytes
constexpr uint64_t kDefaultSizeD = 128ull * 1024;      // bytes
constexpr double kDefaultRefreshPauseS = 40.0;

/// The challenge record. addr_s and refresh_pause_s are reconfiguration
/// knobs: they stay constant across every challenge of one enrollment
/// epoch and only change when the PUF is reconfigured.
struct Challenge {
    uint64_t id = 0;
    uint64_t addr_s = 0;
    uint64_t size_s = kDefaultSizeS;
    EccData ecc;                      // empty until enrollment fills it
    std::vector<uint8_t> bitstream_c; // size_d bytes
    uint64_t addr_d = 0;
    uint64_t size_d = kDefaultSizeD;
    WrapperPattern wrapper = WrapperPattern::all_ones;
    double refresh_pause_s = kDefaultRefreshPauseS;

    /// Checks the structural invariants against a device's geometry.
    /// require_ecc distinguishes enrollment templates from runnable
    /// challenges.
    void validate(const DeviceInstance& device, unsigned segment_bits, bool require_ecc) const;

    bool operator==(const Challenge&) const = default;
};

struct Response {
    uint64_t id = 0;
    std::vector<uint8_t> bitstream_r;

    bool operator==(const Response&) const = default;
};

/// Client-held reconfiguration state. A device answers every challenge
/// with its current knob values, so challenges recorded before a
/// reconfiguration no longer reproduce their golden responses.
struct ClientEpoch {
    uint64_t addr_s = 0;
    double refresh_pause_s = kDefaultRefreshPauseS;

    Challenge apply(Challenge c) const {
        c.addr_s = addr_s;
        c.refresh_pause_s = refresh_pause_s;
        return c;
    }

    bool operator==(const ClientEpoch&) const = default;
};

/// XOR stage: bitstream_c XOR the corrected value tiled cyclically at
/// bit granularity, starting at bit 0. Output length equals the
/// bitstream_c length.
std::vector<uint8_t> xor_stage(const CorrectedValue& cv, std::span<const uint8_t> bitstream_c);

/// HASH stage: each consecutive 32-byte chunk is replaced by its
/// SHA-256 digest. Length-preserving; input must be a multiple of 32.
std::vector<uint8_t> hash_stage(std::span<const uint8_t> xored);

/// Full response generation: SRAM power-up, error correction, XOR,
/// HASH, DRAM write + refresh-pause readout. Pure in (device,
/// challenge, env); any stage error aborts with no partial response.
Response generate_response(const DeviceInstance& device, const Challenge& challenge,
                           const Environment& env);

/// Ablation variant that feeds the XOR stage output directly to the
/// DRAM, skipping the hash.
Response generate_response_no_hash(const DeviceInstance& device, const Challenge& challenge,
                                   const Environment& env);

/// Epoch-enforcing entry point: the client substitutes its current
/// reconfiguration knobs into the challenge before answering.
Response client_generate_response(const DeviceInstance& device, const ClientEpoch& epoch,
                                  const Challenge& challenge, const Environment& env,
                                  bool use_hash = true);

// Canonical serialization (field order: id, addr_s, size_s, error
// correction data, bitstream_c, addr_d, size_d, wrapper pattern,
// refresh-pause interval). Error-correction data is written as raw
// bytes with a u32 length prefix (0 when absent); its segment width is
// database-level configuration, not wire data.
void serialize_challenge(const Challenge& c, wire::Writer& w);
Challenge deserialize_challenge(wire::Reader& r, unsigned segment_bits);
void serialize_response(const Response& resp, wire::Writer& w);
Response deserialize_response(wire::Reader& r);

} // namespace cpuf
