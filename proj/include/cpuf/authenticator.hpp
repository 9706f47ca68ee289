// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpuf/pipeline.hpp"

namespace cpuf {

/// One enrolled challenge-response pair. The golden start-up value is
/// kept authenticator-side so the error-correction data can be audited
/// and re-derived; a hardened deployment can drop it (see
/// CrpDatabase::strip_golden_startups).
struct CrpRecord {
    Challenge challenge;
    Response golden_response;
    Bits golden_startup;
    Environment enrollment_env;

    bool operator==(const CrpRecord&) const = default;
};

/// Intra-device Hamming-distance statistics from characterization.
struct DeviceStats {
    double mean_intra = 0.0;
    double std_intra = 0.0;

    bool operator==(const DeviceStats&) const = default;
};

/// Fuzzy acceptance policy: accept iff hd <= threshold.
///
/// static_threshold: one fleet-wide value, typically the maximum intra
/// HD observed across the expected operating range.
///
/// dynamic: per-device threshold mean_intra + c * std_intra. Its
/// construction is rejected when the threshold does not sit strictly
/// below the smallest inter-device HD seen during characterization,
/// since such a policy could no longer separate devices.
class MatchPolicy {
public:
    enum class Kind : uint8_t { static_mt = 1, dynamic_mt = 2 };

    MatchPolicy() = default; // static policy with threshold 0
    static MatchPolicy static_threshold(uint64_t mt_bits);
    static MatchPolicy dynamic(DeviceStats stats, double safety_c, uint64_t min_inter_hd_observed);

    Kind kind() const { return kind_; }
    uint64_t threshold() const { return threshold_; }
    const DeviceStats& stats() const { return stats_; }
    double safety_c() const { return safety_c_; }
    uint64_t min_inter_hd() const { return min_inter_hd_; }

    void serialize(wire::Writer& w) const;
    static MatchPolicy deserialize(wire::Reader& r);

    bool operator==(const MatchPolicy&) const = default;

private:
    Kind kind_ = Kind::static_mt;
    uint64_t threshold_ = 0;
    DeviceStats stats_;
    double safety_c_ = 0.0;
    uint64_t min_inter_hd_ = 0;
};

struct AuthOutcome {
    bool accepted = false;
    uint64_t hd = 0;
    uint64_t mt_used = 0;
    uint64_t challenge_id = 0;
};

/// The CRP database for one device and one enrollment epoch.
/// Serialized layout (all integers little-endian):
///   magic "CPUFDB1\n", version u32,
///   sram_bytes u64, dram_bytes u64,
///   epoch addr_s u64, epoch refresh_pause f64, segment_bits u32,
///   policy (kind u8; static: mt u64; dynamic: mean f64, std f64,
///           c f64, min_inter u64), has_policy u8 before it,
///   retired u8, record count u64,
///   then one u64-length-prefixed serialized record per entry.
class CrpDatabase {
public:
    uint64_t sram_bytes = 0;
    uint64_t dram_bytes = 0;
    ClientEpoch epoch;
    unsigned segment_bits = kDefaultSegmentBits;
    std::optional<MatchPolicy> policy;
    bool retired = false;
    std::vector<CrpRecord> records;

    const CrpRecord* find(uint64_t challenge_id) const;
    void strip_golden_startups();

    std::vector<uint8_t> serialize() const;
    static CrpDatabase deserialize(std::span<const uint8_t> bytes);
    void save(const std::filesystem::path& path) const;
    static CrpDatabase load(const std::filesystem::path& path);

    bool operator==(const CrpDatabase&) const = default;
};

/// Enrollment: per template, record the noise-free golden start-up
/// value, derive the error-correction data from it, and store the
/// golden response produced by the full pipeline. Template ids must be
/// unique.
CrpDatabase enroll(const DeviceInstance& device, const ClientEpoch& epoch,
                   std::span<const Challenge> templates, const Environment& env,
                   unsigned segment_bits = kDefaultSegmentBits);

/// Regenerates the response at env with fresh noise and compares
/// against the golden response. Boundary rule: hd == threshold accepts.
AuthOutcome authenticate(const DeviceInstance& device, const ClientEpoch& epoch,
                         const CrpRecord& record, const Environment& env,
                         const MatchPolicy& policy);

/// Characterization sweep inputs: DRAM blocks by start address, pause
/// intervals, and a base challenge supplying everything else. When
/// `challenges` is non-empty, the intra-device statistics (and thus the
/// recommended match threshold) are measured over exactly that
/// challenge set instead of the base challenge per block, so a
/// threshold derived here bounds later authentications of the same set.
struct ParamGrid {
    std::vector<uint64_t> dram_block_addrs;
    std::vector<double> pause_intervals_s;
    uint64_t block_bytes = kDefaultSizeD;
    Challenge base;
    std::vector<Challenge> challenges;
};

struct BlockFlipCount {
    uint64_t addr_d = 0;
    double pause_s = 0.0;
    uint64_t flips = 0;
};

/// envs[0] is the reference environment: golden responses are taken
/// there and every other env is compared against them.
struct CharacterizationReport {
    std::vector<BlockFlipCount> block_flips;
    std::vector<uint64_t> intra_hds;       // one per (block, env != ref)
    DeviceStats stats;
    uint64_t recommended_static_mt = 0;    // max observed intra HD
    std::vector<uint64_t> recommended_blocks; // max flips at min pause
};

CharacterizationReport characterize(const DeviceInstance& device, const ClientEpoch& epoch,
                                    const ParamGrid& grid, std::span<const Environment> envs,
                                    unsigned segment_bits = kDefaultSegmentBits);

/// Re-enrolls every challenge of `db` with the changed knob(s); the old
/// database is marked retired and kept for audit. Epoch is updated in
/// place. Requires at least one knob to actually change.
CrpDatabase reconfigure(const DeviceInstance& device, ClientEpoch& epoch, CrpDatabase& db,
                        std::optional<uint64_t> new_addr_s, std::optional<double> new_refresh_pause_s,
                        const Environment& env);

/// DIMM-swap case study: authenticates a hybrid device (genuine SRAM,
/// counterfeit DRAM) against the genuine device's database under one
/// policy.
struct ScenarioReport {
    uint64_t counterfeit_dram_seed = 0;
    MatchPolicy::Kind policy_kind = MatchPolicy::Kind::static_mt;
    size_t total = 0;
    size_t accepted = 0;
    std::vector<AuthOutcome> outcomes;

    bool any_accepted() const { return accepted > 0; }
};

ScenarioReport counterfeit_swap_scenario(const DeviceInstance& genuine, uint64_t counterfeit_dram_seed,
                                         const CrpDatabase& db, const MatchPolicy& policy,
                                         const Environment& env);

/// Draws records uniformly at random without replacement; each record
/// is handed out at most once per session.
class AuthSession {
public:
    AuthSession(const CrpDatabase& db, uint64_t session_seed);
    const CrpRecord* next();
    size_t remaining() const { return order_.size() - pos_; }

private:
    const CrpDatabase* db_;
    std::vector<size_t> order_;
    size_t pos_ = 0;
};

} // namespace cpuf
