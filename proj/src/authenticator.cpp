// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "cpuf/analysis.hpp"
#include "cpuf/authenticator.hpp"

namespace cpuf {

namespace {

constexpr char kDbMagic[8] = {'C', 'P', 'U', 'F', 'D', 'B', '1', '\n'};
constexpr uint32_t kDbVersion = 1;

uint64_t dynamic_threshold(const DeviceStats& stats, double safety_c) {
    const double mt = stats.mean_intra + safety_c * stats.std_intra;
    return uint64_t(std::ceil(std::max(0.0, mt)));
}

} // namespace

MatchPolicy MatchPolicy::static_threshold(uint64_t mt_bits) {
    MatchPolicy p;
    p.kind_ = Kind::static_mt;
    p.threshold_ = mt_bits;
    return p;
}

MatchPolicy MatchPolicy::dynamic(DeviceStats stats, double safety_c,
                                 uint64_t min_inter_hd_observed) {
    if (!(stats.mean_intra >= 0.0) || !(stats.std_intra >= 0.0) || !(safety_c >= 0.0))
        throw PolicyError("dynamic policy: statistics must be non-negative");
    MatchPolicy p;
    p.kind_ = Kind::dynamic_mt;
    p.stats_ = stats;
    p.safety_c_ = safety_c;
    p.min_inter_hd_ = min_inter_hd_observed;
    p.threshold_ = dynamic_threshold(stats, safety_c);
    if (p.threshold_ >= min_inter_hd_observed)
        throw PolicyError("dynamic policy: threshold " + std::to_string(p.threshold_) +
                          " does not sit below the smallest observed inter-device HD " +
                          std::to_string(min_inter_hd_observed));
    return p;
}

void MatchPolicy::serialize(wire::Writer& w) const {
    w.u8(uint8_t(kind_));
    if (kind_ == Kind::static_mt) {
        w.u64(threshold_);
    } else {
        w.f64(stats_.mean_intra);
        w.f64(stats_.std_intra);
        w.f64(safety_c_);
        w.u64(min_inter_hd_);
    }
}

MatchPolicy MatchPolicy::deserialize(wire::Reader& r) {
    const uint8_t kind = r.u8();
    if (kind == uint8_t(Kind::static_mt)) return static_threshold(r.u64());
    if (kind == uint8_t(Kind::dynamic_mt)) {
        DeviceStats stats;
        stats.mean_intra = r.f64();
        stats.std_intra = r.f64();
        const double c = r.f64();
        const uint64_t min_inter = r.u64();
        return dynamic(stats, c, min_inter);
    }
    throw FormatError("match policy: unknown kind");
}

const CrpRecord* CrpDatabase::find(uint64_t challenge_id) const {
    for (const auto& rec : records)
        if (rec.challenge.id == challenge_id) return &rec;
    return nullptr;
}

void CrpDatabase::strip_golden_startups() {
    for (auto& rec : records) rec.golden_startup = Bits();
}

std::vector<uint8_t> CrpDatabase::serialize() const {
    wire::Writer w;
    w.bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(kDbMagic), 8));
    w.u32(kDbVersion);
    w.u64(sram_bytes);
    w.u64(dram_bytes);
    w.u64(epoch.addr_s);
    w.f64(epoch.refresh_pause_s);
    w.u32(segment_bits);
    w.u8(policy.has_value() ? 1 : 0);
    if (policy) policy->serialize(w);
    w.u8(retired ? 1 : 0);
    w.u64(records.size());
    for (const auto& rec : records) {
        wire::Writer rw;
        serialize_challenge(rec.challenge, rw);
        serialize_response(rec.golden_response, rw);
        rw.u64(rec.golden_startup.size());
        rw.bytes(rec.golden_startup.bytes());
        rw.f64(rec.enrollment_env.temperature_c);
        rw.u64(rec.enrollment_env.noise_seed);
        w.prefixed_bytes(rw.data());
    }
    return w.take();
}

CrpDatabase CrpDatabase::deserialize(std::span<const uint8_t> bytes) {
    wire::Reader r(bytes);
    const auto magic = r.bytes(8);
    if (!std::equal(magic.begin(), magic.end(), kDbMagic))
        throw FormatError("CRP database: bad magic");
    if (r.u32() != kDbVersion) throw FormatError("CRP database: unsupported version");

    CrpDatabase db;
    db.sram_bytes = r.u64();
    db.dram_bytes = r.u64();
    db.epoch.addr_s = r.u64();
    db.epoch.refresh_pause_s = r.f64();
    db.segment_bits = r.u32();
    if (r.u8()) db.policy = MatchPolicy::deserialize(r);
    db.retired = r.u8() != 0;
    const uint64_t count = r.u64();
    db.records.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        const auto payload = r.prefixed_bytes();
        wire::Reader rr(payload);
        CrpRecord rec;
        rec.challenge = deserialize_challenge(rr, db.segment_bits);
        rec.golden_response = deserialize_response(rr);
        const uint64_t nbits = rr.u64();
        rec.golden_startup = Bits::from_bytes(rr.bytes((nbits + 7) / 8), nbits);
        rec.enrollment_env.temperature_c = rr.f64();
        rec.enrollment_env.noise_seed = rr.u64();
        if (!rr.done()) throw FormatError("CRP record: trailing bytes");
        db.records.push_back(std::move(rec));
    }
    if (!r.done()) throw FormatError("CRP database: trailing bytes");
    return db;
}

void CrpDatabase::save(const std::filesystem::path& path) const {
    const auto bytes = serialize();
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!os) throw Error("short write to " + path.string());
}

CrpDatabase CrpDatabase::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingArtifactError("CRP database not found: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                               std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

CrpDatabase enroll(const DeviceInstance& device, const ClientEpoch& epoch,
                   std::span<const Challenge> templates, const Environment& env,
                   unsigned segment_bits) {
    validate_environment(env);
    std::set<uint64_t> ids;
    for (const auto& t : templates)
        if (!ids.insert(t.id).second)
            throw DuplicateIdError("enroll: duplicate challenge id " + std::to_string(t.id));

    CrpDatabase db;
    db.sram_bytes = device.sram_bytes();
    db.dram_bytes = device.dram_bytes();
    db.epoch = epoch;
    db.segment_bits = segment_bits;
    db.records.reserve(templates.size());

    for (const auto& t : templates) {
        Challenge c = epoch.apply(t);
        c.validate(device, segment_bits, /*require_ecc=*/false);
        // The golden start-up value is the noise-free reading; deriving
        // the correction data from it maximizes the correction margin.
        const Bits golden = sram_startup_golden(device, {c.addr_s, c.size_s});
        c.ecc = gen_err_corr_data(golden, segment_bits);
        Response resp = client_generate_response(device, epoch, c, env);
        db.records.push_back(CrpRecord{std::move(c), std::move(resp), golden, env});
    }
    return db;
}

AuthOutcome authenticate(const DeviceInstance& device, const ClientEpoch& epoch,
                         const CrpRecord& record, const Environment& env,
                         const MatchPolicy& policy) {
    const Challenge& c = record.challenge;
    if (c.addr_s + c.size_s > device.sram_bytes() ||
        c.addr_d + c.size_d + kGuardBandBytes > device.dram_bytes() || c.addr_d < kGuardBandBytes)
        throw IncompatibleDeviceError("authenticate: record geometry does not fit the device");

    const Response fresh = client_generate_response(device, epoch, c, env);
    const uint64_t hd = hamming_distance(fresh.bitstream_r, record.golden_response.bitstream_r);
    const uint64_t mt = policy.threshold();
    return AuthOutcome{hd <= mt, hd, mt, c.id};
}

CharacterizationReport characterize(const DeviceInstance& device, const ClientEpoch& epoch,
                                    const ParamGrid& grid, std::span<const Environment> envs,
                                    unsigned segment_bits) {
    if (grid.dram_block_addrs.empty() || grid.pause_intervals_s.empty())
        throw InvalidArgumentError("characterize: empty parameter grid");
    if (envs.empty()) throw InvalidArgumentError("characterize: need at least one environment");
    if (grid.base.size_d != grid.block_bytes || grid.base.bitstream_c.size() != grid.block_bytes)
        throw InvalidArgumentError("characterize: base challenge does not match block size");

    const Environment& ref = envs[0];
    CharacterizationReport report;

    for (uint64_t addr : grid.dram_block_addrs) {
        Challenge c = epoch.apply(grid.base);
        c.addr_d = addr;
        c.validate(device, segment_bits, /*require_ecc=*/false);
        const Bits golden = sram_startup_golden(device, {c.addr_s, c.size_s});
        c.ecc = gen_err_corr_data(golden, segment_bits);

        // Flip counts: decay of the written value itself per pause, at
        // the reference environment.
        const CorrectedValue cv = corr_startup_val(golden, segment_bits, c.ecc);
        const std::vector<uint8_t> written = hash_stage(xor_stage(cv, c.bitstream_c));
        for (double pause : grid.pause_intervals_s) {
            const auto readout = dram_refresh_pause(device, {c.addr_d, c.size_d}, written,
                                                    c.wrapper, pause, ref);
            report.block_flips.push_back(
                BlockFlipCount{addr, pause, hamming_distance(written, readout)});
        }
    }

    // Intra-device deviation of full responses across environments,
    // against the reference-environment golden. Measured over the real
    // challenge set when one is given; the flip pattern depends on the
    // written data, so a threshold is only sound for the challenges it
    // was measured on.
    std::vector<Challenge> sweep;
    if (!grid.challenges.empty()) {
        sweep = grid.challenges;
    } else {
        for (uint64_t addr : grid.dram_block_addrs) {
            Challenge c = grid.base;
            c.addr_d = addr;
            sweep.push_back(std::move(c));
        }
    }
    for (Challenge c : sweep) {
        c = epoch.apply(c);
        c.validate(device, segment_bits, /*require_ecc=*/false);
        const Bits golden = sram_startup_golden(device, {c.addr_s, c.size_s});
        c.ecc = gen_err_corr_data(golden, segment_bits);
        const Response golden_resp = client_generate_response(device, epoch, c, ref);
        for (const Environment& env : envs) {
            const Response resp = client_generate_response(device, epoch, c, env);
            report.intra_hds.push_back(
                hamming_distance(resp.bitstream_r, golden_resp.bitstream_r));
        }
    }

    double sum = 0.0;
    uint64_t max_intra = 0;
    for (uint64_t hd : report.intra_hds) {
        sum += double(hd);
        max_intra = std::max(max_intra, hd);
    }
    const double mean = sum / double(report.intra_hds.size());
    double var = 0.0;
    for (uint64_t hd : report.intra_hds) var += (double(hd) - mean) * (double(hd) - mean);
    var /= double(report.intra_hds.size());
    report.stats = DeviceStats{mean, std::sqrt(var)};
    report.recommended_static_mt = max_intra;

    // Blocks showing the most flips at the shortest pause: best entropy
    // for the lowest response-generation latency.
    const double min_pause =
        *std::min_element(grid.pause_intervals_s.begin(), grid.pause_intervals_s.end());
    uint64_t best = 0;
    for (const auto& bf : report.block_flips)
        if (bf.pause_s == min_pause) best = std::max(best, bf.flips);
    for (const auto& bf : report.block_flips)
        if (bf.pause_s == min_pause && bf.flips == best)
            report.recommended_blocks.push_back(bf.addr_d);
    return report;
}

CrpDatabase reconfigure(const DeviceInstance& device, ClientEpoch& epoch, CrpDatabase& db,
                        std::optional<uint64_t> new_addr_s,
                        std::optional<double> new_refresh_pause_s, const Environment& env) {
    if (db.retired)
        throw InvalidArgumentError("reconfigure: database is retired and immutable");
    const bool addr_changes = new_addr_s && *new_addr_s != epoch.addr_s;
    const bool pause_changes =
        new_refresh_pause_s && *new_refresh_pause_s != epoch.refresh_pause_s;
    if (!addr_changes && !pause_changes)
        throw NoOpError("reconfigure: neither knob changes");
    if (new_refresh_pause_s && !(*new_refresh_pause_s > 0.0))
        throw InvalidArgumentError("reconfigure: refresh pause must be positive");

    ClientEpoch next = epoch;
    if (addr_changes) next.addr_s = *new_addr_s;
    if (pause_changes) next.refresh_pause_s = *new_refresh_pause_s;

    std::vector<Challenge> templates;
    templates.reserve(db.records.size());
    for (const auto& rec : db.records) {
        Challenge t = rec.challenge;
        t.ecc = EccData{db.segment_bits, Bits()};
        templates.push_back(std::move(t));
    }

    CrpDatabase fresh = enroll(device, next, templates, env, db.segment_bits);
    fresh.policy = db.policy;
    db.retired = true; // kept read-only for audit
    epoch = next;
    return fresh;
}

ScenarioReport counterfeit_swap_scenario(const DeviceInstance& genuine,
                                         uint64_t counterfeit_dram_seed, const CrpDatabase& db,
                                         const MatchPolicy& policy, const Environment& env) {
    const DeviceInstance hybrid = forge_hybrid_device(genuine, counterfeit_dram_seed);
    ScenarioReport report;
    report.counterfeit_dram_seed = counterfeit_dram_seed;
    report.policy_kind = policy.kind();
    report.total = db.records.size();
    report.outcomes.reserve(db.records.size());
    for (const auto& rec : db.records) {
        AuthOutcome o = authenticate(hybrid, db.epoch, rec, env, policy);
        if (o.accepted) ++report.accepted;
        report.outcomes.push_back(o);
    }
    return report;
}

AuthSession::AuthSession(const CrpDatabase& db, uint64_t session_seed) : db_(&db) {
    order_.resize(db.records.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    // Fisher-Yates with an explicit generator so sessions replay
    // identically across platforms.
    std::mt19937_64 gen(session_seed);
    for (size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[gen() % i]);
}

const CrpRecord* AuthSession::next() {
    if (pos_ >= order_.size()) return nullptr;
    return &db_->records[order_[pos_++]];
}

} // namespace cpuf
