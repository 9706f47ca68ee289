// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cpuf/authenticator.hpp"

namespace cpuf {

/// Hamming distance between equal-length byte sequences.
uint64_t hamming_distance(std::span<const uint8_t> a, std::span<const uint8_t> b);

struct HdComparison {
    std::string pair_id; // canonical "<a>:<b>[@env]" label, sorted endpoints
    uint64_t hd = 0;
};

/// A set of Hamming-distance comparisons with histogram support. The
/// histogram's y axis is relative frequency: the fraction of all
/// comparisons falling in a bin.
struct HdDistribution {
    std::vector<HdComparison> comparisons;
    uint64_t response_bits = 0;
    uint64_t bin_width = 0; // defaults to response_bits / 512 when 0

    uint64_t min_hd() const;
    uint64_t max_hd() const;
    double mean_hd() const;
    uint64_t effective_bin_width() const;
    /// (bin lower bound, count, relative frequency), bins with zero
    /// count omitted.
    std::vector<std::tuple<uint64_t, uint64_t, double>> histogram() const;
};

struct IntraInterReport {
    HdDistribution intra;
    HdDistribution inter;
    uint64_t max_intra = 0;
    uint64_t min_inter = 0;
    /// min_inter - max_intra; negative means the populations overlap.
    int64_t gap = 0;
};

/// Own-golden vs own-fresh (intra) and own-golden vs other devices'
/// fresh responses (inter) across the given environments. Comparison
/// rows come out in a canonical sorted order, so device ordering does
/// not affect the report.
IntraInterReport intra_inter_report(std::span<const DeviceInstance> devices,
                                    std::span<const CrpDatabase> dbs,
                                    std::span<const Environment> envs, bool use_hash = true,
                                    uint64_t noise_seed_base = 0x5eedULL);

/// DRAM-only baseline: writes the challenge's fixed bitstream directly
/// (no SRAM, no XOR, no hash) and refresh-pauses. Returns the
/// inter-device HD distribution of the readouts.
HdDistribution dram_only_baseline(std::span<const DeviceInstance> devices,
                                  std::span<const Challenge> challenges, const Environment& env);

/// Challenge-space sizes. Exact integer arithmetic; combined uses
/// 128-bit intermediate so 2^16 * 2^16-scale products cannot overflow.
struct CrpCount {
    uint64_t sram_crps = 0;       // A
    uint64_t dram_crps = 0;       // B
    unsigned __int128 combined = 0; // A*B
    uint64_t alternative = 0;     // A+B
    int log2_combined_floor = 0;
    int log2_alternative_floor = 0;

    std::string combined_str() const;
};

CrpCount crp_count(uint64_t sram_bytes, uint64_t size_s, uint64_t dram_bytes, uint64_t size_d,
                   uint64_t n_wrappers, uint64_t n_pause_intervals);

struct TaggedOutcome {
    AuthOutcome outcome;
    bool genuine = false;
};

/// (true-positive rate, false-positive rate). Requires at least one
/// outcome of each class.
std::pair<double, double> tpr_fpr(std::span<const TaggedOutcome> outcomes);

// CSV writers. Layout: header row, one row per entry, then a summary
// block of "# summary,<key>,<value>" lines. Column order is stable so
// reports can be golden-file tested.
void write_comparisons_csv(std::ostream& os, const HdDistribution& d, std::string_view kind);
void write_intra_inter_csv(std::ostream& os, const IntraInterReport& r);
void write_histogram_csv(std::ostream& os, const HdDistribution& d);
void write_outcomes_csv(std::ostream& os, std::span<const TaggedOutcome> outcomes);
void write_crp_count_csv(std::ostream& os, const CrpCount& c);
void write_characterization_csv(std::ostream& os, const CharacterizationReport& r);

} // namespace cpuf
