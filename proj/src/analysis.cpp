// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <map>

#include "cpuf/analysis.hpp"
#include "cpuf/kernels.hpp"

namespace cpuf {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

uint64_t mix_noise_seed(uint64_t base, uint64_t device_seed, uint64_t challenge_id, double temp) {
    using kernels::mix64;
    return mix64(mix64(base) ^ mix64(device_seed) ^ mix64(challenge_id) ^
                 mix64(std::bit_cast<uint64_t>(temp)));
}

} // namespace

uint64_t hamming_distance(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    if (a.size() != b.size())
        throw InvalidArgumentError("hamming_distance: length mismatch (" +
                                   std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                                   " bytes)");
    return kernels::hamming_distance(a.data(), b.data(), a.size());
}

uint64_t HdDistribution::min_hd() const {
    uint64_t m = UINT64_MAX;
    for (const auto& c : comparisons) m = std::min(m, c.hd);
    return comparisons.empty() ? 0 : m;
}

uint64_t HdDistribution::max_hd() const {
    uint64_t m = 0;
    for (const auto& c : comparisons) m = std::max(m, c.hd);
    return m;
}

double HdDistribution::mean_hd() const {
    if (comparisons.empty()) return 0.0;
    double s = 0.0;
    for (const auto& c : comparisons) s += double(c.hd);
    return s / double(comparisons.size());
}

uint64_t HdDistribution::effective_bin_width() const {
    if (bin_width > 0) return bin_width;
    return std::max<uint64_t>(1, response_bits / 512);
}

std::vector<std::tuple<uint64_t, uint64_t, double>> HdDistribution::histogram() const {
    const uint64_t bw = effective_bin_width();
    std::map<uint64_t, uint64_t> counts;
    for (const auto& c : comparisons) ++counts[c.hd / bw];
    std::vector<std::tuple<uint64_t, uint64_t, double>> out;
    out.reserve(counts.size());
    for (const auto& [bin, count] : counts)
        out.emplace_back(bin * bw, count, double(count) / double(comparisons.size()));
    return out;
}

IntraInterReport intra_inter_report(std::span<const DeviceInstance> devices,
                                    std::span<const CrpDatabase> dbs,
                                    std::span<const Environment> envs, bool use_hash,
                                    uint64_t noise_seed_base) {
    if (devices.size() != dbs.size())
        throw InvalidArgumentError("intra_inter_report: one database per device required");
    if (devices.size() < 2)
        throw InvalidArgumentError("intra_inter_report: need at least two devices for inter");
    if (envs.empty()) throw InvalidArgumentError("intra_inter_report: no environments");

    const size_t n = devices.size();

    // Golden references. The hashed golden is already in the database;
    // the ablation regenerates it with the hash stage skipped.
    std::vector<std::vector<std::vector<uint8_t>>> golden(n);
    for (size_t i = 0; i < n; ++i) {
        golden[i].reserve(dbs[i].records.size());
        for (const auto& rec : dbs[i].records) {
            if (use_hash)
                golden[i].push_back(rec.golden_response.bitstream_r);
            else
                golden[i].push_back(client_generate_response(devices[i], dbs[i].epoch,
                                                             rec.challenge, rec.enrollment_env,
                                                             false)
                                        .bitstream_r);
        }
    }

    IntraInterReport report;
    uint64_t response_bits = 0;

    for (size_t j = 0; j < n; ++j) {
        for (const Environment& env : envs) {
            for (size_t r = 0; r < dbs[j].records.size(); ++r) {
                const auto& rec = dbs[j].records[r];
                Environment fresh_env = env;
                fresh_env.noise_seed = mix_noise_seed(noise_seed_base,
                                                      devices[j].manufacturing_seed(),
                                                      rec.challenge.id, env.temperature_c);
                const Response fresh = client_generate_response(devices[j], dbs[j].epoch,
                                                                rec.challenge, fresh_env, use_hash);
                response_bits = uint64_t(fresh.bitstream_r.size()) * 8;
                for (size_t i = 0; i < n; ++i) {
                    if (dbs[i].records.size() != dbs[j].records.size())
                        throw InvalidArgumentError(
                            "intra_inter_report: databases must share the challenge set");
                    const uint64_t hd = hamming_distance(golden[i][r], fresh.bitstream_r);
                    char label[128];
                    std::snprintf(label, sizeof label, "g%016" PRIx64 ":a%016" PRIx64 "#%" PRIu64 "@%s",
                                  devices[i].manufacturing_seed(), devices[j].manufacturing_seed(),
                                  rec.challenge.id, fmt_double(env.temperature_c).c_str());
                    auto& dist = (i == j) ? report.intra : report.inter;
                    dist.comparisons.push_back(HdComparison{label, hd});
                }
            }
        }
    }

    auto canonicalize = [&](HdDistribution& d) {
        d.response_bits = response_bits;
        std::sort(d.comparisons.begin(), d.comparisons.end(),
                  [](const HdComparison& a, const HdComparison& b) { return a.pair_id < b.pair_id; });
    };
    canonicalize(report.intra);
    canonicalize(report.inter);

    report.max_intra = report.intra.max_hd();
    report.min_inter = report.inter.min_hd();
    report.gap = int64_t(report.min_inter) - int64_t(report.max_intra);
    return report;
}

HdDistribution dram_only_baseline(std::span<const DeviceInstance> devices,
                                  std::span<const Challenge> challenges, const Environment& env) {
    if (devices.size() < 2)
        throw InvalidArgumentError("dram_only_baseline: need at least two devices");

    HdDistribution dist;
    for (const Challenge& c : challenges) {
        std::vector<std::vector<uint8_t>> readouts;
        readouts.reserve(devices.size());
        for (const auto& dev : devices)
            readouts.push_back(dram_refresh_pause(dev, {c.addr_d, c.size_d}, c.bitstream_c,
                                                  c.wrapper, c.refresh_pause_s, env));
        dist.response_bits = uint64_t(c.size_d) * 8;
        for (size_t i = 0; i < devices.size(); ++i) {
            for (size_t j = i + 1; j < devices.size(); ++j) {
                const uint64_t hd = hamming_distance(readouts[i], readouts[j]);
                uint64_t sa = devices[i].manufacturing_seed();
                uint64_t sb = devices[j].manufacturing_seed();
                if (sa > sb) std::swap(sa, sb);
                char label[96];
                std::snprintf(label, sizeof label, "d%016" PRIx64 ":d%016" PRIx64 "#%" PRIu64, sa, sb,
                              c.id);
                dist.comparisons.push_back(HdComparison{label, hd});
            }
        }
    }
    std::sort(dist.comparisons.begin(), dist.comparisons.end(),
              [](const HdComparison& a, const HdComparison& b) { return a.pair_id < b.pair_id; });
    return dist;
}

std::string CrpCount::combined_str() const {
    if (combined == 0) return "0";
    std::string s;
    unsigned __int128 v = combined;
    while (v > 0) {
        s.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

CrpCount crp_count(uint64_t sram_bytes, uint64_t size_s, uint64_t dram_bytes, uint64_t size_d,
                   uint64_t n_wrappers, uint64_t n_pause_intervals) {
    if (sram_bytes == 0 || size_s == 0 || dram_bytes == 0 || size_d == 0 || n_wrappers == 0 ||
        n_pause_intervals == 0)
        throw InvalidArgumentError("crp_count: all arguments must be positive");
    if (sram_bytes % size_s != 0)
        throw InvalidArgumentError("crp_count: size_s does not divide the SRAM geometry");
    if (dram_bytes % size_d != 0)
        throw InvalidArgumentError("crp_count: size_d does not divide the DRAM geometry");

    CrpCount c;
    c.sram_crps = sram_bytes / size_s;
    c.dram_crps = (dram_bytes / size_d) * n_wrappers * n_pause_intervals;
    c.combined = (unsigned __int128)c.sram_crps * c.dram_crps;
    c.alternative = c.sram_crps + c.dram_crps;

    auto log2_floor_u128 = [](unsigned __int128 v) {
        int l = -1;
        while (v > 0) {
            v >>= 1;
            ++l;
        }
        return l;
    };
    c.log2_combined_floor = log2_floor_u128(c.combined);
    c.log2_alternative_floor = log2_floor_u128(c.alternative);
    return c;
}

std::pair<double, double> tpr_fpr(std::span<const TaggedOutcome> outcomes) {
    uint64_t genuine = 0, genuine_accepted = 0, impostor = 0, impostor_accepted = 0;
    for (const auto& t : outcomes) {
        if (t.genuine) {
            ++genuine;
            if (t.outcome.accepted) ++genuine_accepted;
        } else {
            ++impostor;
            if (t.outcome.accepted) ++impostor_accepted;
        }
    }
    if (genuine == 0 || impostor == 0)
        throw InvalidArgumentError("tpr_fpr: need at least one genuine and one impostor outcome");
    return {double(genuine_accepted) / double(genuine),
            double(impostor_accepted) / double(impostor)};
}

void write_comparisons_csv(std::ostream& os, const HdDistribution& d, std::string_view kind) {
    os << "kind,pair_id,hd\n";
    for (const auto& c : d.comparisons) os << kind << ',' << c.pair_id << ',' << c.hd << '\n';
    os << "# summary,count," << d.comparisons.size() << '\n';
    os << "# summary,min_hd," << d.min_hd() << '\n';
    os << "# summary,max_hd," << d.max_hd() << '\n';
    os << "# summary,mean_hd," << fmt_double(d.mean_hd()) << '\n';
    os << "# summary,response_bits," << d.response_bits << '\n';
}

void write_intra_inter_csv(std::ostream& os, const IntraInterReport& r) {
    os << "kind,pair_id,hd\n";
    for (const auto& c : r.intra.comparisons) os << "intra," << c.pair_id << ',' << c.hd << '\n';
    for (const auto& c : r.inter.comparisons) os << "inter," << c.pair_id << ',' << c.hd << '\n';
    os << "# summary,intra_count," << r.intra.comparisons.size() << '\n';
    os << "# summary,inter_count," << r.inter.comparisons.size() << '\n';
    os << "# summary,max_intra," << r.max_intra << '\n';
    os << "# summary,min_inter," << r.min_inter << '\n';
    os << "# summary,gap," << r.gap << '\n';
    os << "# summary,response_bits," << r.inter.response_bits << '\n';
}

void write_histogram_csv(std::ostream& os, const HdDistribution& d) {
    const uint64_t bw = d.effective_bin_width();
    os << "bin_lo,bin_hi,count,relative_frequency\n";
    for (const auto& [lo, count, freq] : d.histogram())
        os << lo << ',' << (lo + bw - 1) << ',' << count << ',' << fmt_double(freq) << '\n';
    os << "# summary,bin_width," << bw << '\n';
    os << "# summary,total," << d.comparisons.size() << '\n';
}

void write_outcomes_csv(std::ostream& os, std::span<const TaggedOutcome> outcomes) {
    os << "challenge_id,genuine,hd,mt,accepted\n";
    for (const auto& t : outcomes)
        os << t.outcome.challenge_id << ',' << (t.genuine ? 1 : 0) << ',' << t.outcome.hd << ','
           << t.outcome.mt_used << ',' << (t.outcome.accepted ? 1 : 0) << '\n';
    const auto [tpr, fpr] = tpr_fpr(outcomes);
    os << "# summary,tpr," << fmt_double(tpr) << '\n';
    os << "# summary,fpr," << fmt_double(fpr) << '\n';
}

void write_crp_count_csv(std::ostream& os, const CrpCount& c) {
    os << "sram_crps,dram_crps,combined,alternative,log2_combined_floor,log2_alternative_floor\n";
    os << c.sram_crps << ',' << c.dram_crps << ',' << c.combined_str() << ',' << c.alternative
       << ',' << c.log2_combined_floor << ',' << c.log2_alternative_floor << '\n';
}

void write_characterization_csv(std::ostream& os, const CharacterizationReport& r) {
    os << "block_addr,pause_s,flips\n";
    for (const auto& bf : r.block_flips)
        os << bf.addr_d << ',' << fmt_double(bf.pause_s) << ',' << bf.flips << '\n';
    os << "# summary,recommended_static_mt," << r.recommended_static_mt << '\n';
    os << "# summary,mean_intra," << fmt_double(r.stats.mean_intra) << '\n';
    os << "# summary,std_intra," << fmt_double(r.stats.std_intra) << '\n';
    os << "# summary,recommended_blocks,";
    for (size_t i = 0; i < r.recommended_blocks.size(); ++i) {
        if (i) os << ';';
        os << r.recommended_blocks[i];
    }
    os << '\n';
}

} // namespace cpuf
