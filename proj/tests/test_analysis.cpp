// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "cpuf/analysis.hpp"
#include "cpuf/campaign.hpp"

using namespace cpuf;

namespace {

std::vector<uint8_t> random_bytes(std::mt19937_64& gen, size_t n) {
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = uint8_t(gen());
    return v;
}

uint64_t hamming_naive(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    uint64_t c = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (int bit = 0; bit < 8; ++bit) c += ((a[i] ^ b[i]) >> bit) & 1u;
    return c;
}

RunConfig small_config(uint64_t seed) {
    RunConfig cfg;
    cfg.sram_bytes = 64 * 1024;
    cfg.dram_bytes = 2 * 1024 * 1024;
    cfg.device_count = 3;
    cfg.challenge_count = 3;
    cfg.scale = 4096.0 / double(cfg.size_d_base);
    cfg.master_seed = seed;
    cfg.validate();
    return cfg;
}

} // namespace

TEST_CASE("hamming_distance basics") {
    const std::vector<uint8_t> x{0x12, 0x34};
    CHECK(hamming_distance(x, x) == 0);
    CHECK(hamming_distance(std::vector<uint8_t>{0x00}, std::vector<uint8_t>{0xFF}) == 8);
    CHECK(hamming_distance(std::vector<uint8_t>{0xAA}, std::vector<uint8_t>{0x55}) == 8);
    CHECK_THROWS_AS(hamming_distance(x, std::vector<uint8_t>{0x00}), InvalidArgumentError);
}

TEST_CASE("hamming distance is a metric on equal-length strings") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        const size_t n = 1 + gen() % 64;
        const auto a = random_bytes(gen, n);
        const auto b = random_bytes(gen, n);
        const auto c = random_bytes(gen, n);
        const uint64_t ab = hamming_distance(a, b);
        const uint64_t ba = hamming_distance(b, a);
        const uint64_t ac = hamming_distance(a, c);
        const uint64_t cb = hamming_distance(c, b);
        CHECK(ab == ba);                    // symmetry
        CHECK(ab == hamming_naive(a, b));   // against the naive oracle
        CHECK((ab == 0) == (a == b));       // identity
        CHECK(ab <= ac + cb);               // triangle inequality
    }
}

TEST_CASE("crp_count reproduces the published challenge-space sizes") {
    const auto c = crp_count(2 * 1024 * 1024, 32, 1024ull * 1024 * 1024, 128 * 1024, 3, 3);
    CHECK(c.sram_crps == 65536);            // 2^16
    CHECK(c.dram_crps == 73728);            // 9 * 2^13
    CHECK(c.alternative == 139264);
    CHECK(c.log2_alternative_floor == 17);  // A+B is of order 2^17
    CHECK(c.combined == (unsigned __int128)65536 * 73728);
    CHECK(c.log2_combined_floor == 32);     // A*B is of order 2^32
    CHECK(c.combined_str() == "4831838208");
}

TEST_CASE("crp_count degenerate and arithmetic cases") {
    const auto one = crp_count(32, 32, 128 * 1024, 128 * 1024, 1, 1);
    CHECK(one.sram_crps == 1);
    CHECK(one.dram_crps == 1);
    CHECK(one.combined == 1);
    CHECK(one.alternative == 2);

    const auto b = crp_count(2 * 1024 * 1024, 32, 1024ull * 1024 * 1024, 128 * 1024, 3, 3);
    CHECK(b.dram_crps == 9 * 8192);

    CHECK_THROWS_AS(crp_count(100, 32, 1 << 20, 1 << 17, 3, 3), InvalidArgumentError);
    CHECK_THROWS_AS(crp_count(1 << 21, 32, 100, 64, 3, 3), InvalidArgumentError);
    CHECK_THROWS_AS(crp_count(0, 32, 1 << 20, 1 << 17, 3, 3), InvalidArgumentError);
    CHECK_THROWS_AS(crp_count(1 << 21, 32, 1 << 30, 1 << 17, 0, 3), InvalidArgumentError);
}

TEST_CASE("crp_count is monotone in every argument") {
    const auto base = crp_count(1 << 20, 32, 1 << 24, 1 << 12, 2, 2);
    const auto more_sram = crp_count(1 << 21, 32, 1 << 24, 1 << 12, 2, 2);
    const auto more_wrap = crp_count(1 << 20, 32, 1 << 24, 1 << 12, 3, 2);
    const auto more_pause = crp_count(1 << 20, 32, 1 << 24, 1 << 12, 2, 5);
    CHECK(more_sram.sram_crps > base.sram_crps);
    CHECK(more_sram.combined > base.combined);
    CHECK(more_wrap.dram_crps > base.dram_crps);
    CHECK(more_pause.combined > base.combined);
    CHECK(more_pause.alternative > base.alternative);
}

TEST_CASE("tpr_fpr arithmetic") {
    auto out = [](bool accepted, bool genuine) {
        return TaggedOutcome{AuthOutcome{accepted, 0, 0, 0}, genuine};
    };
    std::vector<TaggedOutcome> perfect;
    for (int i = 0; i < 4; ++i) perfect.push_back(out(true, true));
    for (int i = 0; i < 5; ++i) perfect.push_back(out(false, false));
    CHECK(tpr_fpr(perfect) == std::pair<double, double>{1.0, 0.0});

    std::vector<TaggedOutcome> mixed;
    for (int i = 0; i < 3; ++i) mixed.push_back(out(true, true));
    mixed.push_back(out(false, true));
    mixed.push_back(out(true, false));
    for (int i = 0; i < 4; ++i) mixed.push_back(out(false, false));
    const auto [tpr, fpr] = tpr_fpr(mixed);
    CHECK(tpr == doctest::Approx(0.75));
    CHECK(fpr == doctest::Approx(0.2));

    std::vector<TaggedOutcome> only_genuine{out(true, true)};
    CHECK_THROWS_AS(tpr_fpr(only_genuine), InvalidArgumentError);
}

TEST_CASE("intra_inter_report: point mass at zero without noise or temperature change") {
    RunConfig cfg = small_config(31);
    cfg.noise_enabled = false;
    cfg.validate();
    const auto ctx = make_campaign(cfg);
    const auto dbs = campaign_enroll(ctx);
    const std::vector<Environment> envs{Environment{20.0, 7}};
    const auto report = intra_inter_report(ctx.devices, dbs, envs);
    CHECK(report.max_intra == 0);
    for (const auto& c : report.intra.comparisons) CHECK(c.hd == 0);
    CHECK(report.min_inter > 0);
    CHECK(report.gap == int64_t(report.min_inter));
    // Histogram frequencies sum to one.
    double total = 0.0;
    for (const auto& [lo, count, freq] : report.inter.histogram()) total += freq;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("intra_inter_report requires two devices and matching databases") {
    RunConfig cfg = small_config(32);
    cfg.device_count = 1;
    const auto ctx = make_campaign(cfg);
    const auto dbs = campaign_enroll(ctx);
    const std::vector<Environment> envs{Environment{20.0, 1}};
    CHECK_THROWS_AS(intra_inter_report(ctx.devices, dbs, envs), InvalidArgumentError);
}

TEST_CASE("report rows are invariant under device permutation") {
    const RunConfig cfg = small_config(33);
    const auto ctx = make_campaign(cfg);
    const auto dbs = campaign_enroll(ctx);
    const std::vector<Environment> envs{Environment{20.0, 3}, Environment{40.0, 4}};
    const auto a = intra_inter_report(ctx.devices, dbs, envs);

    std::vector<DeviceInstance> shuffled{ctx.devices[2], ctx.devices[0], ctx.devices[1]};
    std::vector<CrpDatabase> shuffled_dbs{dbs[2], dbs[0], dbs[1]};
    const auto b = intra_inter_report(shuffled, shuffled_dbs, envs);

    std::ostringstream csv_a, csv_b;
    write_intra_inter_csv(csv_a, a);
    write_intra_inter_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("dram_only_baseline collapses for shared DRAM and zero pause") {
    const RunConfig cfg = small_config(34);
    const auto ctx = make_campaign(cfg);

    // Two devices sharing the DRAM seed: identical flip patterns.
    std::vector<DeviceInstance> twins{ctx.devices[0],
                                      forge_hybrid_device(ctx.devices[1],
                                                          ctx.devices[0].manufacturing_seed())};
    const auto same = dram_only_baseline(twins, ctx.templates, Environment{20.0, 0});
    for (const auto& c : same.comparisons) CHECK(c.hd == 0);

    // Distinct DRAM at zero pause: nothing decays, nothing differs.
    auto no_pause = ctx.templates;
    for (auto& t : no_pause) t.refresh_pause_s = 0.0;
    const auto calm = dram_only_baseline(ctx.devices, no_pause, Environment{20.0, 0});
    for (const auto& c : calm.comparisons) CHECK(c.hd == 0);

    // Distinct DRAM at the working pause: small nonzero distances.
    const auto live = dram_only_baseline(ctx.devices, ctx.templates, Environment{20.0, 0});
    CHECK(live.max_hd() > 0);
    CHECK(live.max_hd() < cfg.size_d() * 8 / 100);

    std::vector<DeviceInstance> lone{ctx.devices[0]};
    CHECK_THROWS_AS(dram_only_baseline(lone, ctx.templates, Environment{}),
                    InvalidArgumentError);
}

TEST_CASE("csv layouts are stable") {
    HdDistribution d;
    d.response_bits = 1024;
    d.bin_width = 100;
    d.comparisons = {{"a:b#1", 10}, {"a:c#1", 205}, {"b:c#1", 210}};
    std::ostringstream os;
    write_comparisons_csv(os, d, "inter");
    CHECK(os.str() ==
          "kind,pair_id,hd\n"
          "inter,a:b#1,10\n"
          "inter,a:c#1,205\n"
          "inter,b:c#1,210\n"
          "# summary,count,3\n"
          "# summary,min_hd,10\n"
          "# summary,max_hd,210\n"
          "# summary,mean_hd,141.666667\n"
          "# summary,response_bits,1024\n");

    std::ostringstream hs;
    write_histogram_csv(hs, d);
    CHECK(hs.str() ==
          "bin_lo,bin_hi,count,relative_frequency\n"
          "0,99,1,0.333333\n"
          "200,299,2,0.666667\n"
          "# summary,bin_width,100\n"
          "# summary,total,3\n");

    const auto counts = crp_count(2 * 1024 * 1024, 32, 1024ull * 1024 * 1024, 128 * 1024, 3, 3);
    std::ostringstream cs;
    write_crp_count_csv(cs, counts);
    CHECK(cs.str() ==
          "sram_crps,dram_crps,combined,alternative,log2_combined_floor,log2_alternative_floor\n"
          "65536,73728,4831838208,139264,32,17\n");

    CharacterizationReport rep;
    rep.block_flips = {{4096, 20.0, 5}, {4096, 40.0, 11}};
    rep.intra_hds = {0, 3};
    rep.stats = DeviceStats{1.5, 1.5};
    rep.recommended_static_mt = 3;
    rep.recommended_blocks = {4096};
    std::ostringstream ch;
    write_characterization_csv(ch, rep);
    CHECK(ch.str() ==
          "block_addr,pause_s,flips\n"
          "4096,20.000000,5\n"
          "4096,40.000000,11\n"
          "# summary,recommended_static_mt,3\n"
          "# summary,mean_intra,1.500000\n"
          "# summary,std_intra,1.500000\n"
          "# summary,recommended_blocks,4096\n");
}
