// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "cpuf/campaign.hpp"

namespace cpuf {

std::vector<uint64_t> campaign_device_seeds(const RunConfig& cfg) {
    if (!cfg.device_seeds.empty()) return cfg.device_seeds;
    std::vector<uint64_t> seeds;
    seeds.reserve(cfg.device_count);
    for (unsigned i = 0; i < cfg.device_count; ++i)
        seeds.push_back(derive_seed(cfg.master_seed, "device", i));
    return seeds;
}

std::vector<uint64_t> campaign_counterfeit_seeds(const RunConfig& cfg) {
    if (!cfg.counterfeit_seeds.empty()) return cfg.counterfeit_seeds;
    std::vector<uint64_t> seeds;
    seeds.reserve(cfg.counterfeit_count);
    for (unsigned i = 0; i < cfg.counterfeit_count; ++i)
        seeds.push_back(derive_seed(cfg.master_seed, "counterfeit", i));
    return seeds;
}

std::vector<Challenge> make_challenge_templates(const RunConfig& cfg, const ClientEpoch& epoch) {
    const uint64_t size_d = cfg.size_d();
    // Candidate DRAM blocks start past a 4 KiB reserved prefix so the
    // leading guard band always fits.
    const uint64_t first_block = 4096;
    const uint64_t usable = cfg.dram_bytes - first_block - kGuardBandBytes;
    const uint64_t block_count = usable / size_d;

    std::vector<Challenge> templates;
    templates.reserve(cfg.challenge_count);
    for (unsigned j = 0; j < cfg.challenge_count; ++j) {
        const uint64_t chal_seed = derive_seed(cfg.master_seed, "challenge", j);
        Challenge c;
        c.id = j + 1;
        c.addr_s = epoch.addr_s;
        c.size_s = cfg.size_s;
        c.size_d = size_d;
        c.bitstream_c.resize(size_d);
        kernels::prf_fill_bytes(kernels::make_key(chal_seed, "bitstream-c"), 0,
                                c.bitstream_c.data(), c.bitstream_c.size());
        const uint64_t pick = kernels::prf_block(kernels::make_key(chal_seed, "addr-d"), 0).w[0];
        c.addr_d = first_block + (pick % block_count) * size_d;
        c.wrapper = cfg.wrapper_pattern();
        c.refresh_pause_s = epoch.refresh_pause_s;
        templates.push_back(std::move(c));
    }
    return templates;
}

CampaignContext make_campaign(const RunConfig& cfg) {
    CampaignContext ctx;
    ctx.cfg = cfg;
    ctx.params = cfg.model_params();
    for (uint64_t seed : campaign_device_seeds(cfg))
        ctx.devices.push_back(forge_device(seed, cfg.sram_bytes, cfg.dram_bytes, ctx.params));
    ctx.epoch = ClientEpoch{cfg.addr_s, cfg.refresh_pause_s};
    ctx.templates = make_challenge_templates(cfg, ctx.epoch);
    return ctx;
}

std::vector<CrpDatabase> campaign_enroll(const CampaignContext& ctx) {
    std::vector<CrpDatabase> dbs;
    dbs.reserve(ctx.devices.size());
    for (size_t i = 0; i < ctx.devices.size(); ++i) {
        const Environment env{ctx.cfg.enroll_temperature_c,
                              derive_seed(ctx.cfg.master_seed, "enroll-noise", i)};
        dbs.push_back(enroll(ctx.devices[i], ctx.epoch, ctx.templates, env, ctx.cfg.segment_bits));
    }
    return dbs;
}

namespace {

std::vector<Environment> env_list(const RunConfig& cfg, std::span<const double> temps,
                                  std::string_view noise_label) {
    // Reference (enrollment) environment first; characterization and
    // reports treat envs[0] as the golden reference.
    std::vector<Environment> envs;
    envs.push_back(Environment{cfg.enroll_temperature_c,
                               derive_seed(cfg.master_seed, noise_label, 0)});
    uint64_t idx = 1;
    for (double t : temps) {
        if (t == cfg.enroll_temperature_c) continue;
        envs.push_back(Environment{t, derive_seed(cfg.master_seed, noise_label, idx++)});
    }
    return envs;
}

ParamGrid grid_for(const CampaignContext& ctx) {
    ParamGrid grid;
    for (const auto& t : ctx.templates)
        grid.dram_block_addrs.push_back(t.addr_d);
    std::sort(grid.dram_block_addrs.begin(), grid.dram_block_addrs.end());
    grid.dram_block_addrs.erase(
        std::unique(grid.dram_block_addrs.begin(), grid.dram_block_addrs.end()),
        grid.dram_block_addrs.end());
    grid.pause_intervals_s = {ctx.cfg.refresh_pause_s / 2.0, ctx.cfg.refresh_pause_s};
    grid.block_bytes = ctx.cfg.size_d();
    grid.base = ctx.templates.front();
    grid.challenges = ctx.templates; // thresholds must cover the enrolled set
    return grid;
}

} // namespace

PolicyBundle campaign_characterize(const CampaignContext& ctx, std::span<const CrpDatabase> dbs) {
    const ParamGrid grid = grid_for(ctx);
    const auto robust_envs = env_list(ctx.cfg, ctx.cfg.temperatures_c, "char-noise");
    const auto narrow_envs = env_list(ctx.cfg, ctx.cfg.dynamic_char_temps_c, "char-narrow-noise");

    PolicyBundle bundle;
    uint64_t static_mt = 0;
    for (size_t i = 0; i < ctx.devices.size(); ++i) {
        bundle.robust_reports.push_back(
            characterize(ctx.devices[i], ctx.epoch, grid, robust_envs, ctx.cfg.segment_bits));
        bundle.narrow_reports.push_back(
            characterize(ctx.devices[i], ctx.epoch, grid, narrow_envs, ctx.cfg.segment_bits));
        static_mt = std::max(static_mt, bundle.robust_reports.back().recommended_static_mt);
    }
    bundle.static_policy = MatchPolicy::static_threshold(static_mt);

    const auto inter = intra_inter_report(ctx.devices, dbs, robust_envs, true,
                                          derive_seed(ctx.cfg.master_seed, "char-inter"));
    bundle.min_inter_observed = inter.min_inter;

    for (size_t i = 0; i < ctx.devices.size(); ++i)
        bundle.dynamic_policies.push_back(MatchPolicy::dynamic(
            bundle.narrow_reports[i].stats, ctx.cfg.dynamic_safety_c, bundle.min_inter_observed));
    return bundle;
}

AuthCampaignResult campaign_authenticate(const CampaignContext& ctx,
                                         std::span<const CrpDatabase> dbs,
                                         const PolicyBundle& policies, bool use_dynamic) {
    // A dynamic threshold is only valid inside the band it was
    // characterized on; the static threshold covers the full range.
    const std::vector<double>& temps =
        use_dynamic ? ctx.cfg.dynamic_char_temps_c : ctx.cfg.temperatures_c;
    AuthCampaignResult result;
    uint64_t noise_counter = 0;
    for (size_t i = 0; i < ctx.devices.size(); ++i) {
        const MatchPolicy& policy =
            use_dynamic ? policies.dynamic_policies[i] : policies.static_policy;
        for (double temp : temps) {
            AuthSession session(dbs[i], derive_seed(ctx.cfg.master_seed, "session",
                                                    i * 1000 + uint64_t(temp)));
            while (const CrpRecord* rec = session.next()) {
                const Environment env{temp,
                                      derive_seed(ctx.cfg.master_seed, "auth-noise", noise_counter++)};
                result.outcomes.push_back(TaggedOutcome{
                    authenticate(ctx.devices[i], dbs[i].epoch, *rec, env, policy), true});
                for (size_t j = 0; j < ctx.devices.size(); ++j) {
                    if (j == i) continue;
                    const Environment imp_env{
                        temp, derive_seed(ctx.cfg.master_seed, "auth-noise", noise_counter++)};
                    result.outcomes.push_back(TaggedOutcome{
                        authenticate(ctx.devices[j], dbs[i].epoch, *rec, imp_env, policy), false});
                }
            }
        }
    }
    const auto [tpr, fpr] = tpr_fpr(result.outcomes);
    result.tpr = tpr;
    result.fpr = fpr;
    return result;
}

} // namespace cpuf
