// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "cpuf/analysis.hpp"
#include "cpuf/config.hpp"

namespace cpuf {

/// Everything a campaign run needs: the forged fleet, the shared
/// challenge templates and the initial reconfiguration epoch.
struct CampaignContext {
    RunConfig cfg;
    ModelParams params;
    std::vector<DeviceInstance> devices;
    ClientEpoch epoch;
    std::vector<Challenge> templates;
};

/// Forges the device fleet and derives the shared random challenge set
/// from the master seed.
CampaignContext make_campaign(const RunConfig& cfg);

std::vector<uint64_t> campaign_device_seeds(const RunConfig& cfg);
std::vector<uint64_t> campaign_counterfeit_seeds(const RunConfig& cfg);

/// Random challenge templates (ecc empty): fresh bitstream_c and DRAM
/// block per challenge, knobs from the epoch, ids 1..n.
std::vector<Challenge> make_challenge_templates(const RunConfig& cfg, const ClientEpoch& epoch);

/// Enrolls every device at the enrollment temperature.
std::vector<CrpDatabase> campaign_enroll(const CampaignContext& ctx);

/// Characterization across the configured temperature list plus the
/// tight band used for per-device dynamic thresholds.
struct PolicyBundle {
    MatchPolicy static_policy;                 // fleet-wide, temperature-robust
    std::vector<MatchPolicy> dynamic_policies; // one per device
    uint64_t min_inter_observed = 0;
    std::vector<CharacterizationReport> robust_reports;  // over temperatures_c
    std::vector<CharacterizationReport> narrow_reports;  // over dynamic_char_temps_c
};
PolicyBundle campaign_characterize(const CampaignContext& ctx, std::span<const CrpDatabase> dbs);

/// Genuine and impostor authentications across the configured
/// temperatures under one fleet policy choice.
struct AuthCampaignResult {
    std::vector<TaggedOutcome> outcomes;
    double tpr = 0.0;
    double fpr = 0.0;
};
AuthCampaignResult campaign_authenticate(const CampaignContext& ctx, std::span<const CrpDatabase> dbs,
                                         const PolicyBundle& policies, bool use_dynamic);

} // namespace cpuf
