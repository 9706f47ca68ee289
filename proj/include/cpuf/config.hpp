// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cpuf/pipeline.hpp"

namespace cpuf {

/// Run configuration. Parsed from a flat key = value text file; every
/// key has a documented default, unknown keys are rejected, and any key
/// can be overridden through a CPUF_<KEY> environment variable (upper
/// case) or the CLI's global flags.
struct RunConfig {
    // geometry and challenge shape
    uint64_t sram_bytes = kDefaultSramBytes;
    uint64_t dram_bytes = kDefaultDramBytes;
    uint64_t size_s = kDefaultSizeS;
    uint64_t size_d_base = kDefaultSizeD;
    double scale = 0.125; // size_d = size_d_base * scale
    unsigned segment_bits = kDefaultSegmentBits;
    uint64_t addr_s = 0;
    double refresh_pause_s = kDefaultRefreshPauseS;
    std::string wrapper = "all_ones";

    // campaign
    unsigned device_count = 5;
    std::vector<uint64_t> device_seeds; // derived from master_seed when empty
    unsigned challenge_count = 10;
    std::vector<double> temperatures_c = {20.0, 40.0, 60.0};
    double enroll_temperature_c = 20.0;
    std::vector<double> dynamic_char_temps_c = {18.0, 20.0, 22.0};
    double aging_months = 12.0;
    std::string policy = "static"; // static | dynamic
    double dynamic_safety_c = 4.0;
    unsigned counterfeit_count = 5;
    std::vector<uint64_t> counterfeit_seeds; // derived when empty
    bool noise_enabled = true;
    // Hardened deployments can drop the audit copy of the golden
    // start-up values from the persisted databases.
    bool store_golden_startups = true;

    // model calibration (ModelParams overrides)
    double sram_sigma0 = ModelParams{}.sram_sigma0;
    double sram_kappa = ModelParams{}.sram_kappa;
    double sram_aging_drift = ModelParams{}.sram_aging_drift;
    double dram_log10_t_mu = ModelParams{}.dram_log10_t_mu;
    double dram_log10_t_sigma = ModelParams{}.dram_log10_t_sigma;
    double dram_temp_lambda = ModelParams{}.dram_temp_lambda;
    double dram_aging_per_month = ModelParams{}.dram_aging_per_month;
    double wrapper_coupling = ModelParams{}.wrapper_coupling;

    // run
    uint64_t master_seed = 1;
    std::string out_dir = "out";

    uint64_t size_d() const;
    ModelParams model_params() const;
    WrapperPattern wrapper_pattern() const;
    void validate() const;

    /// Canonical text form (sorted keys); hashed for the manifest.
    std::string canonical_text() const;
    std::string config_hash() const;
};

/// Parses a config file. Unknown keys, malformed values and
/// out-of-range entries raise ConfigError naming the key and line.
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Applies CPUF_<KEY> environment overrides on top of a parsed config.
void apply_env_overrides(RunConfig& cfg);

/// Labeled seed derivation: independent streams fan out of one master
/// seed, so campaigns are reproducible end to end.
uint64_t derive_seed(uint64_t master, std::string_view label, uint64_t index = 0);

/// Writes <out_dir>/manifest.json recording provenance (config hash,
/// seeds, artifact version, timestamp) and the produced files.
void write_manifest(const std::filesystem::path& out_dir, const RunConfig& cfg,
                    const std::vector<std::string>& outputs);

} // namespace cpuf
