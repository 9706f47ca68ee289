// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cpuf/bits.hpp"
#include "cpuf/errors.hpp"
#include "cpuf/kernels.hpp"

namespace cpuf {

/// Data written into the guard bands around a DRAM block. The stored
/// guard values couple into the boundary cells' decay behaviour.
enum class WrapperPattern : uint8_t {
    all_ones = 0,
    all_zeros = 1,
    checkered = 2, // 0xAA bytes
};
constexpr unsigned kWrapperKinds = 3;
constexpr uint64_t kGuardBandBytes = 64;

uint8_t wrapper_fill_byte(WrapperPattern p);
const char* wrapper_name(WrapperPattern p);
WrapperPattern wrapper_from_name(std::string_view name);

/// Calibration constants of the physical models. Every value can be
/// overridden from the run configuration.
struct ModelParams {
    // SRAM power-up: cell skew theta ~ N(0,1); start-up bit is
    // sign(theta + sigma(T) * eta) with sigma(T) = sigma0 * (1 + kappa*|T-20|).
    double sram_sigma0 = 0.03;
    double sram_kappa = 0.015;
    // Skew drift per month of aging, in units of skew std-dev.
    double sram_aging_drift = 0.01;

    // DRAM retention: log10 t ~ N(mu, s) seconds at 20 C; temperature
    // scaling t(T) = t(20) * exp(-lambda * (T - 20)).
    double dram_log10_t_mu = 2.7781512503836436; // log10(600 s)
    double dram_log10_t_sigma = 0.38;
    double dram_temp_lambda = 0.03;
    // Multiplicative retention loss per month of aging.
    double dram_aging_per_month = 2e-4;
    // Neighbour coupling strength: a cell's retention is scaled by
    // (1 - c * f), f = charged fraction of its two horizontal neighbours.
    double wrapper_coupling = 0.1;

    bool operator==(const ModelParams&) const = default;
};

/// Operating conditions for one reading. noise_seed selects the SRAM
/// power-up noise realization; it never influences manufacturing
/// parameters or the noise-free start-up value.
struct Environment {
    double temperature_c = 20.0;
    uint64_t noise_seed = 0;

    bool operator==(const Environment&) const = default;
};
constexpr double kMinTemperatureC = 0.0;
constexpr double kMaxTemperatureC = 100.0;
constexpr double kReferenceTemperatureC = 20.0;

void validate_environment(const Environment& env);

/// Byte range within one memory.
struct MemoryRegion {
    uint64_t start = 0;
    uint64_t length = 0;

    uint64_t end() const { return start + length; }
};

/// A forged virtual device. All per-cell parameters are pure functions
/// of (seed, cell address) and are derived lazily; nothing per-cell is
/// stored, so gigabyte geometries cost nothing to forge.
///
/// Aging is cumulative device state: skew drift grows linearly in
/// months (so aging 6+6 months equals aging 12), retention is scaled
/// by (1 - k*m) per aging step.
class DeviceInstance {
public:
    DeviceInstance() = default;

    uint64_t manufacturing_seed() const { return manufacturing_seed_; }
    uint64_t sram_seed() const { return sram_seed_; }
    uint64_t dram_seed() const { return dram_seed_; }
    uint64_t sram_bytes() const { return sram_bytes_; }
    uint64_t dram_bytes() const { return dram_bytes_; }
    double age_months() const { return age_months_; }
    double dram_retention_scale() const { return dram_retention_scale_; }
    const ModelParams& params() const { return params_; }

    /// Effective skew of one SRAM cell, aging drift included.
    double sram_skew(uint64_t bit_addr) const;
    /// Retention time of one DRAM cell in seconds at temperature_c,
    /// aging included (neighbour coupling excluded; it depends on the
    /// written data, not on the cell).
    double dram_retention_s(uint64_t bit_addr, double temperature_c) const;
    /// True-cell: charged state stores logical 1. Anti-cell: charged
    /// state stores logical 0.
    bool dram_true_cell(uint64_t bit_addr) const;
    /// Raw uniform word behind the cell's retention time.
    uint32_t dram_retention_word(uint64_t bit_addr) const;

    friend DeviceInstance forge_device(uint64_t, uint64_t, uint64_t, const ModelParams&);
    friend DeviceInstance forge_hybrid_device(const DeviceInstance&, uint64_t);
    friend DeviceInstance age_device(const DeviceInstance&, double);

private:
    uint64_t manufacturing_seed_ = 0;
    uint64_t sram_seed_ = 0;
    uint64_t dram_seed_ = 0;
    uint64_t sram_bytes_ = 0;
    uint64_t dram_bytes_ = 0;
    double age_months_ = 0.0;
    double dram_retention_scale_ = 1.0;
    ModelParams params_;

    kernels::PrfKey sram_skew_key_;
    kernels::PrfKey sram_aging_key_;
    kernels::PrfKey dram_cell_key_;

    void rebuild_keys();
};

constexpr uint64_t kDefaultSramBytes = 2ull * 1024 * 1024;        // 2 MiB
constexpr uint64_t kDefaultDramBytes = 1024ull * 1024 * 1024;     // 1 GiB

/// Creates a device whose parameter fields are drawn from the
/// manufacturing seed. Deterministic: same seed, same device.
DeviceInstance forge_device(uint64_t manufacturing_seed,
                            uint64_t sram_bytes = kDefaultSramBytes,
                            uint64_t dram_bytes = kDefaultDramBytes,
                            const ModelParams& params = {});

/// Genuine SRAM host with its DRAM module swapped for one forged from
/// a different seed (the counterfeit-DIMM case).
DeviceInstance forge_hybrid_device(const DeviceInstance& sram_host, uint64_t dram_seed);

/// Returns an aged copy; the original is untouched.
DeviceInstance age_device(const DeviceInstance& device, double months);

/// Power-cycle readout of an SRAM region: bit i is 1 iff
/// theta_i + sigma(env) * eta_i > 0, eta drawn from env.noise_seed.
/// Identical env (noise_seed included) gives identical bits.
Bits sram_power_up(const DeviceInstance& device, MemoryRegion region, const Environment& env);

/// Noise-free start-up value, sign(theta): the canonical reference
/// recorded at enrollment.
Bits sram_startup_golden(const DeviceInstance& device, MemoryRegion region);

/// Writes `written` plus wrapper guard bands, pauses refresh for
/// pause_seconds, reads the region back. A cell flips iff it stores its
/// charged state and its (coupled) retention at env.temperature_c is
/// within the pause.
std::vector<uint8_t> dram_refresh_pause(const DeviceInstance& device, MemoryRegion region,
                                        std::span<const uint8_t> written, WrapperPattern wrapper,
                                        double pause_seconds, const Environment& env);

} // namespace cpuf
