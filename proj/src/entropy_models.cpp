// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "cpuf/entropy_models.hpp"
#include "cpuf/normal.hpp"

namespace cpuf {

namespace {

constexpr double kLn10 = 2.302585092994046;

void check_region(MemoryRegion region, uint64_t memory_bytes, const char* what) {
    if (region.start > memory_bytes || region.length > memory_bytes - region.start)
        throw OutOfRangeError(std::string(what) + ": region [" + std::to_string(region.start) +
                              ", " + std::to_string(region.end()) + ") exceeds geometry of " +
                              std::to_string(memory_bytes) + " bytes");
}

} // namespace

uint8_t wrapper_fill_byte(WrapperPattern p) {
    switch (p) {
        case WrapperPattern::all_ones: return 0xFF;
        case WrapperPattern::all_zeros: return 0x00;
        case WrapperPattern::checkered: return 0xAA;
    }
    throw InvalidArgumentError("unknown wrapper pattern");
}

const char* wrapper_name(WrapperPattern p) {
    switch (p) {
        case WrapperPattern::all_ones: return "all_ones";
        case WrapperPattern::all_zeros: return "all_zeros";
        case WrapperPattern::checkered: return "checkered";
    }
    throw InvalidArgumentError("unknown wrapper pattern");
}

WrapperPattern wrapper_from_name(std::string_view name) {
    if (name == "all_ones") return WrapperPattern::all_ones;
    if (name == "all_zeros") return WrapperPattern::all_zeros;
    if (name == "checkered") return WrapperPattern::checkered;
    throw InvalidArgumentError("unknown wrapper pattern: " + std::string(name));
}

void validate_environment(const Environment& env) {
    if (!(env.temperature_c >= kMinTemperatureC && env.temperature_c <= kMaxTemperatureC))
        throw InvalidArgumentError("temperature " + std::to_string(env.temperature_c) +
                                   " C outside model validity range [0, 100]");
}

void DeviceInstance::rebuild_keys() {
    sram_skew_key_ = kernels::make_key(sram_seed_, "sram-skew");
    sram_aging_key_ = kernels::make_key(sram_seed_, "sram-aging");
    dram_cell_key_ = kernels::make_key(dram_seed_, "dram-cell");
}

DeviceInstance forge_device(uint64_t manufacturing_seed, uint64_t sram_bytes, uint64_t dram_bytes,
                            const ModelParams& params) {
    if (sram_bytes == 0 || dram_bytes == 0)
        throw InvalidGeometryError("forge_device: geometries must be positive (sram=" +
                                   std::to_string(sram_bytes) + ", dram=" +
                                   std::to_string(dram_bytes) + ")");
    DeviceInstance d;
    d.manufacturing_seed_ = manufacturing_seed;
    d.sram_seed_ = manufacturing_seed;
    d.dram_seed_ = manufacturing_seed;
    d.sram_bytes_ = sram_bytes;
    d.dram_bytes_ = dram_bytes;
    d.params_ = params;
    d.rebuild_keys();
    return d;
}

DeviceInstance forge_hybrid_device(const DeviceInstance& sram_host, uint64_t dram_seed) {
    // Fresh counterfeit module: new cell parameters, no accumulated
    // retention aging. The host's SRAM side is untouched.
    DeviceInstance d = sram_host;
    d.dram_seed_ = dram_seed;
    d.dram_retention_scale_ = 1.0;
    d.rebuild_keys();
    return d;
}

DeviceInstance age_device(const DeviceInstance& device, double months) {
    if (!(months > 0.0))
        throw InvalidArgumentError("age_device: months must be positive");
    const double factor = 1.0 - device.params_.dram_aging_per_month * months;
    if (!(factor > 0.0))
        throw InvalidArgumentError("age_device: aging step exceeds model validity");
    DeviceInstance d = device;
    d.age_months_ += months;
    d.dram_retention_scale_ *= factor;
    return d;
}

double DeviceInstance::sram_skew(uint64_t bit_addr) const {
    const kernels::PrfBlock b = kernels::prf_block(sram_skew_key_, bit_addr);
    double theta = normal_from_u32(b.w[0]);
    if (age_months_ > 0.0) {
        const kernels::PrfBlock a = kernels::prf_block(sram_aging_key_, bit_addr);
        theta += params_.sram_aging_drift * age_months_ * normal_from_u32(a.w[0]);
    }
    return theta;
}

uint32_t DeviceInstance::dram_retention_word(uint64_t bit_addr) const {
    return kernels::prf_block(dram_cell_key_, bit_addr).w[0];
}

bool DeviceInstance::dram_true_cell(uint64_t bit_addr) const {
    return kernels::prf_block(dram_cell_key_, bit_addr).w[1] & 1u;
}

double DeviceInstance::dram_retention_s(uint64_t bit_addr, double temperature_c) const {
    const double z = normal_from_u32(dram_retention_word(bit_addr));
    const double log10_t20 = params_.dram_log10_t_mu + params_.dram_log10_t_sigma * z;
    return std::pow(10.0, log10_t20) * dram_retention_scale_ *
           std::exp(-params_.dram_temp_lambda * (temperature_c - kReferenceTemperatureC));
}

Bits sram_power_up(const DeviceInstance& device, MemoryRegion region, const Environment& env) {
    check_region(region, device.sram_bytes(), "sram_power_up");
    validate_environment(env);

    const ModelParams& p = device.params();
    const double sigma =
        p.sram_sigma0 * (1.0 + p.sram_kappa * std::abs(env.temperature_c - kReferenceTemperatureC));
    const double drift_amp = p.sram_aging_drift * device.age_months();

    const size_t n = size_t(region.length) * 8;
    const uint64_t first_bit = region.start * 8;

    std::vector<uint32_t> w_theta(n);
    kernels::prf_fill(kernels::make_key(device.sram_seed(), "sram-skew"), first_bit, n,
                      w_theta.data(), nullptr);
    std::vector<uint32_t> w_zeta;
    if (drift_amp != 0.0) {
        w_zeta.resize(n);
        kernels::prf_fill(kernels::make_key(device.sram_seed(), "sram-aging"), first_bit, n,
                          w_zeta.data(), nullptr);
    }
    std::vector<uint32_t> w_eta;
    if (sigma != 0.0) {
        w_eta.resize(n);
        kernels::prf_fill(kernels::make_key(env.noise_seed, "sram-noise"), first_bit, n,
                          w_eta.data(), nullptr);
    }

    Bits out(n);
    for (size_t i = 0; i < n; ++i) {
        double v = normal_from_u32(w_theta[i]);
        if (drift_amp != 0.0) v += drift_amp * normal_from_u32(w_zeta[i]);
        if (sigma != 0.0) v += sigma * normal_from_u32(w_eta[i]);
        if (v > 0.0) out.set(i, true);
    }
    return out;
}

Bits sram_startup_golden(const DeviceInstance& device, MemoryRegion region) {
    check_region(region, device.sram_bytes(), "sram_startup_golden");
    const double drift_amp = device.params().sram_aging_drift * device.age_months();
    const size_t n = size_t(region.length) * 8;
    const uint64_t first_bit = region.start * 8;

    std::vector<uint32_t> w_theta(n);
    kernels::prf_fill(kernels::make_key(device.sram_seed(), "sram-skew"), first_bit, n,
                      w_theta.data(), nullptr);
    std::vector<uint32_t> w_zeta;
    if (drift_amp != 0.0) {
        w_zeta.resize(n);
        kernels::prf_fill(kernels::make_key(device.sram_seed(), "sram-aging"), first_bit, n,
                          w_zeta.data(), nullptr);
    }

    Bits out(n);
    for (size_t i = 0; i < n; ++i) {
        double v = normal_from_u32(w_theta[i]);
        if (drift_amp != 0.0) v += drift_amp * normal_from_u32(w_zeta[i]);
        if (v > 0.0) out.set(i, true);
    }
    return out;
}

std::vector<uint8_t> dram_refresh_pause(const DeviceInstance& device, MemoryRegion region,
                                        std::span<const uint8_t> written, WrapperPattern wrapper,
                                        double pause_seconds, const Environment& env) {
    if (written.size() != region.length)
        throw InvalidLengthError("dram_refresh_pause: written data is " +
                                 std::to_string(written.size()) + " bytes, region is " +
                                 std::to_string(region.length));
    check_region(region, device.dram_bytes(), "dram_refresh_pause");
    if (region.start < kGuardBandBytes || region.end() + kGuardBandBytes > device.dram_bytes())
        throw OutOfRangeError("dram_refresh_pause: guard bands fall outside the DRAM geometry");
    if (!(pause_seconds >= 0.0))
        throw InvalidArgumentError("dram_refresh_pause: pause must be non-negative");
    validate_environment(env);

    std::vector<uint8_t> out(written.begin(), written.end());
    if (pause_seconds == 0.0 || region.length == 0) return out;

    const ModelParams& p = device.params();

    // Per-cell flip rule in uniform space: the cell's PRF word is
    // compared against round(Phi(z_k) * 2^32), where z_k folds the
    // pause, temperature, aging and the neighbour-coupling class
    // k = number of charged horizontal neighbours. Exact integer
    // compares keep the decay monotone in pause and temperature.
    uint64_t thresholds[3];
    for (int k = 0; k < 3; ++k) {
        const double couple = 1.0 - p.wrapper_coupling * (double(k) / 2.0);
        const double z =
            (std::log10(pause_seconds) - p.dram_log10_t_mu -
             std::log10(device.dram_retention_scale() * couple) +
             p.dram_temp_lambda * (env.temperature_c - kReferenceTemperatureC) / kLn10) /
            p.dram_log10_t_sigma;
        thresholds[k] = u32_threshold_for_z(z);
    }

    // One halo byte each side so every region cell has both neighbours;
    // the halo holds the adjacent wrapper guard-band data.
    const size_t n = size_t(region.length) * 8;
    const size_t ext_n = n + 16;
    const uint64_t ext_first_bit = region.start * 8 - 8;
    const uint8_t fill = wrapper_fill_byte(wrapper);

    std::vector<uint8_t> written_ext;
    written_ext.reserve(region.length + 2);
    written_ext.push_back(fill);
    written_ext.insert(written_ext.end(), written.begin(), written.end());
    written_ext.push_back(fill);

    std::vector<uint32_t> w_ret(ext_n), w_aux(ext_n);
    kernels::prf_fill(kernels::make_key(device.dram_seed(), "dram-cell"), ext_first_bit, ext_n,
                      w_ret.data(), w_aux.data());

    std::vector<uint8_t> charged(ext_n);
    for (size_t i = 0; i < ext_n; ++i) {
        const bool stored = (written_ext[i >> 3] >> (7 - (i & 7))) & 1u;
        const bool true_cell = w_aux[i] & 1u;
        charged[i] = stored == true_cell;
    }

    for (size_t i = 0; i < n; ++i) {
        const size_t e = i + 8;
        if (!charged[e]) continue; // a discharged cell has nothing to lose
        const unsigned k = unsigned(charged[e - 1]) + unsigned(charged[e + 1]);
        if (uint64_t(w_ret[e]) < thresholds[k]) out[i >> 3] ^= uint8_t(0x80u >> (i & 7));
    }
    return out;
}

} // namespace cpuf
