// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "cpuf/errors.hpp"
#include "cpuf/normal.hpp"

namespace cpuf {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Crude starting guess for the quantile; Newton does the rest.
double quantile_guess(double p) {
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return -(q - (2.515517 + 0.802853 * q + 0.010328 * q * q) /
                         (1.0 + 1.432788 * q + 0.189269 * q * q + 0.001308 * q * q * q));
    }
    // Near the center the quantile is close to linear.
    return (p - 0.5) * 2.5066282746310002;
}

// p in (0, 0.5]; solves normal_cdf(z) = p to ~1e-14.
double inverse_lower_half(double p) {
    double z = quantile_guess(p);
    for (int it = 0; it < 60; ++it) {
        const double err = normal_cdf(z) - p;
        const double step = err / normal_pdf(z);
        z -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
    }
    return z;
}

} // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw InvalidArgumentError("inverse_normal_cdf: p must lie in (0, 1)");
    if (p <= 0.5) return inverse_lower_half(p);
    return -inverse_lower_half(1.0 - p);
}

double uniform_from_u32(uint32_t w) {
    return (double(w) + 0.5) * 0x1p-32;
}

double normal_from_u32(uint32_t w) {
    // Complemented probabilities of the form ((2^32 - w) - 0.5) * 2^-32
    // are exact in double, so both halves use the precise branch.
    if (w < 0x80000000u) return inverse_lower_half(uniform_from_u32(w));
    const double q = (double(0x100000000ull - w) - 0.5) * 0x1p-32;
    return -inverse_lower_half(q);
}

uint64_t u32_threshold_for_z(double z) {
    const double p = normal_cdf(z);
    double scaled = std::nearbyint(p * 0x1p32);
    if (scaled < 0.0) scaled = 0.0;
    if (scaled > 0x1p32) scaled = 0x1p32;
    return uint64_t(scaled);
}

} // namespace cpuf
