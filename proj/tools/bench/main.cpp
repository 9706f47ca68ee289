// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

// Micro-benchmark for the kernel hot loops: per-cell PRF fill, Hamming
// distance and bulk XOR, dispatched backend versus the scalar
// reference. Usage: cpuf_bench [buffer_bytes] [repetitions]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "cpuf/kernels.hpp"

using namespace cpuf;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Fn>
double time_loop(int reps, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    return seconds_since(t0);
}

} // namespace

int main(int argc, char** argv) {
    size_t bytes = 128 * 1024;
    int reps = 200;
    if (argc > 1) bytes = std::strtoull(argv[1], nullptr, 0);
    if (argc > 2) reps = int(std::strtol(argv[2], nullptr, 0));
    const size_t cells = bytes * 8;

    std::printf("backend: %s, buffer %zu bytes (%zu cells), %d reps\n",
                kernels::active_backend(), bytes, cells, reps);

    const auto key = kernels::make_key(1, "bench");
    std::vector<uint32_t> w0(cells), w1(cells);
    std::vector<uint8_t> a(bytes), b(bytes), dst(bytes);
    kernels::prf_fill_bytes(kernels::make_key(2, "bench-a"), 0, a.data(), bytes);
    kernels::prf_fill_bytes(kernels::make_key(3, "bench-b"), 0, b.data(), bytes);

    volatile uint64_t sink = 0;

    const double fill_hot =
        time_loop(reps, [&] { kernels::prf_fill(key, 0, cells, w0.data(), w1.data()); });
    const double fill_ref = time_loop(
        reps, [&] { kernels::scalar::prf_fill(key, 0, cells, w0.data(), w1.data()); });
    std::printf("prf_fill   : %8.1f Mcells/s dispatched, %8.1f Mcells/s scalar (x%.2f)\n",
                cells * reps / fill_hot / 1e6, cells * reps / fill_ref / 1e6,
                fill_ref / fill_hot);

    const double ham_hot = time_loop(
        reps, [&] { sink = sink + kernels::hamming_distance(a.data(), b.data(), bytes); });
    const double ham_ref = time_loop(reps, [&] {
        sink = sink + kernels::scalar::hamming_distance(a.data(), b.data(), bytes);
    });
    std::printf("hamming    : %8.1f GB/s dispatched, %8.1f GB/s scalar (x%.2f)\n",
                bytes * double(reps) / ham_hot / 1e9, bytes * double(reps) / ham_ref / 1e9,
                ham_ref / ham_hot);

    const double xor_hot =
        time_loop(reps, [&] { kernels::xor_bytes(dst.data(), a.data(), b.data(), bytes); });
    const double xor_ref = time_loop(
        reps, [&] { kernels::scalar::xor_bytes(dst.data(), a.data(), b.data(), bytes); });
    std::printf("xor_bytes  : %8.1f GB/s dispatched, %8.1f GB/s scalar (x%.2f)\n",
                bytes * double(reps) / xor_hot / 1e9, bytes * double(reps) / xor_ref / 1e9,
                xor_ref / xor_hot);

    (void)sink;
    return 0;
}
