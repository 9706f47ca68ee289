// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cpuf/pipeline.hpp"
#include "cpuf/sha256.hpp"

using namespace cpuf;

namespace {

// Independent SHA-256 oracle: a direct transcription of the FIPS 180-4
// algorithm that pads the whole message up front and never shares code
// with the production implementation.
std::vector<uint8_t> sha256_oracle(std::vector<uint8_t> msg) {
    static const uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    const uint64_t bitlen = uint64_t(msg.size()) * 8;
    msg.push_back(0x80);
    while (msg.size() % 64 != 56) msg.push_back(0x00);
    for (int i = 7; i >= 0; --i) msg.push_back(uint8_t(bitlen >> (8 * i)));

    uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                     0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    auto rr = [](uint32_t x, int n) { return (x >> n) | (x << (32 - n)); };
    for (size_t blk = 0; blk < msg.size(); blk += 64) {
        uint32_t w[64];
        for (int t = 0; t < 16; ++t)
            w[t] = uint32_t(msg[blk + 4 * t]) << 24 | uint32_t(msg[blk + 4 * t + 1]) << 16 |
                   uint32_t(msg[blk + 4 * t + 2]) << 8 | uint32_t(msg[blk + 4 * t + 3]);
        for (int t = 16; t < 64; ++t)
            w[t] = (rr(w[t - 2], 17) ^ rr(w[t - 2], 19) ^ (w[t - 2] >> 10)) + w[t - 7] +
                   (rr(w[t - 15], 7) ^ rr(w[t - 15], 18) ^ (w[t - 15] >> 3)) + w[t - 16];
        uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
        for (int t = 0; t < 64; ++t) {
            const uint32_t t1 =
                hh + (rr(e, 6) ^ rr(e, 11) ^ rr(e, 25)) + ((e & f) ^ (~e & g)) + K[t] + w[t];
            const uint32_t t2 = (rr(a, 2) ^ rr(a, 13) ^ rr(a, 22)) + ((a & b) ^ (a & c) ^ (b & c));
            hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }
    std::vector<uint8_t> out(32);
    for (int i = 0; i < 8; ++i) {
        out[4 * i] = uint8_t(h[i] >> 24);
        out[4 * i + 1] = uint8_t(h[i] >> 16);
        out[4 * i + 2] = uint8_t(h[i] >> 8);
        out[4 * i + 3] = uint8_t(h[i]);
    }
    return out;
}

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

std::vector<uint8_t> random_bytes(std::mt19937_64& gen, size_t n) {
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = uint8_t(gen());
    return v;
}

CorrectedValue cv_from_bits(std::initializer_list<int> bits) {
    CorrectedValue cv;
    cv.bits = Bits(bits.size());
    size_t i = 0;
    for (int b : bits) cv.bits.set(i++, b != 0);
    return cv;
}

struct Fixture {
    DeviceInstance device = forge_device(100, 64 * 1024, 1024 * 1024);
    ClientEpoch epoch{0, 40.0};
    Challenge challenge;

    Fixture() {
        challenge.id = 7;
        challenge.addr_s = 0;
        challenge.size_s = 32;
        challenge.size_d = 2048;
        std::mt19937_64 gen(555);
        challenge.bitstream_c = random_bytes(gen, challenge.size_d);
        challenge.addr_d = 8192;
        challenge.wrapper = WrapperPattern::all_ones;
        challenge.refresh_pause_s = 40.0;
        const Bits golden = sram_startup_golden(device, {challenge.addr_s, challenge.size_s});
        challenge.ecc = gen_err_corr_data(golden, 8);
    }
};

} // namespace

TEST_CASE("sha256 standard vectors") {
    CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const std::string abc = "abc";
    CHECK(sha256_hex(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(abc.data()),
                                              abc.size())) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const std::string two = "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq";
    CHECK(sha256_hex(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(two.data()),
                                              two.size())) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");

    // One million 'a' bytes, streamed in uneven chunks.
    Sha256 h;
    const std::vector<uint8_t> chunk(997, 'a');
    size_t left = 1000000;
    while (left > 0) {
        const size_t n = std::min(left, chunk.size());
        h.update(chunk.data(), n);
        left -= n;
    }
    CHECK(to_hex(h.finish()) == "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 agrees with an independent implementation on random inputs") {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 200; ++trial) {
        const size_t n = gen() % 300;
        const auto msg = random_bytes(gen, n);
        const auto got = sha256(msg);
        const auto expect = sha256_oracle(msg);
        CHECK(std::equal(got.begin(), got.end(), expect.begin(), expect.end()));
    }
}

TEST_CASE("xor_stage identities") {
    std::mt19937_64 gen(1);
    const auto data = random_bytes(gen, 256);
    // All-zero corrected value passes the bitstream through.
    CorrectedValue zeros;
    zeros.bits = Bits(32);
    CHECK(xor_stage(zeros, data) == data);
    // All-ones complements it.
    CorrectedValue ones;
    ones.bits = Bits(32);
    for (size_t i = 0; i < 32; ++i) ones.bits.set(i, true);
    const auto complemented = xor_stage(ones, data);
    for (size_t i = 0; i < data.size(); ++i) CHECK(complemented[i] == uint8_t(~data[i]));
}

TEST_CASE("xor_stage tiles bit-granularly from bit zero") {
    // cv = 0b10 tiled over one byte gives 0xAA; 0xFF ^ 0xAA = 0x55.
    const auto out = xor_stage(cv_from_bits({1, 0}), std::vector<uint8_t>{0xFF});
    CHECK(out.size() == 1);
    CHECK(out[0] == 0x55);
}

TEST_CASE("xor_stage matches a per-bit tiling oracle for awkward widths") {
    std::mt19937_64 gen(2);
    for (size_t cv_bits : {size_t(1), size_t(2), size_t(3), size_t(5), size_t(8), size_t(13),
                           size_t(32), size_t(40)}) {
        CorrectedValue cv;
        cv.bits = Bits(cv_bits);
        for (size_t i = 0; i < cv_bits; ++i) cv.bits.set(i, gen() & 1);
        const auto data = random_bytes(gen, 67);
        const auto out = xor_stage(cv, data);
        REQUIRE(out.size() == data.size());
        for (size_t p = 0; p < data.size() * 8; ++p) {
            const bool in_bit = (data[p >> 3] >> (7 - (p & 7))) & 1u;
            const bool out_bit = (out[p >> 3] >> (7 - (p & 7))) & 1u;
            CHECK(out_bit == (in_bit ^ cv.bits.get(p % cv_bits)));
        }
    }
}

TEST_CASE("xor_stage rejects empty inputs") {
    CorrectedValue empty;
    CHECK_THROWS_AS(xor_stage(empty, std::vector<uint8_t>{0xFF}), InvalidArgumentError);
    CHECK_THROWS_AS(xor_stage(cv_from_bits({1}), std::vector<uint8_t>{}), InvalidArgumentError);
}

TEST_CASE("hash_stage hashes 32-byte chunks independently") {
    const std::vector<uint8_t> zeros(32, 0);
    const auto out = hash_stage(zeros);
    CHECK(to_hex(out) == "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925");

    std::mt19937_64 gen(3);
    auto data = random_bytes(gen, 64);
    const auto base = hash_stage(data);
    data[40] ^= 0x01; // second chunk only
    const auto changed = hash_stage(data);
    CHECK(std::equal(base.begin(), base.begin() + 32, changed.begin()));
    CHECK(!std::equal(base.begin() + 32, base.end(), changed.begin() + 32));

    CHECK_THROWS_AS(hash_stage(random_bytes(gen, 33)), InvalidLengthError);
    CHECK_THROWS_AS(hash_stage(std::vector<uint8_t>{}), InvalidLengthError);
}

TEST_CASE("hash_stage avalanche: one flipped input bit changes half the chunk") {
    std::mt19937_64 gen(4);
    uint64_t total = 0;
    uint64_t lo = UINT64_MAX, hi = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        auto data = random_bytes(gen, 64);
        const auto base = hash_stage(data);
        data[gen() % 32] ^= uint8_t(1u << (gen() % 8)); // inside chunk 0
        const auto changed = hash_stage(data);
        uint64_t hd = 0;
        for (size_t i = 0; i < 32; ++i) hd += std::popcount(unsigned(base[i] ^ changed[i]));
        total += hd;
        lo = std::min(lo, hd);
        hi = std::max(hi, hd);
        // Chunk 1 untouched.
        CHECK(std::equal(base.begin() + 32, base.end(), changed.begin() + 32));
    }
    const double mean = double(total) / trials;
    CHECK(mean > 120.0);
    CHECK(mean < 136.0);
    CHECK(lo >= 90);
    CHECK(hi <= 166);
}

TEST_CASE("zero pause pushes the hashed value straight through") {
    Fixture fx;
    fx.challenge.refresh_pause_s = 0.0;
    fx.epoch.refresh_pause_s = 0.0;
    const Response r = client_generate_response(fx.device, fx.epoch, fx.challenge,
                                                Environment{20.0, 9});
    // Reconstruct HV by hand from the golden start-up value.
    const Bits golden = sram_startup_golden(fx.device, {fx.challenge.addr_s, fx.challenge.size_s});
    const CorrectedValue cv = corr_startup_val(golden, 8, fx.challenge.ecc);
    const auto hv = hash_stage(xor_stage(cv, fx.challenge.bitstream_c));
    CHECK(r.bitstream_r == hv);
    CHECK(r.id == fx.challenge.id);
}

TEST_CASE("response generation is deterministic per environment") {
    Fixture fx;
    const Environment env{40.0, 31337};
    const Response a = generate_response(fx.device, fx.challenge, env);
    const Response b = generate_response(fx.device, fx.challenge, env);
    CHECK(a == b);
    const Response c = generate_response(fx.device, fx.challenge, Environment{40.0, 31338});
    CHECK(c.bitstream_r.size() == a.bitstream_r.size());
}

TEST_CASE("missing correction data aborts the pipeline") {
    Fixture fx;
    fx.challenge.ecc = EccData{};
    CHECK_THROWS_AS(generate_response(fx.device, fx.challenge, Environment{}),
                    InvalidArgumentError);
}

TEST_CASE("stage errors propagate with no partial response") {
    Fixture fx;
    fx.challenge.size_d = 2040; // not a multiple of the hash chunk
    fx.challenge.bitstream_c.resize(2040);
    CHECK_THROWS_AS(generate_response(fx.device, fx.challenge, Environment{}),
                    InvalidLengthError);
    Fixture fx2;
    fx2.challenge.addr_d = 16; // guard band would start below zero
    CHECK_THROWS_AS(generate_response(fx2.device, fx2.challenge, Environment{}), OutOfRangeError);
}

TEST_CASE("no-hash variant feeds the xor output to the DRAM") {
    Fixture fx;
    fx.challenge.refresh_pause_s = 0.0;
    fx.epoch.refresh_pause_s = 0.0;
    const Response r = client_generate_response(fx.device, fx.epoch, fx.challenge,
                                                Environment{20.0, 4}, /*use_hash=*/false);
    const Bits golden = sram_startup_golden(fx.device, {fx.challenge.addr_s, fx.challenge.size_s});
    const CorrectedValue cv = corr_startup_val(golden, 8, fx.challenge.ecc);
    CHECK(r.bitstream_r == xor_stage(cv, fx.challenge.bitstream_c));
}

TEST_CASE("no-hash inter-device distance follows the corrected-value difference") {
    // With zero pause the response HD is exactly w(CV_a ^ CV_b) * bits / |CV|.
    Fixture fx;
    fx.challenge.refresh_pause_s = 0.0;
    fx.epoch.refresh_pause_s = 0.0;
    const auto dev_b = forge_device(101, 64 * 1024, 1024 * 1024);
    Challenge chal_b = fx.challenge;
    chal_b.ecc = gen_err_corr_data(sram_startup_golden(dev_b, {0, 32}), 8);

    const Response ra = client_generate_response(fx.device, fx.epoch, fx.challenge,
                                                 Environment{20.0, 1}, false);
    const Response rb = client_generate_response(dev_b, fx.epoch, chal_b, Environment{20.0, 2},
                                                 false);
    const Bits cva = corr_startup_val(sram_startup_golden(fx.device, {0, 32}), 8,
                                      fx.challenge.ecc)
                         .bits;
    const Bits cvb = corr_startup_val(sram_startup_golden(dev_b, {0, 32}), 8, chal_b.ecc).bits;
    const uint64_t k = hamming(cva, cvb);
    const uint64_t hd = kernels::hamming_distance(ra.bitstream_r.data(), rb.bitstream_r.data(),
                                                  ra.bitstream_r.size());
    CHECK(hd == k * (fx.challenge.size_d * 8) / 32);
}

TEST_CASE("single-bit corrected-value sensitivity") {
    Fixture fx;
    const Bits golden = sram_startup_golden(fx.device, {0, 32});
    CorrectedValue cv = corr_startup_val(golden, 8, fx.challenge.ecc);
    const auto base = xor_stage(cv, fx.challenge.bitstream_c);
    cv.bits.flip(5);
    const auto flipped = xor_stage(cv, fx.challenge.bitstream_c);
    const uint64_t hd =
        kernels::hamming_distance(base.data(), flipped.data(), base.size());
    CHECK(hd == fx.challenge.size_d * 8 / 32);
}

TEST_CASE("challenge validation enforces the structural invariants") {
    Fixture fx;
    Challenge c = fx.challenge;
    c.size_s = 31; // 248 bits cannot be cut into 16-bit segments
    CHECK_THROWS_AS(c.validate(fx.device, 16, false), InvalidLengthError);
    c = fx.challenge;
    c.bitstream_c.pop_back();
    CHECK_THROWS_AS(c.validate(fx.device, 8, false), InvalidLengthError);
    c = fx.challenge;
    c.addr_s = fx.device.sram_bytes() - 16;
    CHECK_THROWS_AS(c.validate(fx.device, 8, false), OutOfRangeError);
    c = fx.challenge;
    c.refresh_pause_s = -1.0;
    CHECK_THROWS_AS(c.validate(fx.device, 8, false), InvalidArgumentError);
    fx.challenge.validate(fx.device, 8, true); // the fixture itself is valid
}

TEST_CASE("challenge and response serialization round-trips byte-exactly") {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 50; ++trial) {
        Challenge c;
        c.id = gen();
        c.addr_s = gen() % 1000;
        c.size_s = 32;
        c.size_d = 64 * (1 + gen() % 8);
        c.bitstream_c = random_bytes(gen, c.size_d);
        c.addr_d = 4096 + (gen() % 64) * 64;
        c.wrapper = WrapperPattern(gen() % 3);
        c.refresh_pause_s = double(gen() % 1000) / 10.0;
        if (trial % 3 != 0) {
            Bits golden(c.size_s * 8);
            for (size_t i = 0; i < golden.size(); ++i) golden.set(i, gen() & 1);
            c.ecc = gen_err_corr_data(golden, 8);
        }
        wire::Writer w;
        serialize_challenge(c, w);
        const auto bytes = w.data();
        wire::Reader r(bytes);
        const Challenge back = deserialize_challenge(r, 8);
        CHECK(r.done());
        CHECK(back == c);
        wire::Writer w2;
        serialize_challenge(back, w2);
        CHECK(w2.data() == bytes);

        Response resp{gen(), random_bytes(gen, 128)};
        wire::Writer rw;
        serialize_response(resp, rw);
        wire::Reader rr(rw.data());
        CHECK(deserialize_response(rr) == resp);
    }
}
