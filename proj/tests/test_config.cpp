// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "cpuf/config.hpp"
#include "cpuf/wire.hpp"

using namespace cpuf;

TEST_CASE("defaults parse, validate and round-trip through canonical text") {
    const RunConfig def;
    def.validate();
    const RunConfig back = parse_config_text(def.canonical_text());
    CHECK(back.canonical_text() == def.canonical_text());
    CHECK(back.config_hash() == def.config_hash());
    CHECK(def.size_d() == 16 * 1024); // 128 KiB at the default 1/8 scale
}

TEST_CASE("every field change moves the config hash") {
    const RunConfig def;
    RunConfig a = def;
    a.master_seed = 2;
    CHECK(a.config_hash() != def.config_hash());
    RunConfig b = def;
    b.scale = 1.0;
    CHECK(b.config_hash() != def.config_hash());
    RunConfig c = def;
    c.device_seeds = {1, 2, 3};
    CHECK(c.config_hash() != def.config_hash());
}

TEST_CASE("parser diagnostics carry key and line") {
    try {
        parse_config_text("scale = 0.5\nbogus_key = 1\n", "test.conf");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "bogus_key");
        CHECK(e.line() == 2);
    }
    try {
        parse_config_text("challenge_count = -2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "challenge_count");
    }
    // Range violations name the key too.
    CHECK_THROWS_AS(parse_config_text("temperatures_c = 20,101\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("scale = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("wrapper = zigzag\n"), ConfigError);
    // Comments and blank lines are fine.
    const RunConfig ok = parse_config_text("# comment\n\nscale = 0.25\n");
    CHECK(ok.scale == 0.25);
}

TEST_CASE("labeled seed derivation separates streams") {
    std::set<uint64_t> seen;
    for (uint64_t i = 0; i < 50; ++i) {
        CHECK(seen.insert(derive_seed(1, "device", i)).second);
        CHECK(seen.insert(derive_seed(1, "noise", i)).second);
        CHECK(seen.insert(derive_seed(2, "device", i)).second);
    }
    CHECK(derive_seed(1, "device", 7) == derive_seed(1, "device", 7));
}

TEST_CASE("bit field extract/inject agree with a per-bit reference") {
    std::mt19937_64 gen(5);
    Bits b(200);
    for (size_t i = 0; i < 200; ++i) b.set(i, gen() & 1);
    for (int trial = 0; trial < 500; ++trial) {
        const unsigned width = 1 + unsigned(gen() % 32);
        const size_t off = gen() % (200 - width);
        uint32_t ref = 0;
        for (unsigned i = 0; i < width; ++i) ref = (ref << 1) | uint32_t(b.get(off + i));
        CHECK(b.extract(off, width) == ref);

        const uint32_t value = uint32_t(gen()) & (width == 32 ? 0xFFFFFFFFu : ((1u << width) - 1));
        Bits c = b;
        c.inject(off, width, value);
        CHECK(c.extract(off, width) == value);
        // Neighbouring bits untouched.
        if (off > 0) CHECK(c.get(off - 1) == b.get(off - 1));
        if (off + width < 200) CHECK(c.get(off + width) == b.get(off + width));
    }
}

TEST_CASE("from_bytes clears slack bits past the end") {
    const Bits b = Bits::from_bytes({0xFF, 0xFF}, 12);
    CHECK(b.size() == 12);
    CHECK(b.popcount() == 12);
    CHECK(b.bytes()[1] == 0xF0); // trailing nibble zeroed
    CHECK(b == Bits::from_bytes({0xFF, 0xF3}, 12)); // slack content irrelevant
    CHECK_THROWS_AS(Bits::from_bytes({0xFF}, 9), InvalidLengthError);
}

TEST_CASE("wire reader rejects truncated input") {
    wire::Writer w;
    w.u64(42);
    w.prefixed_bytes(std::vector<uint8_t>{1, 2, 3});
    const auto bytes = w.data();

    wire::Reader ok(bytes);
    CHECK(ok.u64() == 42);
    CHECK(ok.prefixed_bytes() == std::vector<uint8_t>{1, 2, 3});
    CHECK(ok.done());

    auto cut = bytes;
    cut.resize(bytes.size() - 1);
    wire::Reader bad(cut);
    bad.u64();
    CHECK_THROWS_AS(bad.prefixed_bytes(), FormatError);
}
