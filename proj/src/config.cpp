// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "cpuf/config.hpp"
#include "cpuf/kernels.hpp"
#include "cpuf/sha256.hpp"
#include "cpuf/version.hpp"

namespace cpuf {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(uint8_t(s[a]))) ++a;
    while (b > a && std::isspace(uint8_t(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
    try {
        // stoull accepts a leading minus and wraps; reject it up front.
        if (v.empty() || v[0] == '-') throw std::invalid_argument("negative");
        size_t pos = 0;
        const uint64_t out = std::stoull(v, &pos, 0);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected unsigned integer, got '" + v + "'", key,
                          line);
    }
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double out = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(out)) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected number, got '" + v + "'", key, line);
    }
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'", key, line);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key, int line) {
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(item, key, line));
    return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& v, const std::string& key, int line) {
    std::vector<uint64_t> out;
    for (const auto& item : split_list(v)) out.push_back(parse_u64(item, key, line));
    return out;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& v, std::string (*fmt)(T)) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt(v[i]);
    }
    return out;
}

struct Field {
    const char* name;
    std::function<void(RunConfig&, const std::string&, int)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
    auto u64_field = [](const char* name, uint64_t RunConfig::* m) {
        return Field{name,
                     [m, name](RunConfig& c, const std::string& v, int l) { c.*m = parse_u64(v, name, l); },
                     [m](const RunConfig& c) { return std::to_string(c.*m); }};
    };
    auto dbl_field = [](const char* name, double RunConfig::* m) {
        return Field{name,
                     [m, name](RunConfig& c, const std::string& v, int l) { c.*m = parse_double(v, name, l); },
                     [m](const RunConfig& c) { return fmt_g(c.*m); }};
    };
    auto str_field = [](const char* name, std::string RunConfig::* m) {
        return Field{name, [m](RunConfig& c, const std::string& v, int) { c.*m = v; },
                     [m](const RunConfig& c) { return c.*m; }};
    };
    auto dlist_field = [](const char* name, std::vector<double> RunConfig::* m) {
        return Field{name,
                     [m, name](RunConfig& c, const std::string& v, int l) { c.*m = parse_double_list(v, name, l); },
                     [m](const RunConfig& c) {
                         return join<double>(c.*m, +[](double d) { return fmt_g(d); });
                     }};
    };
    auto ulist_field = [](const char* name, std::vector<uint64_t> RunConfig::* m) {
        return Field{name,
                     [m, name](RunConfig& c, const std::string& v, int l) { c.*m = parse_u64_list(v, name, l); },
                     [m](const RunConfig& c) {
                         return join<uint64_t>(c.*m, +[](uint64_t u) { return std::to_string(u); });
                     }};
    };

    static const std::vector<Field> table = {
        u64_field("sram_bytes", &RunConfig::sram_bytes),
        u64_field("dram_bytes", &RunConfig::dram_bytes),
        u64_field("size_s", &RunConfig::size_s),
        u64_field("size_d_base", &RunConfig::size_d_base),
        dbl_field("scale", &RunConfig::scale),
        Field{"segment_bits",
              [](RunConfig& c, const std::string& v, int l) {
                  c.segment_bits = unsigned(parse_u64(v, "segment_bits", l));
              },
              [](const RunConfig& c) { return std::to_string(c.segment_bits); }},
        u64_field("addr_s", &RunConfig::addr_s),
        dbl_field("refresh_pause_s", &RunConfig::refresh_pause_s),
        str_field("wrapper", &RunConfig::wrapper),
        Field{"device_count",
              [](RunConfig& c, const std::string& v, int l) {
                  c.device_count = unsigned(parse_u64(v, "device_count", l));
              },
              [](const RunConfig& c) { return std::to_string(c.device_count); }},
        ulist_field("device_seeds", &RunConfig::device_seeds),
        Field{"challenge_count",
              [](RunConfig& c, const std::string& v, int l) {
                  c.challenge_count = unsigned(parse_u64(v, "challenge_count", l));
              },
              [](const RunConfig& c) { return std::to_string(c.challenge_count); }},
        dlist_field("temperatures_c", &RunConfig::temperatures_c),
        dbl_field("enroll_temperature_c", &RunConfig::enroll_temperature_c),
        dlist_field("dynamic_char_temps_c", &RunConfig::dynamic_char_temps_c),
        dbl_field("aging_months", &RunConfig::aging_months),
        str_field("policy", &RunConfig::policy),
        dbl_field("dynamic_safety_c", &RunConfig::dynamic_safety_c),
        Field{"counterfeit_count",
              [](RunConfig& c, const std::string& v, int l) {
                  c.counterfeit_count = unsigned(parse_u64(v, "counterfeit_count", l));
              },
              [](const RunConfig& c) { return std::to_string(c.counterfeit_count); }},
        ulist_field("counterfeit_seeds", &RunConfig::counterfeit_seeds),
        Field{"noise_enabled",
              [](RunConfig& c, const std::string& v, int l) {
                  c.noise_enabled = parse_bool(v, "noise_enabled", l);
              },
              [](const RunConfig& c) { return c.noise_enabled ? std::string("true") : std::string("false"); }},
        Field{"store_golden_startups",
              [](RunConfig& c, const std::string& v, int l) {
                  c.store_golden_startups = parse_bool(v, "store_golden_startups", l);
              },
              [](const RunConfig& c) {
                  return c.store_golden_startups ? std::string("true") : std::string("false");
              }},
        dbl_field("sram_sigma0", &RunConfig::sram_sigma0),
        dbl_field("sram_kappa", &RunConfig::sram_kappa),
        dbl_field("sram_aging_drift", &RunConfig::sram_aging_drift),
        dbl_field("dram_log10_t_mu", &RunConfig::dram_log10_t_mu),
        dbl_field("dram_log10_t_sigma", &RunConfig::dram_log10_t_sigma),
        dbl_field("dram_temp_lambda", &RunConfig::dram_temp_lambda),
        dbl_field("dram_aging_per_month", &RunConfig::dram_aging_per_month),
        dbl_field("wrapper_coupling", &RunConfig::wrapper_coupling),
        u64_field("master_seed", &RunConfig::master_seed),
        str_field("out_dir", &RunConfig::out_dir),
    };
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& f : fields())
        if (key == f.name) return &f;
    return nullptr;
}

} // namespace

uint64_t RunConfig::size_d() const {
    const double scaled = double(size_d_base) * scale;
    return uint64_t(scaled + 0.5);
}

ModelParams RunConfig::model_params() const {
    ModelParams p;
    p.sram_sigma0 = noise_enabled ? sram_sigma0 : 0.0;
    p.sram_kappa = sram_kappa;
    p.sram_aging_drift = sram_aging_drift;
    p.dram_log10_t_mu = dram_log10_t_mu;
    p.dram_log10_t_sigma = dram_log10_t_sigma;
    p.dram_temp_lambda = dram_temp_lambda;
    p.dram_aging_per_month = dram_aging_per_month;
    p.wrapper_coupling = wrapper_coupling;
    return p;
}

WrapperPattern RunConfig::wrapper_pattern() const { return wrapper_from_name(wrapper); }

void RunConfig::validate() const {
    auto bad = [](const std::string& key, const std::string& why) {
        throw ConfigError("key '" + key + "': " + why, key);
    };
    if (sram_bytes == 0) bad("sram_bytes", "must be positive");
    if (dram_bytes == 0) bad("dram_bytes", "must be positive");
    if (size_s == 0 || (size_s * 8) % segment_bits != 0)
        bad("size_s", "must make size_s*8 divisible by segment_bits");
    if (segment_bits < 2 || segment_bits > 32) bad("segment_bits", "must lie in [2, 32]");
    if (!(scale > 0.0) || scale > 1.0) bad("scale", "must lie in (0, 1]");
    if (size_d() == 0 || size_d() % 64 != 0)
        bad("scale", "scaled size_d must be a positive multiple of 64 bytes");
    if (addr_s + size_s > sram_bytes) bad("addr_s", "SRAM block out of range");
    if (!(refresh_pause_s > 0.0)) bad("refresh_pause_s", "must be positive");
    try {
        wrapper_from_name(wrapper);
    } catch (const InvalidArgumentError&) {
        bad("wrapper", "must be all_ones, all_zeros or checkered");
    }
    if (device_count == 0 && device_seeds.empty()) bad("device_count", "must be positive");
    if (challenge_count == 0) bad("challenge_count", "must be positive");
    if (temperatures_c.empty()) bad("temperatures_c", "must not be empty");
    auto check_temp = [&](const char* key, double t) {
        if (!(t >= kMinTemperatureC && t <= kMaxTemperatureC))
            bad(key, "temperature " + fmt_g(t) + " outside [0, 100] C");
    };
    for (double t : temperatures_c) check_temp("temperatures_c", t);
    for (double t : dynamic_char_temps_c) check_temp("dynamic_char_temps_c", t);
    check_temp("enroll_temperature_c", enroll_temperature_c);
    if (!(aging_months > 0.0)) bad("aging_months", "must be positive");
    if (policy != "static" && policy != "dynamic") bad("policy", "must be static or dynamic");
    if (!(dynamic_safety_c >= 0.0)) bad("dynamic_safety_c", "must be non-negative");
    if (counterfeit_count == 0 && counterfeit_seeds.empty())
        bad("counterfeit_count", "must be positive");
    if (!(sram_sigma0 >= 0.0)) bad("sram_sigma0", "must be non-negative");
    if (!(dram_log10_t_sigma > 0.0)) bad("dram_log10_t_sigma", "must be positive");
    if (!(dram_temp_lambda >= 0.0)) bad("dram_temp_lambda", "must be non-negative");
    if (!(dram_aging_per_month >= 0.0)) bad("dram_aging_per_month", "must be non-negative");
    if (!(wrapper_coupling >= 0.0) || wrapper_coupling >= 1.0)
        bad("wrapper_coupling", "must lie in [0, 1)");
    if (out_dir.empty()) bad("out_dir", "must not be empty");
    const uint64_t min_dram = 4096 + size_d() + kGuardBandBytes;
    if (dram_bytes < min_dram)
        bad("dram_bytes", "too small for one challenge block plus guard bands");
}

std::string RunConfig::canonical_text() const {
    std::vector<std::string> lines;
    for (const auto& f : fields()) lines.push_back(std::string(f.name) + " = " + f.get(*this));
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string RunConfig::config_hash() const {
    const std::string text = canonical_text();
    return sha256_hex(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(text.data()),
                                               text.size()));
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value",
                              "", lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const Field* f = find_field(key);
        if (!f)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'",
                              key, lineno);
        f->set(cfg, value, lineno);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw MissingArtifactError("config file not found: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

void apply_env_overrides(RunConfig& cfg) {
    for (const auto& f : fields()) {
        std::string env_name = "CPUF_";
        for (const char* p = f.name; *p; ++p) env_name.push_back(char(std::toupper(*p)));
        if (const char* v = std::getenv(env_name.c_str())) f.set(cfg, v, 0);
    }
    cfg.validate();
}

uint64_t derive_seed(uint64_t master, std::string_view label, uint64_t index) {
    using kernels::mix64;
    uint64_t h = 0xCBF29CE484222325ull;
    for (char c : label) {
        h ^= uint8_t(c);
        h *= 0x100000001B3ull;
    }
    return mix64(mix64(master ^ mix64(h)) + index);
}

void write_manifest(const std::filesystem::path& out_dir, const RunConfig& cfg,
                    const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["artifact_version"] = kVersion;
    j["config_hash"] = cfg.config_hash();
    j["master_seed"] = cfg.master_seed;
    std::vector<uint64_t> device_seeds = cfg.device_seeds;
    if (device_seeds.empty())
        for (unsigned i = 0; i < cfg.device_count; ++i)
            device_seeds.push_back(derive_seed(cfg.master_seed, "device", i));
    j["device_seeds"] = device_seeds;
    j["size_d"] = cfg.size_d();
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                              now.time_since_epoch())
                              .count();
    j["outputs"] = outputs;
    std::ofstream os(out_dir / "manifest.json", std::ios::trunc);
    if (!os) throw Error("cannot write manifest under " + out_dir.string());
    os << j.dump(2) << '\n';
}

} // namespace cpuf
