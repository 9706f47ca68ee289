// Copyright cpufsim contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: forge, enroll, auth, characterize,
// reconfigure, attack, report. Every run is reproducible from the
// config file plus master seed; outputs land under --out.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "cpuf/campaign.hpp"
#include "cpuf/normal.hpp"
#include "cpuf/version.hpp"

namespace fs = std::filesystem;
using namespace cpuf;

namespace {

// Exit codes, also documented in the README.
constexpr int kOk = 0;
constexpr int kErrOther = 1;
constexpr int kErrConfig = 2;
constexpr int kErrMissingArtifact = 3;
constexpr int kErrVerification = 4;

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
    std::optional<double> scale;
};

RunConfig load_config(const GlobalOpts& g) {
    RunConfig cfg;
    if (!g.config_path.empty()) cfg = parse_config_file(g.config_path);
    apply_env_overrides(cfg);
    if (g.seed) cfg.master_seed = *g.seed;
    if (g.scale) cfg.scale = *g.scale;
    if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
    cfg.validate();
    return cfg;
}

fs::path ensure_out_dir(const RunConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

fs::path db_path(const fs::path& out, size_t device_index) {
    return out / ("crpdb_" + std::to_string(device_index) + ".bin");
}

std::vector<CrpDatabase> load_dbs(const fs::path& out, size_t device_count) {
    std::vector<CrpDatabase> dbs;
    for (size_t i = 0; i < device_count; ++i) dbs.push_back(CrpDatabase::load(db_path(out, i)));
    return dbs;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc | std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
}

template <typename Fn>
std::string render_csv(Fn&& fn) {
    std::ostringstream ss;
    fn(ss);
    return ss.str();
}

int cmd_forge(const RunConfig& cfg) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);

    std::ostringstream ss;
    ss << "device_index,manufacturing_seed,sram_bytes,dram_bytes,"
          "sram_skew_mean,sram_skew_std,sram_ones_fraction,"
          "dram_log10_retention_mean,dram_log10_retention_std,dram_true_cell_fraction\n";
    constexpr uint64_t kSampleBits = 8192;
    for (size_t i = 0; i < ctx.devices.size(); ++i) {
        const auto& dev = ctx.devices[i];
        double skew_sum = 0, skew_sq = 0, ones = 0;
        double ret_sum = 0, ret_sq = 0, true_cells = 0;
        for (uint64_t b = 0; b < kSampleBits; ++b) {
            const double theta = dev.sram_skew(b);
            skew_sum += theta;
            skew_sq += theta * theta;
            if (theta > 0) ones += 1;
            const double lt = std::log10(dev.dram_retention_s(b, kReferenceTemperatureC));
            ret_sum += lt;
            ret_sq += lt * lt;
            if (dev.dram_true_cell(b)) true_cells += 1;
        }
        const double n = double(kSampleBits);
        const double skew_mean = skew_sum / n;
        const double ret_mean = ret_sum / n;
        char row[512];
        std::snprintf(row, sizeof row,
                      "%zu,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", i,
                      dev.manufacturing_seed(), dev.sram_bytes(), dev.dram_bytes(), skew_mean,
                      std::sqrt(skew_sq / n - skew_mean * skew_mean), ones / n, ret_mean,
                      std::sqrt(ret_sq / n - ret_mean * ret_mean), true_cells / n);
        ss << row;
    }
    write_text(out / "devices.csv", ss.str());
    write_manifest(out, cfg, {"devices.csv"});
    std::printf("forged %zu devices -> %s\n", ctx.devices.size(),
                (out / "devices.csv").string().c_str());
    return kOk;
}

int cmd_enroll(const RunConfig& cfg) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);
    auto dbs = campaign_enroll(ctx);
    std::vector<std::string> outputs;
    for (size_t i = 0; i < dbs.size(); ++i) {
        if (!cfg.store_golden_startups) dbs[i].strip_golden_startups();
        const auto path = db_path(out, i);
        dbs[i].save(path);
        outputs.push_back(path.filename().string());
    }
    write_manifest(out, cfg, outputs);
    std::printf("enrolled %zu devices x %u challenges (size_d=%" PRIu64 " bytes) -> %s\n",
                dbs.size(), cfg.challenge_count, cfg.size_d(), out.string().c_str());
    return kOk;
}

int cmd_characterize(const RunConfig& cfg) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);
    auto dbs = load_dbs(out, ctx.devices.size());
    const auto bundle = campaign_characterize(ctx, dbs);

    std::vector<std::string> outputs;
    for (size_t i = 0; i < bundle.robust_reports.size(); ++i) {
        const std::string name = "characterization_" + std::to_string(i) + ".csv";
        write_text(out / name,
                   render_csv([&](std::ostream& os) { write_characterization_csv(os, bundle.robust_reports[i]); }));
        outputs.push_back(name);
    }
    // Persist the chosen policy into each database header.
    for (size_t i = 0; i < dbs.size(); ++i) {
        dbs[i].policy = cfg.policy == "dynamic" ? bundle.dynamic_policies[i] : bundle.static_policy;
        dbs[i].save(db_path(out, i));
        outputs.push_back(db_path(out, i).filename().string());
    }
    write_manifest(out, cfg, outputs);
    std::printf("characterized %zu devices: static MT=%" PRIu64 ", min inter HD=%" PRIu64 "\n",
                dbs.size(), bundle.static_policy.threshold(), bundle.min_inter_observed);
    return kOk;
}

int cmd_auth(const RunConfig& cfg, bool expect_perfect) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);
    const auto dbs = load_dbs(out, ctx.devices.size());

    // Policies come from the characterize step stored in the DB headers.
    PolicyBundle bundle;
    uint64_t static_mt = 0;
    for (const auto& db : dbs) {
        if (!db.policy)
            throw MissingArtifactError("database has no match policy; run characterize first");
        if (db.policy->kind() == MatchPolicy::Kind::dynamic_mt)
            bundle.dynamic_policies.push_back(*db.policy);
        else
            static_mt = std::max(static_mt, db.policy->threshold());
    }
    const bool use_dynamic = !bundle.dynamic_policies.empty();
    if (use_dynamic && bundle.dynamic_policies.size() != dbs.size())
        throw MissingArtifactError("mixed policy kinds across databases");
    bundle.static_policy = MatchPolicy::static_threshold(static_mt);

    const auto result = campaign_authenticate(ctx, dbs, bundle, use_dynamic);
    write_text(out / "auth_outcomes.csv",
               render_csv([&](std::ostream& os) { write_outcomes_csv(os, result.outcomes); }));
    write_manifest(out, cfg, {"auth_outcomes.csv"});
    std::printf("auth campaign: %zu outcomes, TPR=%.4f FPR=%.4f (policy=%s)\n",
                result.outcomes.size(), result.tpr, result.fpr,
                use_dynamic ? "dynamic" : "static");
    if (expect_perfect && (result.tpr < 1.0 || result.fpr > 0.0)) {
        std::fprintf(stderr, "verification failed: expected TPR=1 FPR=0\n");
        return kErrVerification;
    }
    return kOk;
}

int cmd_reconfigure(const RunConfig& cfg, std::optional<uint64_t> new_addr_s,
                    std::optional<double> new_pause) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);
    auto dbs = load_dbs(out, ctx.devices.size());

    std::vector<std::string> outputs;
    for (size_t i = 0; i < dbs.size(); ++i) {
        ClientEpoch epoch = dbs[i].epoch;
        const Environment env{cfg.enroll_temperature_c,
                              derive_seed(cfg.master_seed, "reconfig-noise", i)};
        CrpDatabase fresh = reconfigure(ctx.devices[i], epoch, dbs[i], new_addr_s, new_pause, env);
        // Retired database stays on disk, read-only, for audit.
        const auto retired_path = out / ("crpdb_" + std::to_string(i) + ".retired.bin");
        dbs[i].save(retired_path);
        fs::permissions(retired_path, fs::perms::owner_read | fs::perms::group_read | fs::perms::others_read,
                        fs::perm_options::replace);
        fresh.save(db_path(out, i));
        outputs.push_back(db_path(out, i).filename().string());
        outputs.push_back(retired_path.filename().string());
    }
    write_manifest(out, cfg, outputs);
    std::printf("reconfigured %zu databases (addr_s=%s, pause=%s)\n", dbs.size(),
                new_addr_s ? std::to_string(*new_addr_s).c_str() : "unchanged",
                new_pause ? std::to_string(*new_pause).c_str() : "unchanged");
    return kOk;
}

int cmd_attack(const RunConfig& cfg) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);
    const auto dbs = load_dbs(out, ctx.devices.size());
    const auto bundle = campaign_characterize(ctx, dbs);
    const auto counterfeits = campaign_counterfeit_seeds(cfg);
    const Environment env{cfg.enroll_temperature_c, derive_seed(cfg.master_seed, "attack-noise")};

    std::ostringstream ss;
    ss << "counterfeit_seed,policy,records,accepted\n";
    size_t dynamic_accepted = 0, static_accepted = 0;
    for (uint64_t seed : counterfeits) {
        const auto st = counterfeit_swap_scenario(ctx.devices[0], seed, dbs[0],
                                                  bundle.static_policy, env);
        const auto dy = counterfeit_swap_scenario(ctx.devices[0], seed, dbs[0],
                                                  bundle.dynamic_policies[0], env);
        static_accepted += st.accepted;
        dynamic_accepted += dy.accepted;
        ss << seed << ",static," << st.total << ',' << st.accepted << '\n';
        ss << seed << ",dynamic," << dy.total << ',' << dy.accepted << '\n';
    }
    ss << "# summary,static_accepted," << static_accepted << '\n';
    ss << "# summary,dynamic_accepted," << dynamic_accepted << '\n';
    ss << "# summary,static_mt," << bundle.static_policy.threshold() << '\n';
    ss << "# summary,dynamic_mt_device0," << bundle.dynamic_policies[0].threshold() << '\n';
    write_text(out / "attack_report.csv", ss.str());
    write_manifest(out, cfg, {"attack_report.csv"});

    std::printf("counterfeit swap: static policy accepted %zu, dynamic policy accepted %zu\n",
                static_accepted, dynamic_accepted);
    if (dynamic_accepted > 0) {
        std::fprintf(stderr, "verification failed: dynamic policy accepted a counterfeit\n");
        return kErrVerification;
    }
    return kOk;
}

int cmd_report(const RunConfig& cfg) {
    const auto out = ensure_out_dir(cfg);
    const auto ctx = make_campaign(cfg);
    const auto dbs = load_dbs(out, ctx.devices.size());

    std::vector<Environment> envs;
    for (size_t t = 0; t < cfg.temperatures_c.size(); ++t)
        envs.push_back(Environment{cfg.temperatures_c[t],
                                   derive_seed(cfg.master_seed, "report-noise", t)});

    const auto hashed = intra_inter_report(ctx.devices, dbs, envs, true,
                                           derive_seed(cfg.master_seed, "report-hash"));
    const auto ablation = intra_inter_report(ctx.devices, dbs, envs, false,
                                             derive_seed(cfg.master_seed, "report-nohash"));
    const Environment base_env{cfg.enroll_temperature_c,
                               derive_seed(cfg.master_seed, "report-base")};
    const auto baseline = dram_only_baseline(ctx.devices, ctx.templates, base_env);
    const auto counts = crp_count(cfg.sram_bytes, cfg.size_s, cfg.dram_bytes, cfg.size_d_base,
                                  kWrapperKinds, 3);

    // Aging study: device 0 aged by the configured months, replayed
    // against its own goldens (intra) and everyone else's (inter).
    const auto aged = age_device(ctx.devices[0], cfg.aging_months);
    std::ostringstream aging;
    aging << "kind,challenge_id,hd\n";
    uint64_t max_intra_aged = 0, min_inter_aged = UINT64_MAX;
    uint64_t noise = 0;
    for (const auto& rec : dbs[0].records) {
        const Environment env{cfg.enroll_temperature_c,
                              derive_seed(cfg.master_seed, "report-aging", noise++)};
        const Response r = client_generate_response(aged, dbs[0].epoch, rec.challenge, env);
        const uint64_t hd = hamming_distance(r.bitstream_r, rec.golden_response.bitstream_r);
        max_intra_aged = std::max(max_intra_aged, hd);
        aging << "intra," << rec.challenge.id << ',' << hd << '\n';
    }
    for (size_t j = 1; j < dbs.size(); ++j) {
        for (const auto& rec : dbs[j].records) {
            const Environment env{cfg.enroll_temperature_c,
                                  derive_seed(cfg.master_seed, "report-aging", noise++)};
            const Response r = client_generate_response(aged, dbs[j].epoch, rec.challenge, env);
            const uint64_t hd = hamming_distance(r.bitstream_r, rec.golden_response.bitstream_r);
            min_inter_aged = std::min(min_inter_aged, hd);
            aging << "inter," << rec.challenge.id << ',' << hd << '\n';
        }
    }
    aging << "# summary,aging_months," << cfg.aging_months << '\n';
    aging << "# summary,max_intra_aged," << max_intra_aged << '\n';
    aging << "# summary,min_inter_aged," << min_inter_aged << '\n';

    write_text(out / "uniqueness.csv",
               render_csv([&](std::ostream& os) { write_intra_inter_csv(os, hashed); }));
    write_text(out / "uniqueness_nohash.csv",
               render_csv([&](std::ostream& os) { write_intra_inter_csv(os, ablation); }));
    write_text(out / "uniqueness_hist.csv",
               render_csv([&](std::ostream& os) { write_histogram_csv(os, hashed.inter); }));
    write_text(out / "dram_only.csv", render_csv([&](std::ostream& os) {
                   write_comparisons_csv(os, baseline, "dram_only");
               }));
    write_text(out / "crp_count.csv",
               render_csv([&](std::ostream& os) { write_crp_count_csv(os, counts); }));
    write_text(out / "aging.csv", aging.str());
    write_manifest(out, cfg,
                   {"uniqueness.csv", "uniqueness_nohash.csv", "uniqueness_hist.csv",
                    "dram_only.csv", "crp_count.csv", "aging.csv"});

    std::printf("report: min inter HD %" PRIu64 " (hash), %" PRIu64
                " (no hash), DRAM-only max %" PRIu64 ", aged intra max %" PRIu64
                ", CRPs A=%" PRIu64 " B=%" PRIu64 "\n",
                hashed.min_inter, ablation.min_inter, baseline.max_hd(), max_intra_aged,
                counts.sram_crps, counts.dram_crps);
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Memory-based combination PUF simulator (SRAM power-up x DRAM refresh-pause)"};
    app.set_version_flag("--version", kVersion);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "Path to a key = value config file");
    app.add_option("--out", g.out_dir, "Output directory (overrides config out_dir)");
    uint64_t seed_opt = 0;
    auto* seed_flag = app.add_option("--seed", seed_opt, "Master seed (overrides config)");
    double scale_opt = 0.0;
    auto* scale_flag =
        app.add_option("--scale", scale_opt, "size_d scale factor in (0, 1] (overrides config)");

    app.require_subcommand(1);
    auto* forge = app.add_subcommand("forge", "Forge devices and write parameter summaries");
    auto* enroll_cmd = app.add_subcommand("enroll", "Build the CRP databases");
    auto* characterize_cmd =
        app.add_subcommand("characterize", "Sweep blocks/pauses/temperatures and set match policies");
    auto* auth = app.add_subcommand("auth", "Run the authentication campaign");
    bool expect_perfect = false;
    auth->add_flag("--expect-perfect", expect_perfect,
                   "Exit nonzero unless TPR=100% and FPR=0%");
    auto* reconfigure_cmd = app.add_subcommand("reconfigure", "Turn a reconfiguration knob and re-enroll");
    uint64_t new_addr_s = 0;
    auto* addr_flag = reconfigure_cmd->add_option("--addr-s", new_addr_s, "New SRAM block address");
    double new_pause = 0.0;
    auto* pause_flag =
        reconfigure_cmd->add_option("--pause", new_pause, "New refresh-pause interval in seconds");
    auto* attack = app.add_subcommand("attack", "Counterfeit DIMM swap case study");
    auto* report = app.add_subcommand("report", "Uniqueness / baseline / CRP-count reports");

    CLI11_PARSE(app, argc, argv);

    if (*seed_flag) g.seed = seed_opt;
    if (*scale_flag) g.scale = scale_opt;

    try {
        const RunConfig cfg = load_config(g);
        if (*forge) return cmd_forge(cfg);
        if (*enroll_cmd) return cmd_enroll(cfg);
        if (*characterize_cmd) return cmd_characterize(cfg);
        if (*auth) return cmd_auth(cfg, expect_perfect);
        if (*reconfigure_cmd)
            return cmd_reconfigure(cfg,
                                   *addr_flag ? std::optional<uint64_t>(new_addr_s) : std::nullopt,
                                   *pause_flag ? std::optional<double>(new_pause) : std::nullopt);
        if (*attack) return cmd_attack(cfg);
        if (*report) return cmd_report(cfg);
        return kErrOther;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kErrConfig;
    } catch (const MissingArtifactError& e) {
        std::fprintf(stderr, "missing artifact: %s\n", e.what());
        return kErrMissingArtifact;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kErrOther;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kErrOther;
    }
}
