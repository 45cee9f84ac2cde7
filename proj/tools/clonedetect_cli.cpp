/*
 * Copyright (C) 2026 The clonedetect Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// clonedetect: experiment runner.
//
//   clonedetect run   [--config f] [overrides...]   one configuration, --reps repetitions
//   clonedetect sweep [--config f] [overrides...]   cartesian sweep over batch sizes, N and environments
//   clonedetect bench {keygen,sign,batch,all}       crypto microbenchmarks
//
// Exit status: 0 success, 1 a run violated an invariant, 2 bad configuration.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "clonedetect.hpp"

namespace cd = clonedetect;
namespace ex = clonedetect::experiment;
namespace fs = std::filesystem;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> devices;
    std::optional<std::size_t> provers;
    std::optional<std::size_t> verifiers;
    std::optional<std::size_t> clones;
    std::optional<std::string> env;
    std::optional<std::size_t> batch_size;
    std::optional<std::uint32_t> rounds;
    std::optional<std::string> out;
    std::optional<std::uint32_t> reps;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config, "key = value config file");
    app->add_option("--seed", o.seed, "base RNG seed");
    app->add_option("--devices", o.devices, "number of devices (100-500)");
    app->add_option("--provers", o.provers, "number of provers");
    app->add_option("--verifiers", o.verifiers, "size of the verifier cohort");
    app->add_option("--clones", o.clones, "number of injected clones");
    app->add_option("--env", o.env, "sparse, dense or custom");
    app->add_option("--batch-size", o.batch_size, "verification batch size (5, 10, 15, 20, 25)");
    app->add_option("--rounds", o.rounds, "detection rounds per run");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--reps", o.reps, "repetitions per cell, seeds seed + rep");
}

/// File first, then flags on top.
ex::ExperimentSpec resolve(const Overrides& o) {
    ex::ExperimentSpec spec;
    if (!o.config.empty()) ex::load_config_file(spec, o.config);
    std::vector<std::string> diags;
    const auto set = [&](const char* key, const auto& v) {
        if (!v) return;
        std::string s;
        if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>)
            s = *v;
        else
            s = std::to_string(*v);
        try {
            ex::apply_setting(spec, key, s);
        } catch (const cd::ConfigError& e) {
            diags.push_back(std::string("--") + key + ": " + e.what());
        }
    };
    set("seed", o.seed);
    set("devices", o.devices);
    set("provers", o.provers);
    set("verifiers", o.verifiers);
    set("clones", o.clones);
    set("env", o.env);
    set("batch-size", o.batch_size);
    set("rounds", o.rounds);
    set("out", o.out);
    set("reps", o.reps);
    if (spec.reps == 0) diags.push_back("reps must be positive");
    if (!diags.empty()) throw ex::ConfigFileError(std::move(diags));
    return spec;
}

nlohmann::json echo_for(const cd::sim::NetworkConfig& c, std::uint32_t reps) {
    auto j = c.to_json();
    j["reps"] = reps;
    return j;
}

/// Runs every cell for every rep. Returns the number of invariant violations.
int run_cells(const std::vector<ex::Cell>& cells, const ex::ExperimentSpec& spec, bool per_cell_dirs) {
    std::vector<ex::RunRecord> all;
    std::vector<cd::metrics::ScalingPoint> scaling;
    int violations = 0;
    nlohmann::json summary;
    summary["cells"] = nlohmann::json::array();

    std::printf("%-22s %4s %6s %8s %8s %6s %10s %12s\n", "cell", "rep", "seed", "clones", "detected", "fp",
                "P(detect)", "messages");
    for (const auto& cell : cells) {
        std::vector<ex::RunRecord> runs;
        for (std::uint32_t rep = 0; rep < spec.reps; ++rep) {
            auto cfg = cell.config;
            cfg.seed = cell.config.seed + rep;
            ex::RunRecord rec{cell.name, rep, cd::sim::run_experiment(cfg)};
            const auto& r = rec.report;
            std::printf("%-22s %4u %6llu %8zu %8zu %6zu %10.4f %12llu\n", cell.name.c_str(), rep,
                        static_cast<unsigned long long>(cfg.seed), r.injected_clones, r.detected_clones,
                        r.false_positives, r.detection_probability, static_cast<unsigned long long>(r.total_messages));
            for (const auto& v : ex::check_invariants(r)) {
                std::fprintf(stderr, "invariant violated in %s rep %u: %s\n", cell.name.c_str(), rep, v.c_str());
                ++violations;
            }
            runs.push_back(std::move(rec));
        }

        const auto echo = echo_for(cell.config, spec.reps);
        const fs::path dir = per_cell_dirs ? spec.out_dir / cell.name : spec.out_dir;
        ex::write_atomic(dir / "detection.csv", ex::detection_csv(echo, runs));
        ex::write_atomic(dir / "overhead_messages.csv", ex::overhead_csv(echo, runs, false));
        ex::write_atomic(dir / "overhead_bytes.csv", ex::overhead_csv(echo, runs, true));
        ex::write_atomic(dir / "storage.csv", ex::storage_csv(echo, runs.front().report));
        nlohmann::json reports = nlohmann::json::array();
        nlohmann::json timings = nlohmann::json::array();
        for (const auto& r : runs) {
            reports.push_back(r.report.to_json());
            timings.push_back(r.report.to_json(true)["wallclock"]);
        }
        ex::write_atomic(dir / "summary.json", nlohmann::json{{"config", echo}, {"runs", reports}}.dump(2) + "\n");
        ex::write_atomic(dir / "timings.json", nlohmann::json{{"config", echo}, {"runs", timings}}.dump(2) + "\n");

        double p = 0.0;
        std::uint64_t messages = 0;
        double tracked = 0.0;
        for (const auto& r : runs) {
            p += r.report.detection_probability;
            messages += r.report.total_messages;
            tracked += r.report.tracked_provers_per_verifier;
        }
        const double n = static_cast<double>(runs.size());
        summary["cells"].push_back({{"cell", cell.name},
                                    {"config", echo},
                                    {"mean_detection_probability", p / n},
                                    {"mean_messages", static_cast<double>(messages) / n}});
        scaling.push_back({cell.config.num_devices, static_cast<std::uint64_t>(static_cast<double>(messages) / n),
                           static_cast<double>(cd::lps::kDeviceRecordBytes), tracked / n});
        for (auto& r : runs) all.push_back(std::move(r));
    }

    if (per_cell_dirs) {
        const auto echo = echo_for(spec.base, spec.reps);
        ex::write_atomic(spec.out_dir / "detection.csv", ex::detection_csv(echo, all));
        ex::write_atomic(spec.out_dir / "overhead_messages.csv", ex::overhead_csv(echo, all, false));
        ex::write_atomic(spec.out_dir / "overhead_bytes.csv", ex::overhead_csv(echo, all, true));
        const auto verdict = cd::metrics::complexity_summary(scaling);
        summary["config"] = echo;
        summary["scaling"] = {{"status", verdict.status},
                              {"messages_per_device_min", verdict.messages_per_device_min},
                              {"messages_per_device_max", verdict.messages_per_device_max},
                              {"linearity_ratio", verdict.linearity_ratio},
                              {"storage_flat", verdict.storage_flat},
                              {"sqrt_factor", verdict.sqrt_factor}};
        ex::write_atomic(spec.out_dir / "sweep_summary.json", summary.dump(2) + "\n");
        std::printf("scaling: %s (messages/N ratio %.4f)\n", verdict.status.c_str(), verdict.linearity_ratio);
    }
    return violations;
}

int bench(const std::string& what, const Overrides& o, const std::vector<std::size_t>& sizes, int timing_reps) {
    auto spec = resolve(o);
    const auto& c = spec.base;
    nlohmann::json echo = {{"seed", c.seed}, {"devices", c.num_devices}, {"reps", timing_reps}};
    const bool all = what == "all";
    if (all || what == "keygen") {
        const auto t = ex::bench_keygen(c.num_devices, c.seed);
        ex::write_atomic(spec.out_dir / "keygen_timing.csv", ex::op_timing_csv(echo, "keygen", t));
        const auto d = cd::metrics::summarize(t);
        std::printf("keygen: %zu timings, median %.6f s\n", d.count, d.median);
    }
    if (all || what == "sign") {
        const auto t = ex::bench_sign(c.num_devices, c.seed);
        ex::write_atomic(spec.out_dir / "sign_timing.csv", ex::op_timing_csv(echo, "sign", t));
        const auto d = cd::metrics::summarize(t);
        std::printf("sign: %zu timings, median %.6f s\n", d.count, d.median);
    }
    if (all || what == "batch") {
        for (auto s : sizes)
            if (s == 0) throw cd::ConfigError("batch sizes must be positive");
        const auto rows = ex::bench_batch(sizes, c.seed, timing_reps, c.randomizer_bits);
        ex::write_atomic(spec.out_dir / "batch_timing.csv", ex::batch_timing_csv(echo, rows));
        std::printf("%-6s %-18s %12s\n", "size", "scheme", "seconds");
        for (const auto& r : rows) std::printf("%-6zu %-18s %12.6f\n", r.batch_size, r.scheme.c_str(), r.seconds);
        for (const auto& [n, s] : ex::batch_speedups(rows)) std::printf("speedup at %zu: %.3fx\n", n, s);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clone-node detection simulator"};
    app.require_subcommand(1);

    Overrides run_o, sweep_o, bench_o;
    auto* run = app.add_subcommand("run", "run one configuration");
    add_common(run, run_o);
    auto* sweep = app.add_subcommand("sweep", "sweep batch sizes, device counts and environments");
    add_common(sweep, sweep_o);
    std::vector<std::size_t> sweep_sizes, sweep_devices;
    std::vector<std::string> sweep_envs;
    sweep->add_option("--sizes", sweep_sizes, "batch sizes to sweep");
    sweep->add_option("--device-counts", sweep_devices, "device counts to sweep");
    sweep->add_option("--envs", sweep_envs, "environments to sweep");
    auto* bench_cmd = app.add_subcommand("bench", "crypto microbenchmarks");
    add_common(bench_cmd, bench_o);
    std::string bench_what = "all";
    std::vector<std::size_t> bench_sizes(cd::sim::kBatchSizes.begin(), cd::sim::kBatchSizes.end());
    int bench_reps = 5;
    bench_cmd->add_option("what", bench_what, "keygen, sign, batch or all")
        ->check(CLI::IsMember({"keygen", "sign", "batch", "all"}));
    bench_cmd->add_option("--sizes", bench_sizes, "batch sizes");
    bench_cmd->add_option("--timing-reps", bench_reps, "timed repetitions per measurement")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            const auto spec = resolve(run_o);
            const auto cells = ex::expand_sweep(spec);
            return run_cells(cells, spec, cells.size() > 1) == 0 ? 0 : 1;
        }
        if (*sweep) {
            auto spec = resolve(sweep_o);
            if (!sweep_sizes.empty()) spec.batch_sizes = sweep_sizes;
            if (!sweep_devices.empty()) spec.device_counts = sweep_devices;
            if (!sweep_envs.empty()) {
                spec.environments.clear();
                for (const auto& e : sweep_envs) spec.environments.push_back(cd::sim::parse_environment(e));
            }
            if (spec.batch_sizes.empty())
                spec.batch_sizes.assign(cd::sim::kBatchSizes.begin(), cd::sim::kBatchSizes.end());
            const auto cells = ex::expand_sweep(spec);
            return run_cells(cells, spec, true) == 0 ? 0 : 1;
        }
        return bench(bench_what, bench_o, bench_sizes, bench_reps);
    } catch (const ex::ConfigFileError& e) {
        for (const auto& d : e.diagnostics()) std::fprintf(stderr, "config error: %s\n", d.c_str());
        return 2;
    } catch (const cd::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
