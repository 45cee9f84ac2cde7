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

/*
 * Experiment plumbing: the key = value config format, sweep expansion,
 * invariant checks on finished runs, microbenchmarks and report writers.
 *
 * Config file example:
 *
 *   # comment
 *   devices = 100
 *   env = sparse
 *   batch-size = 25
 *   sweep-batch-sizes = 5, 10, 15, 20, 25
 */

#ifndef CLONEDETECT_EXPERIMENT_HPP
#define CLONEDETECT_EXPERIMENT_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clonedetect/metrics.hpp"
#include "clonedetect/report.hpp"
#include "clonedetect/sig.hpp"
#include "clonedetect/sim.hpp"

namespace clonedetect::experiment {

struct ExperimentSpec {
    sim::NetworkConfig base;
    std::vector<std::size_t> batch_sizes;  // empty: base value only
    std::vector<std::size_t> device_counts;
    std::vector<sim::Environment> environments;
    std::filesystem::path out_dir = "out";
    std::uint32_t reps = 5;
};

/// Bad config input. Carries every diagnostic, each already prefixed with
/// its source location.
class ConfigFileError : public ConfigError {
public:
    explicit ConfigFileError(std::vector<std::string> diagnostics)
        : ConfigError(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    static std::string join(const std::vector<std::string>& d) {
        std::string s;
        for (const auto& x : d) s += (s.empty() ? "" : "\n") + x;
        return s;
    }
    std::vector<std::string> diagnostics_;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string normalize_key(std::string k) {
    for (char& c : k)
        if (c == '_') c = '-';
    return k;
}

template <class T>
T parse_number(const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end) throw ConfigError("'" + v + "' is not a valid number");
    return out;
}

inline double parse_real(const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + v + "' is not a valid number");
    }
    if (used != v.size()) throw ConfigError("'" + v + "' is not a valid number");
    return out;
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("empty element in list '" + v + "'");
        out.push_back(item);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

template <class T>
std::vector<T> parse_list(const std::string& v) {
    std::vector<T> out;
    for (const auto& s : split_list(v)) out.push_back(parse_number<T>(s));
    return out;
}

}  // namespace detail

/// Applies one key/value pair. Keys accept '-' or '_' as separators.
inline void apply_setting(ExperimentSpec& spec, const std::string& raw_key, const std::string& value) {
    using namespace detail;
    auto& c = spec.base;
    const std::string key = normalize_key(raw_key);
    static const std::map<std::string, std::function<void(ExperimentSpec&, sim::NetworkConfig&, const std::string&)>>
        setters = {
            {"devices", [](auto&, auto& c, const auto& v) { c.num_devices = parse_number<std::size_t>(v); }},
            {"provers", [](auto&, auto& c, const auto& v) { c.num_provers = parse_number<std::size_t>(v); }},
            {"verifiers", [](auto&, auto& c, const auto& v) { c.num_verifiers = parse_number<std::size_t>(v); }},
            {"clones", [](auto&, auto& c, const auto& v) { c.num_clones = parse_number<std::size_t>(v); }},
            {"env", [](auto&, auto& c, const auto& v) { c.environment = sim::parse_environment(v); }},
            {"area-side", [](auto&, auto& c, const auto& v) { c.area_side = parse_real(v); }},
            {"comm-radius", [](auto&, auto& c, const auto& v) { c.comm_radius = parse_real(v); }},
            {"speed-min", [](auto&, auto& c, const auto& v) { c.speed_min = parse_real(v); }},
            {"speed-max", [](auto&, auto& c, const auto& v) { c.speed_max = parse_real(v); }},
            {"pause-min", [](auto&, auto& c, const auto& v) { c.pause_min = parse_number<std::uint32_t>(v); }},
            {"pause-max", [](auto&, auto& c, const auto& v) { c.pause_max = parse_number<std::uint32_t>(v); }},
            {"rounds", [](auto&, auto& c, const auto& v) { c.rounds = parse_number<std::uint32_t>(v); }},
            {"seed", [](auto&, auto& c, const auto& v) { c.seed = parse_number<std::uint64_t>(v); }},
            {"batch-size", [](auto&, auto& c, const auto& v) { c.batch_size = parse_number<std::size_t>(v); }},
            {"randomizer-bits",
             [](auto&, auto& c, const auto& v) { c.randomizer_bits = parse_number<std::size_t>(v); }},
            {"latency-ms", [](auto&, auto& c, const auto& v) { c.latency_ms = parse_real(v); }},
            {"round-seconds", [](auto&, auto& c, const auto& v) { c.round_seconds = parse_real(v); }},
            {"case-one-fraction", [](auto&, auto& c, const auto& v) { c.case_one_fraction = parse_real(v); }},
            {"trust-alpha", [](auto&, auto& c, const auto& v) { c.trust_alpha = parse_real(v); }},
            {"trust-beta", [](auto&, auto& c, const auto& v) { c.trust_beta = parse_real(v); }},
            {"location-grid",
             [](auto&, auto& c, const auto& v) { c.location_grid = parse_number<std::uint32_t>(v); }},
            {"out", [](auto& s, auto&, const auto& v) { s.out_dir = v; }},
            {"reps", [](auto& s, auto&, const auto& v) { s.reps = parse_number<std::uint32_t>(v); }},
            {"sweep-batch-sizes",
             [](auto& s, auto&, const auto& v) { s.batch_sizes = parse_list<std::size_t>(v); }},
            {"sweep-devices", [](auto& s, auto&, const auto& v) { s.device_counts = parse_list<std::size_t>(v); }},
            {"sweep-envs",
             [](auto& s, auto&, const auto& v) {
                 s.environments.clear();
                 for (const auto& e : split_list(v)) s.environments.push_back(sim::parse_environment(e));
             }},
        };
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key '" + raw_key + "'");
    if (value.empty()) throw ConfigError("missing value for '" + raw_key + "'");
    it->second(spec, c, value);
}

/// Parses key = value text into `spec`. Collects every bad line before
/// throwing; `source` names the input in diagnostics.
inline void parse_config(ExperimentSpec& spec, std::istream& in, const std::string& source = "<config>") {
    std::vector<std::string> diags;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) {
            diags.push_back(where + "expected 'key = value'");
            continue;
        }
        try {
            apply_setting(spec, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
        } catch (const ConfigError& e) {
            diags.push_back(where + e.what());
        }
    }
    if (!diags.empty()) throw ConfigFileError(std::move(diags));
}

inline void load_config_file(ExperimentSpec& spec, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigFileError({path.string() + ": cannot open config file"});
    parse_config(spec, in, path.string());
}

/// One fully resolved configuration of a sweep.
struct Cell {
    std::string name;
    sim::NetworkConfig config;
};

/// Cartesian product of the sweep axes. Every cell is validated; any
/// invalid cell fails the whole expansion.
inline std::vector<Cell> expand_sweep(const ExperimentSpec& spec) {
    const auto sizes = spec.batch_sizes.empty() ? std::vector<std::size_t>{spec.base.batch_size} : spec.batch_sizes;
    const auto devices =
        spec.device_counts.empty() ? std::vector<std::size_t>{spec.base.num_devices} : spec.device_counts;
    const auto envs =
        spec.environments.empty() ? std::vector<sim::Environment>{spec.base.environment} : spec.environments;
    std::vector<Cell> cells;
    std::vector<std::string> diags;
    for (auto env : envs)
        for (auto n : devices)
            for (auto b : sizes) {
                Cell cell;
                cell.config = spec.base;
                cell.config.environment = env;
                cell.config.num_devices = n;
                cell.config.batch_size = b;
                cell.name = std::string(sim::to_string(env)) + "_n" + std::to_string(n) + "_b" + std::to_string(b);
                for (const auto& v : cell.config.violations()) diags.push_back(cell.name + ": " + v);
                cells.push_back(std::move(cell));
            }
    if (!diags.empty()) throw ConfigFileError(std::move(diags));
    return cells;
}

/// Invariants every finished run must satisfy. Returns the violated ones.
inline std::vector<std::string> check_invariants(const metrics::SimulationReport& r) {
    std::vector<std::string> bad;
    if (r.detection_probability < 0.0 || r.detection_probability > 1.0)
        bad.push_back("detection probability outside [0, 1]");
    if (r.false_positives != 0)
        bad.push_back("soundness: " + std::to_string(r.false_positives) + " genuine devices flagged compromised");
    if (r.missed_in_round != 0)
        bad.push_back("completeness: " + std::to_string(r.missed_in_round) + " clone proofs accepted");
    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;
    for (metrics::Role role : metrics::kAllRoles)
        for (metrics::Category c : metrics::kAllCategories) {
            const auto n = r.message_counts.at(std::string(to_string(role))).at(std::string(to_string(c)));
            messages += n;
            bytes += n * metrics::wire_size(c);
            if (r.byte_counts.at(std::string(to_string(role))).at(std::string(to_string(c))) !=
                n * metrics::wire_size(c))
                bad.push_back("byte counter mismatch for " + std::string(to_string(role)) + "/" +
                              std::string(to_string(c)));
        }
    if (messages != r.total_messages) bad.push_back("per-role message counts do not sum to the total");
    if (bytes != r.total_bytes) bad.push_back("byte total does not match wire sizes");
    for (const auto& d : r.detections)
        if (d.detected && !(d.protocol_ms > 0.0)) bad.push_back("non-positive detection time");
    for (const auto& round : r.rounds)
        for (const auto& c : round.confidence)
            if (c.implicit_score < 0 || c.implicit_score > 1 || c.explicit_score < 0 || c.explicit_score > 1 ||
                c.total < 0 || c.total > 1) {
                bad.push_back("confidence value outside [0, 1]");
                return bad;
            }
    return bad;
}

// ---------------------------------------------------------------------------
// Microbenchmarks
// ---------------------------------------------------------------------------

struct BatchBenchRow {
    std::size_t batch_size = 0;
    std::string scheme;  // ecdsa, ecdsa_star, ecdsa_star_batch
    double seconds = 0.0;
};

/// Median-of-reps timing of verifying `size` signatures as classic ECDSA
/// one by one, as ECDSA* one by one, and as one ECDSA* batch.
inline std::vector<BatchBenchRow> bench_batch(std::span<const std::size_t> sizes, std::uint64_t seed,
                                              int reps = 5, std::size_t randomizer_bits = sig::kDefaultRandomizerBits) {
    Rng rng(seed);
    std::vector<BatchBenchRow> rows;
    for (std::size_t size : sizes) {
        std::vector<Digest> msgs(size);
        std::vector<sig::EcdsaStarSignature> sigs;
        std::vector<sig::KeyPair> keys;
        for (std::size_t i = 0; i < size; ++i) {
            const std::uint64_t v = rng.next_u64();
            msgs[i] = sha256({reinterpret_cast<const std::uint8_t*>(&v), sizeof v});
            keys.push_back(sig::keygen(rng));
            sigs.push_back(sig::sign(msgs[i], keys[i].d, rng));
        }
        std::vector<sig::BatchItem> items;
        for (std::size_t i = 0; i < size; ++i) items.push_back({msgs[i], sigs[i], keys[i].Q});
        bool ok = true;
        const double classic = metrics::median_seconds(
            [&] {
                for (std::size_t i = 0; i < size; ++i)
                    ok &= sig::verify_classic(msgs[i], sigs[i].to_classic(), keys[i].Q);
            },
            reps);
        const double star = metrics::median_seconds(
            [&] {
                for (std::size_t i = 0; i < size; ++i) ok &= sig::verify_star(msgs[i], sigs[i], keys[i].Q);
            },
            reps);
        Rng brng = rng.fork(size);
        const double batch =
            metrics::median_seconds([&] { ok &= sig::batch_verify(items, brng, randomizer_bits); }, reps);
        if (!ok) throw std::logic_error("benchmark signatures failed to verify");
        rows.push_back({size, "ecdsa", classic});
        rows.push_back({size, "ecdsa_star", star});
        rows.push_back({size, "ecdsa_star_batch", batch});
    }
    return rows;
}

/// Per-operation timings: one keygen per device, one sign per device.
inline std::vector<double> bench_keygen(std::size_t devices, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> t;
    t.reserve(devices);
    for (std::size_t i = 0; i < devices; ++i) {
        const auto start = metrics::Clock::now();
        (void)sig::keygen(rng);
        t.push_back(metrics::seconds_since(start));
    }
    return t;
}

inline std::vector<double> bench_sign(std::size_t devices, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> t;
    t.reserve(devices);
    for (std::size_t i = 0; i < devices; ++i) {
        const auto kp = sig::keygen(rng);
        const auto ci = lps::sense_context(static_cast<DeviceId>(i), 0.0, {1.0, 1.0}, "sensing");
        const auto start = metrics::Clock::now();
        (void)sig::sign(ci.digest(), kp.d, rng);
        t.push_back(metrics::seconds_since(start));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// Writes via a temporary file and rename so readers never see partial output.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct RunRecord {
    std::string cell;
    std::uint32_t rep = 0;
    metrics::SimulationReport report;
};

inline std::string detection_csv(const nlohmann::json& echo, std::span<const RunRecord> runs) {
    std::string s = metrics::config_echo_line(echo) + "\n";
    s += "config,seed,clone_id,victim,case,detected,round,verdict,protocol_ms,crypto_ms,detection_time_ms\n";
    for (const auto& r : runs)
        for (const auto& d : r.report.detections)
            s += r.cell + "," + std::to_string(r.report.seed) + "," + std::to_string(d.clone_node) + "," +
                 std::to_string(d.victim) + "," + std::to_string(d.attack_case) + "," + (d.detected ? "1" : "0") +
                 "," + std::to_string(d.round) + "," + d.verdict + "," + fmt_real(d.protocol_ms) + "," +
                 fmt_real(d.crypto_ms) + "," + fmt_real(d.detection_time_ms()) + "\n";
    return s;
}

inline std::string overhead_csv(const nlohmann::json& echo, std::span<const RunRecord> runs, bool bytes) {
    std::string s = metrics::config_echo_line(echo) + "\n";
    s += "config,seed,role,category,count\n";
    for (const auto& r : runs) {
        const auto& table = bytes ? r.report.byte_counts : r.report.message_counts;
        for (const auto& [role, cats] : table)
            for (const auto& [cat, n] : cats)
                s += r.cell + "," + std::to_string(r.report.seed) + "," + role + "," + cat + "," + std::to_string(n) +
                     "\n";
    }
    return s;
}

inline std::string storage_csv(const nlohmann::json& echo, const metrics::SimulationReport& r) {
    std::string s = metrics::config_echo_line(echo) + "\n";
    s += "role,bytes\n";
    s += "context," + std::to_string(r.context_bytes) + "\n";
    s += "device_record," + std::to_string(r.device_record_bytes) + "\n";
    s += "device_record_quoted," + std::to_string(r.quoted_device_bytes) + "\n";
    for (const auto& row : r.storage) s += row.role + "," + std::to_string(row.total()) + "\n";
    return s;
}

inline std::string batch_timing_csv(const nlohmann::json& echo, std::span<const BatchBenchRow> rows) {
    std::string s = metrics::config_echo_line(echo) + "\n";
    s += "batch_size,scheme,seconds\n";
    for (const auto& r : rows) s += std::to_string(r.batch_size) + "," + r.scheme + "," + fmt_real(r.seconds) + "\n";
    return s;
}

inline std::string op_timing_csv(const nlohmann::json& echo, const std::string& op, std::span<const double> t) {
    std::string s = metrics::config_echo_line(echo) + "\n";
    s += "index,operation,seconds\n";
    for (std::size_t i = 0; i < t.size(); ++i) s += std::to_string(i) + "," + op + "," + fmt_real(t[i]) + "\n";
    return s;
}

/// Ratio of individual ECDSA* time to batch time per batch size.
inline std::map<std::size_t, double> batch_speedups(std::span<const BatchBenchRow> rows) {
    std::map<std::size_t, double> star;
    std::map<std::size_t, double> batch;
    for (const auto& r : rows) {
        if (r.scheme == "ecdsa_star") star[r.batch_size] = r.seconds;
        if (r.scheme == "ecdsa_star_batch") batch[r.batch_size] = r.seconds;
    }
    std::map<std::size_t, double> out;
    for (const auto& [n, t] : batch)
        if (star.contains(n) && t > 0.0) out[n] = star[n] / t;
    return out;
}

}  // namespace clonedetect::experiment

#endif  // CLONEDETECT_EXPERIMENT_HPP
