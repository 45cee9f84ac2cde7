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
 * SimulationReport and its JSON / CSV renderings.
 *
 * The JSON report is deterministic: same configuration and seed give the same
 * bytes. Wall-clock measurements vary run to run, so they are kept in a
 * separate block that is only emitted on request.
 */

#ifndef CLONEDETECT_REPORT_HPP
#define CLONEDETECT_REPORT_HPP

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clonedetect/context.hpp"
#include "clonedetect/metrics.hpp"
#include "clonedetect/trust.hpp"

namespace clonedetect::metrics {

struct CloneDetection {
    std::uint32_t clone_node = 0;
    DeviceId victim = 0;
    int attack_case = 0;  // 1: forged signature, 2: replayed context
    bool detected = false;
    std::uint32_t round = 0;
    std::string verdict;
    double protocol_ms = 0.0;  // simulated message latency, deterministic
    double crypto_ms = 0.0;    // wall clock spent verifying, not deterministic

    double detection_time_ms() const { return protocol_ms + crypto_ms; }
};

struct RoundSummary {
    std::uint32_t round = 0;
    std::size_t edges = 0;
    double mean_degree = 0.0;
    std::size_t proofs = 0;
    std::size_t batches = 0;
    std::size_t failed_batches = 0;
    std::size_t individual_checks = 0;
    std::size_t clones_flagged = 0;
    std::vector<trust::ConfidenceRecord> confidence;
};

struct BatchTiming {
    std::size_t batch_size = 0;
    double seconds = 0.0;
};

/// Wall-clock measurements of crypto operations during a run.
struct OpTimings {
    std::vector<double> keygen;
    std::vector<double> sign;
    std::vector<BatchTiming> verify_batch;
};

struct StorageRow {
    std::string role;
    std::size_t bytes_per_device = 0;
    std::size_t devices = 0;

    std::size_t total() const { return bytes_per_device * devices; }
};

struct SimulationReport {
    nlohmann::json config;
    std::uint64_t seed = 0;

    std::size_t injected_clones = 0;
    std::size_t detected_clones = 0;
    double detection_probability = 0.0;
    std::size_t false_positives = 0;
    std::size_t missed_in_round = 0;  // clone asked for a proof but not flagged that round
    std::map<std::string, std::uint64_t> verdict_counts;
    std::vector<CloneDetection> detections;

    std::map<std::string, std::map<std::string, std::uint64_t>> message_counts;  // role -> category -> n
    std::map<std::string, std::map<std::string, std::uint64_t>> byte_counts;
    std::uint64_t total_messages = 0;
    std::uint64_t total_bytes = 0;

    std::size_t context_bytes = lps::kContextBytes;
    std::size_t device_record_bytes = lps::kDeviceRecordBytes;
    std::size_t quoted_device_bytes = lps::kQuotedDeviceBytes;
    std::vector<StorageRow> storage;
    double tracked_provers_per_verifier = 0.0;

    std::vector<RoundSummary> rounds;
    OpTimings timings;

    void absorb(const MessageLog& log) {
        message_counts.clear();
        byte_counts.clear();
        for (Role r : kAllRoles)
            for (Category c : kAllCategories) {
                message_counts[std::string(to_string(r))][std::string(to_string(c))] = log.count(r, c);
                byte_counts[std::string(to_string(r))][std::string(to_string(c))] = log.bytes(r, c);
            }
        total_messages = log.total();
        total_bytes = log.total_bytes();
    }

    std::size_t total_storage_bytes() const {
        std::size_t n = 0;
        for (const auto& s : storage) n += s.total();
        return n;
    }

    nlohmann::json to_json(bool include_wallclock = false) const {
        using nlohmann::json;
        json j;
        j["config"] = config;
        j["seed"] = seed;
        j["detection"] = {{"injected_clones", injected_clones},
                          {"detected_clones", detected_clones},
                          {"detection_probability", detection_probability},
                          {"false_positives", false_positives},
                          {"missed_in_round", missed_in_round},
                          {"verdicts", verdict_counts}};
        json clones = json::array();
        for (const auto& d : detections) {
            json c = {{"clone_node", d.clone_node}, {"victim", d.victim},       {"case", d.attack_case},
                      {"detected", d.detected},     {"round", d.round},         {"verdict", d.verdict},
                      {"protocol_ms", d.protocol_ms}};
            if (include_wallclock) c["crypto_ms"] = d.crypto_ms;
            clones.push_back(std::move(c));
        }
        j["clones"] = std::move(clones);
        j["messages"] = {{"counts", message_counts},
                         {"bytes", byte_counts},
                         {"total_messages", total_messages},
                         {"total_bytes", total_bytes}};
        json st = json::array();
        for (const auto& s : storage)
            st.push_back({{"role", s.role}, {"bytes_per_device", s.bytes_per_device}, {"devices", s.devices}});
        j["storage"] = {{"context_bytes", context_bytes},
                        {"device_record_bytes", device_record_bytes},
                        {"quoted_device_bytes", quoted_device_bytes},
                        {"matches_quoted_figure", device_record_bytes == quoted_device_bytes},
                        {"roles", std::move(st)},
                        {"total_bytes", total_storage_bytes()},
                        {"tracked_provers_per_verifier", tracked_provers_per_verifier}};
        json rs = json::array();
        for (const auto& r : rounds) {
            json conf = json::object();
            for (const auto& c : r.confidence)
                conf[std::to_string(c.device)] = {
                    {"implicit", c.implicit_score}, {"explicit", c.explicit_score}, {"total", c.total}};
            rs.push_back({{"round", r.round},
                          {"edges", r.edges},
                          {"mean_degree", r.mean_degree},
                          {"proofs", r.proofs},
                          {"batches", r.batches},
                          {"failed_batches", r.failed_batches},
                          {"individual_checks", r.individual_checks},
                          {"clones_flagged", r.clones_flagged},
                          {"confidence", std::move(conf)}});
        }
        j["rounds"] = std::move(rs);
        if (include_wallclock) {
            const auto kg = summarize(timings.keygen);
            const auto sg = summarize(timings.sign);
            json vb = json::array();
            for (const auto& b : timings.verify_batch)
                vb.push_back({{"batch_size", b.batch_size}, {"seconds", b.seconds}});
            j["wallclock"] = {{"keygen", {{"count", kg.count}, {"median_s", kg.median}, {"max_s", kg.max}}},
                              {"sign", {{"count", sg.count}, {"median_s", sg.median}, {"max_s", sg.max}}},
                              {"verify_batch", std::move(vb)}};
        }
        return j;
    }
};

/// "# key=value ..." header placed at the top of every CSV so each file
/// carries its configuration and seed.
inline std::string config_echo_line(const nlohmann::json& config) {
    std::string line = "#";
    for (const auto& [k, v] : config.items()) line += " " + k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    return line;
}

}  // namespace clonedetect::metrics

#endif  // CLONEDETECT_REPORT_HPP
