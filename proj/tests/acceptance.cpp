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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances are fixed constants below.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "clonedetect.hpp"

using namespace clonedetect;

namespace {

constexpr int kDetectionSeeds = 30;
constexpr double kMinBatchSpeedup = 1.2;
constexpr int kTimingReps = 5;
constexpr int kAgreementBatches = 200;
constexpr int kCorruptionTrials = 1000;
constexpr int kMinCorruptionRejections = 999;
constexpr double kMaxLinearityRatio = 1.5;
constexpr int kRoundTrips = 1000;
constexpr std::uint64_t kOracleScalarLimit = 1000;
constexpr std::size_t kVerifierCount = 30;
constexpr int kTrustRounds = 50;
constexpr double kFormulaTolerance = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<std::uint8_t> random_message(Rng& rng, std::size_t len) {
    std::vector<std::uint8_t> m(len);
    for (auto& b : m) b = static_cast<std::uint8_t>(rng.next_u64());
    return m;
}

Outcome detection() {
    std::size_t runs = 0, imperfect = 0, false_positives = 0;
    double worst = 1.0;
    for (int env = 0; env < 2; ++env)
        for (int seed = 1; seed <= kDetectionSeeds; ++seed) {
            sim::NetworkConfig c;
            c.seed = static_cast<std::uint64_t>(seed);
            if (env == 1) {
                c.environment = sim::Environment::Dense;
                c.num_devices = 500;
                c.num_clones = 50;
            }
            const auto r = sim::run_experiment(c);
            ++runs;
            if (r.detection_probability != 1.0) ++imperfect;
            worst = std::min(worst, r.detection_probability);
            false_positives += r.false_positives;
            if (r.injected_clones != (env == 0 ? 20u : 50u)) ++imperfect;
        }
    return {imperfect == 0 && false_positives == 0,
            std::to_string(runs) + " runs (sparse N=100/20 clones, dense N=500/50 clones), min P=" +
                fmt("%.6f", worst) + ", false positives=" + std::to_string(false_positives)};
}

Outcome batch_speedup() {
    const std::vector<std::size_t> sizes(sim::kBatchSizes.begin(), sim::kBatchSizes.end());
    const auto rows = experiment::bench_batch(sizes, 2026, kTimingReps);
    const auto speedups = experiment::batch_speedups(rows);
    bool all_faster = speedups.size() == sizes.size();
    std::string detail = "speedup by size:";
    for (const auto& [n, s] : speedups) {
        all_faster &= s > 1.0;
        detail += " " + std::to_string(n) + "=" + fmt("%.2fx", s);
    }
    const double at25 = speedups.contains(25) ? speedups.at(25) : 0.0;
    detail += " (need >= " + fmt("%.1fx", kMinBatchSpeedup) + " at 25, > 1x everywhere)";
    return {all_faster && at25 >= kMinBatchSpeedup, detail};
}

Outcome batch_soundness() {
    Rng rng(31337);
    int disagreements = 0, valid_rejected = 0;
    for (int t = 0; t < kAgreementBatches; ++t) {
        const std::size_t size = 1 + rng.uniform_int(0, 24);
        std::vector<std::vector<std::uint8_t>> msgs;
        for (std::size_t i = 0; i < size; ++i) msgs.push_back(random_message(rng, 16));
        std::vector<sig::BatchItem> items;
        for (std::size_t i = 0; i < size; ++i) {
            const auto kp = sig::keygen(rng);
            items.push_back({msgs[i], sig::sign(msgs[i], kp.d, rng), kp.Q});
        }
        const bool corrupt = t % 2 == 1;
        if (corrupt) {
            const std::size_t v = rng.uniform_int(0, size - 1);
            items[v].sig.s = (ec::Scalar::from(items[v].sig.s) + ec::Scalar::one()).value();
        }
        bool all = true;
        for (const auto& it : items) all &= sig::verify_star(it.message, it.sig, it.Q);
        const bool batch = sig::batch_verify(items, rng);
        if (batch != all) ++disagreements;
        if (!corrupt && !batch) ++valid_rejected;
    }

    int rejected = 0;
    for (int t = 0; t < kCorruptionTrials; ++t) {
        constexpr std::size_t kSize = 8;
        std::vector<std::vector<std::uint8_t>> msgs;
        for (std::size_t i = 0; i < kSize; ++i) msgs.push_back(random_message(rng, 16));
        std::vector<sig::BatchItem> items;
        for (std::size_t i = 0; i < kSize; ++i) {
            const auto kp = sig::keygen(rng);
            items.push_back({msgs[i], sig::sign(msgs[i], kp.d, rng), kp.Q});
        }
        const std::size_t v = rng.uniform_int(0, kSize - 1);
        switch (t % 3) {
            case 0: items[v].sig.s = (ec::Scalar::from(items[v].sig.s) + ec::Scalar::one()).value(); break;
            case 1: msgs[v][rng.uniform_int(0, 15)] ^= 0x01; break;
            default: items[v].Q = sig::keygen(rng).Q; break;
        }
        if (!sig::batch_verify(items, rng, sig::kDefaultRandomizerBits)) ++rejected;
    }
    return {disagreements == 0 && valid_rejected == 0 && rejected >= kMinCorruptionRejections,
            std::to_string(kAgreementBatches) + " batches, " + std::to_string(disagreements) +
                " disagreements; single corruptions rejected " + std::to_string(rejected) + "/" +
                std::to_string(kCorruptionTrials) + " (need >= " + std::to_string(kMinCorruptionRejections) + ")"};
}

Outcome storage_layout() {
    Rng rng(4);
    const auto kp = sig::keygen(rng);
    const auto ci = lps::sense_context(12, 34.0, {10.5, 20.25}, "sensing");
    const std::size_t ci_bytes = ci.serialize().size();
    const std::size_t record =
        ci_bytes + sig::encode_private_key(kp.d).size() + sig::encode_public_key(kp.Q).size();
    sim::NetworkConfig c;
    const auto json = sim::run_experiment(c).to_json();
    const auto& st = json["storage"];
    const bool flagged = st["matches_quoted_figure"] == false && st["quoted_device_bytes"] == 73 &&
                         st["device_record_bytes"] == 81 && st["context_bytes"] == 16;
    return {ci_bytes == 16 && record == 81 && record == lps::kDeviceRecordBytes && flagged,
            "CI=" + std::to_string(ci_bytes) + " B, device record=" + std::to_string(record) +
                " B, divergence from quoted 73 B flagged in report=" + (flagged ? "yes" : "no")};
}

Outcome communication_linearity() {
    std::vector<metrics::ScalingPoint> points;
    std::string detail = "messages/N:";
    for (std::size_t n = 100; n <= 500; n += 100) {
        sim::NetworkConfig c;
        c.num_devices = n;
        c.seed = 5;
        const auto r = sim::run_experiment(c);
        points.push_back({n, r.total_messages, static_cast<double>(lps::kDeviceRecordBytes),
                          r.tracked_provers_per_verifier});
        detail += " " + std::to_string(n) + "=" + fmt("%.3f", static_cast<double>(r.total_messages) / n);
    }
    const auto v = metrics::complexity_summary(points);
    int oracle_mismatch = 0;
    for (std::uint64_t d = 1; d <= 10; ++d)
        for (std::uint64_t h = 0; h <= 10; ++h) {
            std::uint64_t sum = 0, level = 1;
            for (std::uint64_t i = 1; i <= h; ++i) sum += (level *= d);
            if (metrics::expected_tree_messages(d, h) != sum) ++oracle_mismatch;
        }
    detail += "; max/min=" + fmt("%.4f", v.linearity_ratio) + " (need <= 1.5); tree formula mismatches=" +
              std::to_string(oracle_mismatch) + "/121";
    return {v.linearity_ratio <= kMaxLinearityRatio && oracle_mismatch == 0, detail};
}

Outcome crypto_correctness() {
    Rng rng(6);
    int round_trip_failures = 0;
    for (int i = 0; i < kRoundTrips; ++i) {
        const auto kp = sig::keygen(rng);
        const auto msg = random_message(rng, 1 + i % 64);
        if (!sig::verify_star(msg, sig::sign(msg, kp.d, rng), kp.Q)) ++round_trip_failures;
    }

    int flips = 0, flip_accepts = 0;
    for (int i = 0; i < 4; ++i) {
        const auto kp = sig::keygen(rng);
        const auto msg = random_message(rng, 32);
        const auto s = sig::sign(msg, kp.d, rng);
        for (std::size_t bit = 0; bit < msg.size() * 8; ++bit) {
            auto m = msg;
            m[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            ++flips;
            if (sig::verify_star(m, s, kp.Q) || sig::verify_classic(m, s.to_classic(), kp.Q)) ++flip_accepts;
        }
    }

    int oracle_mismatch = 0;
    const ec::CurvePoint bases[] = {ec::generator(), sig::keygen(rng).Q};
    for (const auto& base : bases) {
        ec::CurvePoint acc = ec::CurvePoint::at_infinity();
        for (std::uint64_t k = 1; k <= kOracleScalarLimit; ++k) {
            acc = ec::point_add(acc, base);
            if (!(ec::scalar_mul(U256{k}, base) == acc)) ++oracle_mismatch;
        }
    }

    const auto check_all = [](const ec::DomainParams& d) {
        bool all = true;
        for (const auto& c : ec::validate_curve_security(d)) all &= c.passed;
        return all;
    };
    const auto failed = [](const ec::DomainParams& d, const std::string& name) {
        for (const auto& c : ec::validate_curve_security(d))
            if (c.name == name) return !c.passed;
        return false;
    };
    const bool p256_ok = check_all(ec::DomainParams::p256());
    // anomalous: y^2 = x^3 + x + 32 over F_101, 101 points
    const ec::DomainParams anomalous{U256{101}, U256{1}, U256{32}, {}, U256{101}, U256{1}};
    // supersingular: y^2 = x^3 + x over F_43, 44 = 4 * 11 points, embedding degree 2
    const ec::DomainParams supersingular{U256{43}, U256{1}, U256{0}, {}, U256{11}, U256{4}};
    const bool violations_caught = failed(anomalous, "anomalous") && failed(supersingular, "embedding_degree");

    return {round_trip_failures == 0 && flip_accepts == 0 && oracle_mismatch == 0 && p256_ok && violations_caught,
            std::to_string(kRoundTrips - round_trip_failures) + "/" + std::to_string(kRoundTrips) +
                " round-trips, " + std::to_string(flip_accepts) + "/" + std::to_string(flips) +
                " bit flips accepted, k<=1000 oracle mismatches=" + std::to_string(oracle_mismatch) +
                ", P-256 checks " + (p256_ok ? "pass" : "FAIL") + ", constructed violations " +
                (violations_caught ? "rejected" : "MISSED")};
}

Outcome determinism() {
    sim::NetworkConfig c;
    const std::string a = sim::run_experiment(c).to_json().dump(2);
    const std::string b = sim::run_experiment(c).to_json().dump(2);
    return {a == b, "two sparse default runs, " + std::to_string(a.size()) + " bytes each, identical=" +
                        (a == b ? "yes" : "no")};
}

Outcome trust_model() {
    sim::NetworkConfig dense;
    dense.environment = sim::Environment::Dense;
    dense.num_devices = 500;
    const auto state = sim::init_network(dense);
    const auto selected = trust::select_verifiers(state.trust.snapshot(), kVerifierCount);

    sim::NetworkConfig longrun;
    longrun.rounds = kTrustRounds;
    const auto r = sim::run_experiment(longrun);
    std::size_t values = 0, outside = 0;
    for (const auto& round : r.rounds)
        for (const auto& c : round.confidence)
            for (double v : {c.implicit_score, c.explicit_score, c.total}) {
                ++values;
                outside += !(v >= 0.0 && v <= 1.0);
            }

    // Hand-computed fixtures.
    double worst = 0.0;
    const auto near = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
    {
        const std::vector<trust::LocationSample> s = {{1.0, 0.0, 0.5, 0.5}, {0.8, 0.6, 0.25, 1.0}};
        near(trust::implicit_confidence(s), 0.6);
        const std::vector<trust::FeedbackEntry> fb = {{1, 9, 0.2, 1.0}, {2, 9, 0.8, 1.0}, {3, 9, 0.6, 1.0}};
        near(trust::composite_feedback_weight(fb), 1.6 / 3.0);
        near(trust::explicit_confidence(fb, 9), 0.28444444444444444);
        near(trust::total_confidence(0.6, 0.8, 0.4, 0.6), 0.72);
    }
    {
        const std::vector<trust::LocationSample> s = {{0.5, 0.5, 0.1, 1.0}, {1.0, 0.8, 0.3, 1.0}};
        near(trust::implicit_confidence(s), 0.8);
        const std::vector<trust::FeedbackEntry> fb = {{1, 4, 0.4, 1.0}, {2, 4, 0.8, 3.0}};
        near(trust::composite_feedback_weight(fb), 0.7);
        near(trust::explicit_confidence(fb, 4), 0.42);
        near(trust::total_confidence(0.75, 0.42, 0.5, 0.5), 0.585);
    }
    bool ranking_ok;
    {
        std::vector<trust::ConfidenceRecord> recs(5);
        const double totals[] = {0.5, 0.9, 0.7, 0.9, 0.1};
        for (std::size_t i = 0; i < recs.size(); ++i) {
            recs[i].device = static_cast<DeviceId>(i);
            recs[i].total = totals[i];
        }
        ranking_ok = trust::select_verifiers(recs, 3) == std::vector<DeviceId>{1, 3, 2};
        near(trust::total_confidence(0.3, 0.9, 1.0, 0.0), 0.3);
    }
    const bool fixtures_ok = worst <= kFormulaTolerance && ranking_ok;
    return {selected.size() == kVerifierCount && state.verifiers.size() == kVerifierCount && outside == 0 &&
                fixtures_ok,
            std::to_string(selected.size()) + " verifiers selected of 500; " + std::to_string(outside) + "/" +
                std::to_string(values) + " confidence values outside [0,1] after " + std::to_string(kTrustRounds) +
                " rounds; fixture max error " + fmt("%.1e", worst) + ", ranking " + (ranking_ok ? "ok" : "WRONG")};
}

}  // namespace

int main() {
    warning_sink() = [](const std::string&) {};
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 detection probability", detection},
        {"2 batch verification speedup", batch_speedup},
        {"3 batch soundness and agreement", batch_soundness},
        {"4 storage layout", storage_layout},
        {"5 communication linearity", communication_linearity},
        {"6 crypto correctness", crypto_correctness},
        {"7 report determinism", determinism},
        {"8 trust model", trust_model},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = metrics::Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("[%s] criterion %-34s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
                    metrics::seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
