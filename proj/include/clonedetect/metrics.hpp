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
 * Message, byte and timing accounting for simulation runs, plus the analytic
 * tree message-count estimator and the N-scaling summary.
 */

#ifndef CLONEDETECT_METRICS_HPP
#define CLONEDETECT_METRICS_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clonedetect::metrics {

enum class Role { Prover, Verifier, Clone, Lbs };
inline constexpr std::array kAllRoles = {Role::Prover, Role::Verifier, Role::Clone, Role::Lbs};

inline std::string_view to_string(Role r) {
    switch (r) {
        case Role::Prover: return "prover";
        case Role::Verifier: return "verifier";
        case Role::Clone: return "clone";
        case Role::Lbs: return "lbs";
    }
    return "?";
}

enum class Category {
    Sense,             // local context snapshot
    Store,             // context upload to the LBS
    Ack,               // LBS acknowledgement (store or existence answer)
    ProofRequest,      // verifier -> prover
    ProofResponse,     // prover -> verifier, one location proof
    CiCheck,           // verifier -> LBS existence query
    VerifyConfirm,     // verifier -> prover, proof accepted
    CompromiseReport,  // verifier -> LBS, prover flagged
};
inline constexpr std::array kAllCategories = {Category::Sense,         Category::Store,        Category::Ack,
                                              Category::ProofRequest,  Category::ProofResponse, Category::CiCheck,
                                              Category::VerifyConfirm, Category::CompromiseReport};

inline std::string_view to_string(Category c) {
    switch (c) {
        case Category::Sense: return "sense";
        case Category::Store: return "store";
        case Category::Ack: return "ack";
        case Category::ProofRequest: return "proof_request";
        case Category::ProofResponse: return "proof_response";
        case Category::CiCheck: return "ci_check";
        case Category::VerifyConfirm: return "verify_confirm";
        case Category::CompromiseReport: return "compromise_report";
    }
    return "?";
}

/// Fixed payload size of each message category on the wire.
inline constexpr std::size_t wire_size(Category c) {
    switch (c) {
        case Category::Sense: return 16;            // context record
        case Category::Store: return 16;            // context record
        case Category::Ack: return 3;               // id u16 | status u8
        case Category::ProofRequest: return 4;      // verifier u16 | prover u16
        case Category::ProofResponse: return 99;    // location proof
        case Category::CiCheck: return 2;           // prover id
        case Category::VerifyConfirm: return 3;     // prover u16 | verdict u8
        case Category::CompromiseReport: return 3;  // prover u16 | case u8
    }
    return 0;
}

struct MessageLogEntry {
    std::uint32_t round = 0;
    Role from = Role::Prover;
    Role to = Role::Prover;
    Category category = Category::Sense;
    std::size_t payload_bytes = 0;
    double latency_ms = 0.0;
};

/// Accumulates message and byte counters, attributed to the sender's role.
class MessageLog {
public:
    explicit MessageLog(bool retain_entries = true) : retain_(retain_entries) {}

    void record(const MessageLogEntry& e) {
        if (e.payload_bytes != wire_size(e.category))
            throw std::logic_error("payload size does not match wire size of " + std::string(to_string(e.category)));
        ++counts_[e.from][e.category];
        bytes_[e.from][e.category] += e.payload_bytes;
        ++total_;
        if (retain_) entries_.push_back(e);
    }

    /// Convenience: payload size taken from the category.
    void record(std::uint32_t round, Role from, Role to, Category c, double latency_ms) {
        record({round, from, to, c, wire_size(c), latency_ms});
    }

    std::uint64_t count(Role r, Category c) const { return lookup(counts_, r, c); }
    std::uint64_t bytes(Role r, Category c) const { return lookup(bytes_, r, c); }

    std::uint64_t count(Category c) const {
        std::uint64_t n = 0;
        for (Role r : kAllRoles) n += count(r, c);
        return n;
    }

    std::uint64_t count(Role r) const {
        std::uint64_t n = 0;
        for (Category c : kAllCategories) n += count(r, c);
        return n;
    }

    std::uint64_t total() const { return total_; }

    std::uint64_t total_bytes() const {
        std::uint64_t n = 0;
        for (const auto& [r, m] : bytes_)
            for (const auto& [c, b] : m) n += b;
        return n;
    }

    const std::vector<MessageLogEntry>& entries() const { return entries_; }

private:
    using Table = std::map<Role, std::map<Category, std::uint64_t>>;
    static std::uint64_t lookup(const Table& t, Role r, Category c) {
        const auto it = t.find(r);
        if (it == t.end()) return 0;
        const auto jt = it->second.find(c);
        return jt == it->second.end() ? 0 : jt->second;
    }

    bool retain_;
    Table counts_;
    Table bytes_;
    std::uint64_t total_ = 0;
    std::vector<MessageLogEntry> entries_;
};

// ---------------------------------------------------------------------------
// Timing
// ---------------------------------------------------------------------------

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Runs f once as warmup, then `reps` timed runs; returns the median seconds.
template <class F>
double median_seconds(F&& f, int reps = 5) {
    f();
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto start = Clock::now();
        f();
        t.push_back(seconds_since(start));
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

struct Distribution {
    std::size_t count = 0;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

inline Distribution summarize(std::vector<double> v) {
    Distribution d;
    if (v.empty()) return d;
    std::sort(v.begin(), v.end());
    d.count = v.size();
    d.min = v.front();
    d.max = v.back();
    d.median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    return d;
}

// ---------------------------------------------------------------------------
// Analytic estimates
// ---------------------------------------------------------------------------

/// Messages pushed down a proof-request tree of the given fan-out and height:
/// sum_{i=1..h} d^i = (d^{h+1} - d) / (d - 1). A fan-out of 1 is a chain of h hops.
inline std::uint64_t expected_tree_messages(std::uint64_t degree, std::uint64_t height) {
    if (degree == 0) throw std::invalid_argument("tree degree must be positive");
    if (height == 0) return 0;
    if (degree == 1) return height;
    unsigned __int128 pow = degree;  // d^1
    for (std::uint64_t i = 0; i < height; ++i) {
        pow *= degree;
        if (pow > (static_cast<unsigned __int128>(1) << 100))
            throw std::overflow_error("expected_tree_messages: result too large");
    }
    const unsigned __int128 r = (pow - degree) / (degree - 1);
    if (r > UINT64_MAX) throw std::overflow_error("expected_tree_messages: result too large");
    return static_cast<std::uint64_t>(r);
}

/// floor(log_d(N / (K * P))), computed in integers; 0 when the ratio is below d.
inline std::uint64_t tree_height(std::uint64_t devices, std::uint64_t subset_size, std::uint64_t trees,
                                 std::uint64_t degree) {
    if (subset_size == 0 || trees == 0 || degree < 2) throw std::invalid_argument("tree_height: bad arguments");
    const std::uint64_t leaves = devices / (subset_size * trees);
    std::uint64_t h = 0;
    unsigned __int128 reach = degree;
    while (reach <= leaves) {
        ++h;
        reach *= degree;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Scaling across network sizes
// ---------------------------------------------------------------------------

struct ScalingPoint {
    std::uint64_t devices = 0;
    std::uint64_t total_messages = 0;
    double storage_bytes_per_device = 0.0;
    double tracked_provers_per_verifier = 0.0;
};

struct ScalingVerdict {
    std::string status;  // "linear", "superlinear", or "inconclusive"
    double messages_per_device_min = 0.0;
    double messages_per_device_max = 0.0;
    double linearity_ratio = 0.0;
    bool storage_flat = false;
    double sqrt_factor = 0.0;  // max over points of tracked / sqrt(N)
    bool sqrt_bounded = false;
};

inline constexpr double kLinearityBand = 1.5;

/// Needs at least three points. `sqrt_constant` bounds tracked provers per
/// verifier as c * sqrt(N).
inline ScalingVerdict complexity_summary(const std::vector<ScalingPoint>& points, double sqrt_constant = 1.0) {
    ScalingVerdict v;
    if (points.size() < 3) {
        v.status = "inconclusive";
        return v;
    }
    v.messages_per_device_min = INFINITY;
    v.messages_per_device_max = 0.0;
    double smin = INFINITY;
    double smax = 0.0;
    for (const auto& p : points) {
        if (p.devices == 0) throw std::invalid_argument("complexity_summary: zero devices");
        const double per = static_cast<double>(p.total_messages) / static_cast<double>(p.devices);
        v.messages_per_device_min = std::min(v.messages_per_device_min, per);
        v.messages_per_device_max = std::max(v.messages_per_device_max, per);
        smin = std::min(smin, p.storage_bytes_per_device);
        smax = std::max(smax, p.storage_bytes_per_device);
        v.sqrt_factor = std::max(v.sqrt_factor, p.tracked_provers_per_verifier / std::sqrt(double(p.devices)));
    }
    v.linearity_ratio = v.messages_per_device_min > 0 ? v.messages_per_device_max / v.messages_per_device_min : INFINITY;
    v.status = v.linearity_ratio <= kLinearityBand ? "linear" : "superlinear";
    v.storage_flat = smax - smin < 1e-9;
    v.sqrt_bounded = v.sqrt_factor <= sqrt_constant;
    return v;
}

}  // namespace clonedetect::metrics

#endif  // CLONEDETECT_METRICS_HPP
