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
 * Confidence model used to pick the verifier cohort.
 *
 * A device's total confidence is a weighted blend of
 *   implicit: its own interaction history, per location, where each location
 *             contributes the mean of its previous and most recent outcome,
 *             weighted by how often source and target were seen there;
 *   explicit: location feedback reported by other devices, scaled by a
 *             composite weight that favours feedback from trusted reporters.
 * Every value lives in [0, 1]; missing information means 0.5.
 */

#ifndef CLONEDETECT_TRUST_HPP
#define CLONEDETECT_TRUST_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "clonedetect/types.hpp"

namespace clonedetect::trust {

inline constexpr double kDefaultConfidence = 0.5;

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct ConfidenceRecord {
    DeviceId device = 0;
    double implicit_score = kDefaultConfidence;
    double explicit_score = kDefaultConfidence;
    double total = kDefaultConfidence;
    double alpha = 0.5;
    double beta = 0.5;
};

struct FeedbackEntry {
    DeviceId from = 0;
    DeviceId about = 0;
    double location_feedback = 0.0;
    double trust_level_weight = 1.0;
};

/// One location's contribution to a (source, target) pair.
struct LocationSample {
    double previous = kDefaultConfidence;
    double recent = kDefaultConfidence;
    double source_weight = 1.0;
    double target_weight = 1.0;
};

/// Rescales non-negative weights to sum to 1. All-zero input becomes uniform.
inline std::vector<double> normalize_weights(std::span<const double> w) {
    std::vector<double> out(w.begin(), w.end());
    if (out.empty()) return out;
    for (double v : out)
        if (v < 0.0 || !std::isfinite(v)) throw ConfigError("weights must be finite and non-negative");
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (sum <= 0.0) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return out;
    }
    for (double& v : out) v /= sum;
    return out;
}

/// Implicit confidence over per-location samples. The products
/// source_weight * target_weight are normalised to sum to 1 before use.
inline double implicit_confidence(std::span<const LocationSample> samples) {
    if (samples.empty()) return kDefaultConfidence;
    std::vector<double> products;
    products.reserve(samples.size());
    for (const auto& s : samples) products.push_back(s.source_weight * s.target_weight);
    if (std::accumulate(products.begin(), products.end(), 0.0) <= 0.0) return kDefaultConfidence;
    const auto w = normalize_weights(products);
    double ic = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) ic += w[i] * 0.5 * (samples[i].previous + samples[i].recent);
    return clamp01(ic);
}

/// Composite feedback weight: sum of normalised trust levels times feedback.
inline double composite_feedback_weight(std::span<const FeedbackEntry> entries) {
    if (entries.empty()) return 0.0;
    std::vector<double> levels;
    levels.reserve(entries.size());
    for (const auto& e : entries) levels.push_back(e.trust_level_weight);
    const auto beta = normalize_weights(levels);
    double bp = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) bp += beta[i] * clamp01(entries[i].location_feedback);
    return bp;
}

/// Explicit confidence in `about`: mean feedback scaled by the composite weight.
/// No feedback yields the 0.5 default.
inline double explicit_confidence(std::span<const FeedbackEntry> feedback, DeviceId about) {
    std::vector<FeedbackEntry> mine;
    for (const auto& f : feedback)
        if (f.about == about) mine.push_back(f);
    if (mine.empty()) return kDefaultConfidence;
    const double bp = composite_feedback_weight(mine);
    double sum = 0.0;
    for (const auto& f : mine) sum += clamp01(f.location_feedback) * bp;
    return clamp01(sum / static_cast<double>(mine.size()));
}

/// alpha * implicit + beta * explicit. Weights outside [0, 1] throw; a pair
/// summing above 1 is rescaled to sum to 1 with a warning.
inline double total_confidence(double implicit_score, double explicit_score, double alpha, double beta) {
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0))
        throw ConfigError("confidence weights must lie in [0, 1]");
    if (alpha + beta > 1.0 + 1e-12) {
        warn("confidence weights sum to " + std::to_string(alpha + beta) + ", rescaling to 1");
        const double s = alpha + beta;
        alpha /= s;
        beta /= s;
    }
    return clamp01(alpha * implicit_score + beta * explicit_score);
}

/// Top-p devices by total confidence, ties to the lower id. Returned in rank order.
inline std::vector<DeviceId> select_verifiers(std::span<const ConfidenceRecord> devices, std::size_t p) {
    if (p >= devices.size())
        throw ConfigError("verifier count " + std::to_string(p) + " must be below device count " +
                          std::to_string(devices.size()));
    std::vector<const ConfidenceRecord*> order;
    order.reserve(devices.size());
    for (const auto& d : devices) order.push_back(&d);
    std::stable_sort(order.begin(), order.end(), [](const ConfidenceRecord* a, const ConfidenceRecord* b) {
        if (a->total != b->total) return a->total > b->total;
        return a->device < b->device;
    });
    std::vector<DeviceId> out;
    out.reserve(p);
    for (std::size_t i = 0; i < p; ++i) out.push_back(order[i]->device);
    return out;
}

/// Per (source, target) pair, per location cell: the previous and most recent
/// outcome plus visit counts. Each target also keeps its location profile
/// across all partners.
class InteractionHistory {
public:
    using Pair = std::pair<DeviceId, DeviceId>;

    struct Cell {
        double previous = kDefaultConfidence;
        double recent = kDefaultConfidence;
        std::uint32_t visits = 0;
    };

    /// Records one interaction outcome in [0, 1] that took place in `cell`.
    void record(DeviceId source, DeviceId target, std::uint32_t cell, double outcome) {
        auto& c = pairs_[{source, target}][cell];
        c.previous = c.visits == 0 ? kDefaultConfidence : c.recent;
        c.recent = clamp01(outcome);
        ++c.visits;
        ++profile_[target][cell];
    }

    bool has(DeviceId source, DeviceId target) const { return pairs_.contains({source, target}); }

    /// Source weight: share of this pair's interactions in the cell.
    /// Target weight: share of all the target's interactions in the cell.
    std::vector<LocationSample> samples(DeviceId source, DeviceId target) const {
        std::vector<LocationSample> out;
        const auto it = pairs_.find({source, target});
        if (it == pairs_.end()) return out;
        const auto& profile = profile_.at(target);
        double pair_total = 0.0;
        for (const auto& [cell, c] : it->second) pair_total += c.visits;
        double target_total = 0.0;
        for (const auto& [cell, n] : profile) target_total += n;
        for (const auto& [cell, c] : it->second)
            out.push_back({c.previous, c.recent, c.visits / pair_total, profile.at(cell) / target_total});
        return out;
    }

    double implicit(DeviceId source, DeviceId target) const {
        const auto s = samples(source, target);
        return implicit_confidence(s);
    }

    /// Sources that have interacted with `target`.
    std::vector<DeviceId> sources_of(DeviceId target) const {
        std::vector<DeviceId> out;
        for (const auto& [pair, cells] : pairs_)
            if (pair.second == target) out.push_back(pair.first);
        return out;
    }

private:
    std::map<Pair, std::map<std::uint32_t, Cell>> pairs_;
    std::map<DeviceId, std::map<std::uint32_t, std::uint32_t>> profile_;
};

struct TrustConfig {
    double alpha = 0.5;
    double beta = 0.5;
};

/// Owns confidence state for a device population. Single writer.
class TrustModel {
public:
    TrustModel(std::span<const DeviceId> devices, TrustConfig cfg) : cfg_(cfg) {
        if (cfg.alpha < 0 || cfg.alpha > 1 || cfg.beta < 0 || cfg.beta > 1)
            throw ConfigError("trust alpha/beta must lie in [0, 1]");
        for (DeviceId d : devices) {
            ConfidenceRecord r;
            r.device = d;
            r.alpha = cfg.alpha;
            r.beta = cfg.beta;
            r.total = total_confidence(r.implicit_score, r.explicit_score, r.alpha, r.beta);
            records_.emplace(d, r);
        }
    }

    void record_interaction(DeviceId source, DeviceId target, std::uint32_t cell, double outcome) {
        history_.record(source, target, cell, outcome);
    }

    void add_feedback(const FeedbackEntry& f) { round_feedback_.push_back(f); }

    /// Recomputes every record from history and this round's feedback.
    void end_round() {
        std::map<DeviceId, std::vector<FeedbackEntry>> by_target;
        for (const auto& f : round_feedback_) by_target[f.about].push_back(f);
        for (auto& [id, rec] : records_) {
            const auto sources = history_.sources_of(id);
            if (!sources.empty()) {
                // uniform weights across partners
                double ic = 0.0;
                for (DeviceId s : sources) ic += history_.implicit(s, id);
                rec.implicit_score = clamp01(ic / static_cast<double>(sources.size()));
            }
            const auto it = by_target.find(id);
            if (it != by_target.end()) rec.explicit_score = explicit_confidence(it->second, id);
            rec.total = total_confidence(rec.implicit_score, rec.explicit_score, rec.alpha, rec.beta);
        }
        round_feedback_.clear();
    }

    std::vector<ConfidenceRecord> snapshot() const {
        std::vector<ConfidenceRecord> out;
        out.reserve(records_.size());
        for (const auto& [id, r] : records_) out.push_back(r);
        return out;
    }

    const ConfidenceRecord& record(DeviceId d) const { return records_.at(d); }
    const InteractionHistory& history() const { return history_; }

private:
    TrustConfig cfg_;
    std::map<DeviceId, ConfidenceRecord> records_;
    InteractionHistory history_;
    std::vector<FeedbackEntry> round_feedback_;
};

}  // namespace clonedetect::trust

#endif  // CLONEDETECT_TRUST_HPP
