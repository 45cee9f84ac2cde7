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
 * Context information, the location-based service (LBS) store, and location
 * proofs.
 *
 * Wire formats, all big-endian:
 *   context  (16 bytes)  id u16 | time u16 | loc_x u16 | loc_y u16 | activity[8]
 *   proof    (99 bytes)  prover u16 | sha256(context) [32] | signature [65]
 *
 * Locations are 8.8 fixed point: one distance unit is 256 steps, so the
 * representable area is [0, 256) on each axis.
 */

#ifndef CLONEDETECT_CONTEXT_HPP
#define CLONEDETECT_CONTEXT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clonedetect/hash.hpp"
#include "clonedetect/sig.hpp"
#include "clonedetect/types.hpp"

namespace clonedetect::lps {

inline constexpr std::size_t kContextBytes = 16;
inline constexpr std::size_t kProofBytes = 2 + 32 + sig::kSignatureBytes;
/// Context record plus private key plus compressed public key.
inline constexpr std::size_t kDeviceRecordBytes = kContextBytes + sig::kPrivateKeyBytes + sig::kPublicKeyBytes;
/// Per-device figure quoted in the prose of the storage analysis; the field
/// table sums to kDeviceRecordBytes instead.
inline constexpr std::size_t kQuotedDeviceBytes = 73;

inline constexpr double kFixedPointScale = 256.0;
/// Coordinates live in [0, kAreaLimit); the bound itself is not representable.
inline constexpr double kAreaLimit = 65536.0 / kFixedPointScale;
inline constexpr std::uint16_t kMaxTime = 0xffff;

using Activity = std::array<char, 8>;
using ContextBytes = std::array<std::uint8_t, kContextBytes>;
using ProofBytes = std::array<std::uint8_t, kProofBytes>;

inline Activity make_activity(std::string_view tag) {
    Activity a{};
    std::memcpy(a.data(), tag.data(), std::min(tag.size(), a.size()));
    return a;
}

struct ContextInformation {
    DeviceId id = 0;
    std::uint16_t time = 0;
    std::uint16_t loc_x = 0;
    std::uint16_t loc_y = 0;
    Activity activity{};

    friend bool operator==(const ContextInformation&, const ContextInformation&) = default;

    ContextBytes serialize() const {
        ContextBytes b{};
        const auto put16 = [&b](std::size_t at, std::uint16_t v) {
            b[at] = static_cast<std::uint8_t>(v >> 8);
            b[at + 1] = static_cast<std::uint8_t>(v);
        };
        put16(0, id);
        put16(2, time);
        put16(4, loc_x);
        put16(6, loc_y);
        std::memcpy(b.data() + 8, activity.data(), 8);
        return b;
    }

    static ContextInformation deserialize(std::span<const std::uint8_t, kContextBytes> b) {
        const auto get16 = [&b](std::size_t at) {
            return static_cast<std::uint16_t>((static_cast<unsigned>(b[at]) << 8) | b[at + 1]);
        };
        ContextInformation ci;
        ci.id = get16(0);
        ci.time = get16(2);
        ci.loc_x = get16(4);
        ci.loc_y = get16(6);
        std::memcpy(ci.activity.data(), b.data() + 8, 8);
        return ci;
    }

    Digest digest() const {
        const auto b = serialize();
        return sha256(b);
    }

    std::string activity_string() const {
        std::size_t n = 0;
        while (n < activity.size() && activity[n] != '\0') ++n;
        return std::string(activity.data(), n);
    }
};

/// Same id, location and activity; times at most one tick apart.
inline bool context_matches(const ContextInformation& a, const ContextInformation& b) {
    const int dt = static_cast<int>(a.time) - static_cast<int>(b.time);
    return a.id == b.id && a.loc_x == b.loc_x && a.loc_y == b.loc_y && a.activity == b.activity && dt >= -1 &&
           dt <= 1;
}

inline double euclidean_distance(const Position& a, const Position& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// 8.8 fixed point, truncating toward zero. Input must be in [0, kAreaLimit).
inline std::uint16_t to_fixed(double coord) {
    if (!(coord >= 0.0 && coord < kAreaLimit)) throw std::out_of_range("coordinate outside the sensing area");
    return static_cast<std::uint16_t>(std::floor(coord * kFixedPointScale));
}

inline double from_fixed(std::uint16_t v) { return v / kFixedPointScale; }

/// Renders a tick count as an ISO-8601 offset from the simulation epoch.
inline std::string iso8601(std::uint16_t seconds) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "1970-01-01T%02u:%02u:%02u.000Z", seconds / 3600u, (seconds / 60u) % 60u,
                  seconds % 60u);
    return buf;
}

/// Snapshot of a device's context. Time saturates at 65535; positions outside
/// the representable area are clamped with a warning.
inline ContextInformation sense_context(DeviceId device, double clock_seconds, Position pos,
                                        std::string_view activity) {
    Position p = pos;
    const double kTop = std::nextafter(kAreaLimit, 0.0);
    p.x = std::clamp(p.x, 0.0, kTop);
    p.y = std::clamp(p.y, 0.0, kTop);
    if (p.x != pos.x || p.y != pos.y || std::isnan(pos.x) || std::isnan(pos.y))
        warn("device " + std::to_string(device) + " position clamped into the sensing area");
    if (std::isnan(p.x)) p.x = 0.0;
    if (std::isnan(p.y)) p.y = 0.0;
    ContextInformation ci;
    ci.id = device;
    const double t = std::floor(std::max(0.0, clock_seconds));
    ci.time = t >= kMaxTime ? kMaxTime : static_cast<std::uint16_t>(t);
    ci.loc_x = to_fixed(p.x);
    ci.loc_y = to_fixed(p.y);
    ci.activity = make_activity(activity);
    return ci;
}

struct LocationProof {
    DeviceId prover = 0;
    Digest ci_digest{};
    sig::EcdsaStarSignature signature;

    ProofBytes serialize() const {
        ProofBytes b{};
        b[0] = static_cast<std::uint8_t>(prover >> 8);
        b[1] = static_cast<std::uint8_t>(prover);
        std::copy(ci_digest.begin(), ci_digest.end(), b.begin() + 2);
        const auto s = sig::encode(signature);
        std::copy(s.begin(), s.end(), b.begin() + 34);
        return b;
    }

    static LocationProof deserialize(std::span<const std::uint8_t, kProofBytes> b) {
        LocationProof p;
        p.prover = static_cast<DeviceId>((static_cast<unsigned>(b[0]) << 8) | b[1]);
        std::copy(b.begin() + 2, b.begin() + 34, p.ci_digest.begin());
        p.signature = sig::decode(b.subspan<34, sig::kSignatureBytes>());
        return p;
    }
};

struct Ack {
    DeviceId device = 0;
};

/// Gateway-side registry: latest context and latest proof per device,
/// verifier cohort and public keys.
class LbsStore {
public:
    Ack store_context(const ContextInformation& ci) {
        contexts_[ci.id] = ci;
        ++store_count_;
        return {ci.id};
    }

    const ContextInformation* context(DeviceId id) const {
        const auto it = contexts_.find(id);
        return it == contexts_.end() ? nullptr : &it->second;
    }

    /// FCFS queue of depth one: a newer proof replaces the stored one.
    void store_proof(const LocationProof& p) { proofs_[p.prover] = p; }

    const LocationProof* proof(DeviceId id) const {
        const auto it = proofs_.find(id);
        return it == proofs_.end() ? nullptr : &it->second;
    }

    void register_key(DeviceId id, const ec::CurvePoint& q) { keys_[id] = q; }

    const ec::CurvePoint* public_key(DeviceId id) const {
        const auto it = keys_.find(id);
        return it == keys_.end() ? nullptr : &it->second;
    }

    void set_verifiers(std::span<const DeviceId> ids) { verifiers_ = {ids.begin(), ids.end()}; }
    bool is_verifier(DeviceId id) const { return verifiers_.contains(id); }
    const std::set<DeviceId>& verifiers() const { return verifiers_; }

    std::size_t context_count() const { return contexts_.size(); }
    std::size_t proof_count() const { return proofs_.size(); }
    std::size_t store_operations() const { return store_count_; }

private:
    std::map<DeviceId, ContextInformation> contexts_;
    std::map<DeviceId, LocationProof> proofs_;
    std::map<DeviceId, ec::CurvePoint> keys_;
    std::set<DeviceId> verifiers_;
    std::size_t store_count_ = 0;
};

class ProofRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProofRequest {
    DeviceId verifier = 0;
    std::uint32_t round = 0;
};

/// The signing side of a prover: its key and its pending proof requests.
struct Prover {
    DeviceId id = 0;
    U256 private_key;
    std::deque<ProofRequest> pending;
};

/// Signs SHA-256(context) with the prover's key, consuming one pending
/// request. Throws ProofRejected when nothing was requested.
inline LocationProof generate_proof(Prover& prover, const ContextInformation& ci, Rng& rng) {
    if (prover.pending.empty()) throw ProofRejected("Reject Proof");
    prover.pending.pop_front();
    LocationProof p;
    p.prover = prover.id;
    p.ci_digest = ci.digest();
    p.signature = sig::sign(p.ci_digest, prover.private_key, rng);
    return p;
}

enum class Verdict {
    Confirmed,
    CompromisedSignature,
    CompromisedContext,
    NotRegistered,
};

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Confirmed: return "CONFIRMED";
        case Verdict::CompromisedSignature: return "COMPROMISED_SIGNATURE";
        case Verdict::CompromisedContext: return "COMPROMISED_CONTEXT";
        case Verdict::NotRegistered: return "NOT_REGISTERED";
    }
    return "?";
}

inline bool is_compromised(Verdict v) {
    return v == Verdict::CompromisedSignature || v == Verdict::CompromisedContext;
}

struct ProofVerdict {
    DeviceId prover = 0;
    Verdict verdict = Verdict::NotRegistered;
};

enum class VerifyPath { Batch, Individual };

struct VerifyOptions {
    std::size_t batch_size = 25;
    std::size_t randomizer_bits = sig::kDefaultRandomizerBits;
    VerifyPath path = VerifyPath::Batch;
};

struct VerifyStats {
    std::size_t batches = 0;
    std::size_t failed_batches = 0;
    std::size_t individual_checks = 0;
};

/// True when the digest commits to the stored context, allowing the
/// one-tick sensing skew.
inline bool digest_matches_store(const Digest& d, const ContextInformation& stored) {
    for (int dt = -1; dt <= 1; ++dt) {
        const int t = static_cast<int>(stored.time) + dt;
        if (t < 0 || t > kMaxTime) continue;
        ContextInformation c = stored;
        c.time = static_cast<std::uint16_t>(t);
        if (c.digest() == d) return true;
    }
    return false;
}

/// Verdicts for a verifier's proofs, in input order.
///
/// Order of checks: context existence at the LBS, then signature validity
/// (batched in chunks of batch_size; a failing chunk falls back to individual
/// ECDSA* checks), then the context comparison. A bad signature wins over a
/// context mismatch.
inline std::vector<ProofVerdict> verify_proof_batch(DeviceId verifier, std::span<const LocationProof> proofs,
                                                    const LbsStore& lbs, const VerifyOptions& opts, Rng& rng,
                                                    VerifyStats* stats = nullptr) {
    if (!lbs.is_verifier(verifier))
        throw ConfigError("device " + std::to_string(verifier) + " is not in the verifier cohort");
    if (opts.batch_size == 0) throw ConfigError("batch_size must be positive");
    std::vector<ProofVerdict> out(proofs.size());
    std::vector<std::size_t> registered;
    for (std::size_t i = 0; i < proofs.size(); ++i) {
        out[i].prover = proofs[i].prover;
        if (lbs.context(proofs[i].prover) == nullptr || lbs.public_key(proofs[i].prover) == nullptr)
            out[i].verdict = Verdict::NotRegistered;
        else
            registered.push_back(i);
    }

    std::vector<bool> sig_ok(proofs.size(), false);
    const auto individual = [&](std::size_t i) {
        if (stats) ++stats->individual_checks;
        sig_ok[i] = sig::verify_star(proofs[i].ci_digest, proofs[i].signature, *lbs.public_key(proofs[i].prover));
    };

    if (opts.path == VerifyPath::Individual) {
        for (std::size_t i : registered) individual(i);
    } else {
        for (std::size_t start = 0; start < registered.size(); start += opts.batch_size) {
            const std::size_t end = std::min(registered.size(), start + opts.batch_size);
            std::vector<sig::BatchItem> items;
            items.reserve(end - start);
            for (std::size_t j = start; j < end; ++j) {
                const auto& p = proofs[registered[j]];
                items.push_back({p.ci_digest, p.signature, *lbs.public_key(p.prover)});
            }
            if (stats) ++stats->batches;
            if (sig::batch_verify(items, rng, opts.randomizer_bits)) {
                for (std::size_t j = start; j < end; ++j) sig_ok[registered[j]] = true;
            } else {
                if (stats) ++stats->failed_batches;
                for (std::size_t j = start; j < end; ++j) individual(registered[j]);
            }
        }
    }

    for (std::size_t i : registered) {
        if (!sig_ok[i])
            out[i].verdict = Verdict::CompromisedSignature;
        else if (!digest_matches_store(proofs[i].ci_digest, *lbs.context(proofs[i].prover)))
            out[i].verdict = Verdict::CompromisedContext;
        else
            out[i].verdict = Verdict::Confirmed;
    }
    return out;
}

}  // namespace clonedetect::lps

#endif  // CLONEDETECT_CONTEXT_HPP
