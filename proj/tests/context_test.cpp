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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "clonedetect/context.hpp"

using namespace clonedetect;
using namespace clonedetect::lps;

namespace {

struct SinkGuard {
    WarningSink saved = warning_sink();
    std::vector<std::string> seen;
    SinkGuard() {
        warning_sink() = [this](const std::string& m) { seen.push_back(m); };
    }
    ~SinkGuard() { warning_sink() = saved; }
};

std::string hex(std::span<const std::uint8_t> b) {
    static const char* d = "0123456789abcdef";
    std::string s;
    for (auto x : b) {
        s += d[x >> 4];
        s += d[x & 15];
    }
    return s;
}

struct Device {
    DeviceId id;
    sig::KeyPair keys;
    ContextInformation ci;
};

struct Fixture {
    Rng rng{51};
    LbsStore lbs;
    std::vector<Device> devices;
    DeviceId verifier = 1000;

    explicit Fixture(std::size_t n) {
        lbs.set_verifiers(std::vector<DeviceId>{verifier});
        for (std::size_t i = 0; i < n; ++i) {
            Device d{static_cast<DeviceId>(i), sig::keygen(rng),
                     sense_context(static_cast<DeviceId>(i), 100.0, {1.0 + i, 2.0}, "sensing")};
            lbs.register_key(d.id, d.keys.Q);
            lbs.store_context(d.ci);
            devices.push_back(d);
        }
    }

    LocationProof proof(const Device& d, const ContextInformation& ci, const U256& key) {
        Prover p{d.id, key, {ProofRequest{verifier, 1}}};
        return generate_proof(p, ci, rng);
    }
};

}  // namespace

TEST(Context, SerializesToSixteenBigEndianBytes) {
    ContextInformation ci{0x0102, 0x0304, to_fixed(1.5), to_fixed(2.25), make_activity("sensing")};
    const auto b = ci.serialize();
    ASSERT_EQ(b.size(), 16u);
    EXPECT_EQ(hex(b), "010203040180024073656e73696e6700");
    EXPECT_EQ(hex(ci.digest()), "07cb84220efa6268759c711adec20528093d325d05a4b5bee6637c5ecd999518");
    EXPECT_EQ(ContextInformation::deserialize(b), ci);
    EXPECT_EQ(ci.activity_string(), "sensing");
}

TEST(Context, RoundTripsRandomRecords) {
    Rng rng(52);
    for (int i = 0; i < 500; ++i) {
        ContextInformation ci;
        ci.id = static_cast<DeviceId>(rng.next_u64());
        ci.time = static_cast<std::uint16_t>(rng.next_u64());
        ci.loc_x = static_cast<std::uint16_t>(rng.next_u64());
        ci.loc_y = static_cast<std::uint16_t>(rng.next_u64());
        for (auto& c : ci.activity) c = static_cast<char>(rng.next_u64());
        EXPECT_EQ(ContextInformation::deserialize(ci.serialize()), ci);
    }
}

TEST(Context, StorageSizes) {
    EXPECT_EQ(kContextBytes, 16u);
    EXPECT_EQ(kDeviceRecordBytes, 16u + 32u + 33u);
    EXPECT_EQ(kDeviceRecordBytes, 81u);
    EXPECT_NE(kDeviceRecordBytes, kQuotedDeviceBytes);
    EXPECT_EQ(kProofBytes, 99u);
}

TEST(Context, FixedPointQuantization) {
    EXPECT_EQ(to_fixed(0.0), 0u);
    EXPECT_EQ(to_fixed(1.0), 256u);
    EXPECT_EQ(to_fixed(255.999), 65535u);
    EXPECT_EQ(from_fixed(to_fixed(12.5)), 12.5);
    EXPECT_THROW(to_fixed(256.0), std::out_of_range);
    EXPECT_THROW(to_fixed(-0.1), std::out_of_range);
}

TEST(Context, SensingClampsAndSaturates) {
    SinkGuard g;
    const auto ci = sense_context(7, 1e9, {300.0, -4.0}, "a-very-long-activity");
    EXPECT_EQ(ci.time, kMaxTime);
    EXPECT_EQ(ci.loc_x, 65535u);
    EXPECT_EQ(ci.loc_y, 0u);
    EXPECT_EQ(ci.activity_string(), "a-very-l");
    EXPECT_EQ(g.seen.size(), 1u);
    const auto ok = sense_context(7, 12.7, {3.0, 4.0}, "idle");
    EXPECT_EQ(ok.time, 12u);
    EXPECT_EQ(g.seen.size(), 1u);
}

TEST(Context, MatchToleratesOneTick) {
    const auto a = sense_context(3, 10, {5, 5}, "relay");
    auto b = a;
    b.time = 11;
    EXPECT_TRUE(context_matches(a, b));
    b.time = 12;
    EXPECT_FALSE(context_matches(a, b));
    b = a;
    b.loc_x += 1;
    EXPECT_FALSE(context_matches(a, b));
    EXPECT_TRUE(digest_matches_store(a.digest(), a));
    b = a;
    b.time = 9;
    EXPECT_TRUE(digest_matches_store(b.digest(), a));
    b.time = 8;
    EXPECT_FALSE(digest_matches_store(b.digest(), a));
}

TEST(Geometry, EuclideanDistance) {
    EXPECT_DOUBLE_EQ(euclidean_distance({0, 0}, {3, 4}), 5.0);
    EXPECT_DOUBLE_EQ(euclidean_distance({1, 1}, {1, 1}), 0.0);
}

TEST(Geometry, TriangleInequalityOnRandomTriples) {
    Rng rng(53);
    for (int i = 0; i < 1000; ++i) {
        const Position a{rng.uniform_real(0, 256), rng.uniform_real(0, 256)};
        const Position b{rng.uniform_real(0, 256), rng.uniform_real(0, 256)};
        const Position c{rng.uniform_real(0, 256), rng.uniform_real(0, 256)};
        EXPECT_LE(euclidean_distance(a, c), euclidean_distance(a, b) + euclidean_distance(b, c) + 1e-9);
        EXPECT_DOUBLE_EQ(euclidean_distance(a, b), euclidean_distance(b, a));
    }
}

TEST(Context, Iso8601Rendering) {
    EXPECT_EQ(iso8601(0), "1970-01-01T00:00:00.000Z");
    EXPECT_EQ(iso8601(3725), "1970-01-01T01:02:05.000Z");
}

TEST(Lbs, StoreAckAndLatestProof) {
    Fixture f(2);
    EXPECT_EQ(f.lbs.store_operations(), 2u);
    const auto ack = f.lbs.store_context(f.devices[0].ci);
    EXPECT_EQ(ack.device, 0u);
    EXPECT_EQ(f.lbs.store_operations(), 3u);
    EXPECT_EQ(f.lbs.context_count(), 2u);
    const auto p1 = f.proof(f.devices[0], f.devices[0].ci, f.devices[0].keys.d);
    const auto p2 = f.proof(f.devices[0], f.devices[0].ci, f.devices[0].keys.d);
    f.lbs.store_proof(p1);
    f.lbs.store_proof(p2);
    EXPECT_EQ(f.lbs.proof_count(), 1u);
    EXPECT_EQ(f.lbs.proof(0)->signature.R, p2.signature.R);
    EXPECT_EQ(f.lbs.proof(5), nullptr);
}

TEST(Proof, SerializesToNinetyNineBytesAndRoundTrips) {
    Fixture f(1);
    const auto p = f.proof(f.devices[0], f.devices[0].ci, f.devices[0].keys.d);
    const auto b = p.serialize();
    ASSERT_EQ(b.size(), 99u);
    const auto q = LocationProof::deserialize(b);
    EXPECT_EQ(q.prover, p.prover);
    EXPECT_EQ(q.ci_digest, p.ci_digest);
    EXPECT_EQ(q.signature.R, p.signature.R);
    EXPECT_EQ(q.signature.s, p.signature.s);
}

TEST(Proof, GenerationRequiresPendingRequest) {
    Fixture f(1);
    Prover p{0, f.devices[0].keys.d, {}};
    try {
        generate_proof(p, f.devices[0].ci, f.rng);
        FAIL() << "expected rejection";
    } catch (const ProofRejected& e) {
        EXPECT_STREQ(e.what(), "Reject Proof");
    }
    p.pending.push_back({f.verifier, 1});
    EXPECT_NO_THROW(generate_proof(p, f.devices[0].ci, f.rng));
    EXPECT_TRUE(p.pending.empty());
}

TEST(Verify, VerdictsForEachCase) {
    Fixture f(4);
    Rng other(54);
    const U256 foreign = sig::keygen(other).d;
    auto stale = f.devices[2].ci;
    stale.time -= 10;
    const std::vector<LocationProof> proofs = {
        f.proof(f.devices[0], f.devices[0].ci, f.devices[0].keys.d),  // genuine
        f.proof(f.devices[1], f.devices[1].ci, foreign),              // wrong key
        f.proof(f.devices[2], stale, f.devices[2].keys.d),            // stale context
        f.proof({77, f.devices[3].keys, f.devices[3].ci}, f.devices[3].ci, f.devices[3].keys.d),  // unknown id
    };
    for (auto path : {VerifyPath::Batch, VerifyPath::Individual}) {
        VerifyStats stats;
        const auto v = verify_proof_batch(f.verifier, proofs, f.lbs, {25, 64, path}, f.rng, &stats);
        ASSERT_EQ(v.size(), 4u);
        EXPECT_EQ(v[0].verdict, Verdict::Confirmed);
        EXPECT_EQ(v[1].verdict, Verdict::CompromisedSignature);
        EXPECT_EQ(v[2].verdict, Verdict::CompromisedContext);
        EXPECT_EQ(v[3].verdict, Verdict::NotRegistered);
        if (path == VerifyPath::Batch) {
            EXPECT_EQ(stats.batches, 1u);
            EXPECT_EQ(stats.failed_batches, 1u);
            EXPECT_EQ(stats.individual_checks, 3u);
        } else {
            EXPECT_EQ(stats.batches, 0u);
            EXPECT_EQ(stats.individual_checks, 3u);
        }
    }
}

TEST(Verify, CleanBatchesNeedNoIndividualChecks) {
    Fixture f(30);
    std::vector<LocationProof> proofs;
    for (const auto& d : f.devices) proofs.push_back(f.proof(d, d.ci, d.keys.d));
    VerifyStats stats;
    const auto v = verify_proof_batch(f.verifier, proofs, f.lbs, {10, 64, VerifyPath::Batch}, f.rng, &stats);
    for (const auto& x : v) EXPECT_EQ(x.verdict, Verdict::Confirmed);
    EXPECT_EQ(stats.batches, 3u);
    EXPECT_EQ(stats.failed_batches, 0u);
    EXPECT_EQ(stats.individual_checks, 0u);
}

TEST(Verify, CorruptedSignatureBeatsStaleContext) {
    Fixture f(1);
    auto stale = f.devices[0].ci;
    stale.loc_y += 3;
    Rng other(55);
    const auto p = f.proof(f.devices[0], stale, sig::keygen(other).d);
    const auto v = verify_proof_batch(f.verifier, std::vector<LocationProof>{p}, f.lbs, {}, f.rng);
    EXPECT_EQ(v[0].verdict, Verdict::CompromisedSignature);
}

TEST(Verify, OnlyCohortMembersMayVerify) {
    Fixture f(1);
    const std::vector<LocationProof> none;
    EXPECT_THROW(verify_proof_batch(3, none, f.lbs, {}, f.rng), ConfigError);
    EXPECT_THROW(verify_proof_batch(f.verifier, none, f.lbs, {0, 64, VerifyPath::Batch}, f.rng), ConfigError);
    EXPECT_TRUE(verify_proof_batch(f.verifier, none, f.lbs, {}, f.rng).empty());
}

TEST(Verify, VerdictNames) {
    EXPECT_EQ(to_string(Verdict::Confirmed), "CONFIRMED");
    EXPECT_EQ(to_string(Verdict::CompromisedSignature), "COMPROMISED_SIGNATURE");
    EXPECT_TRUE(is_compromised(Verdict::CompromisedContext));
    EXPECT_FALSE(is_compromised(Verdict::NotRegistered));
}
