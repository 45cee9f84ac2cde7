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

#include <algorithm>
#include <set>

#include "clonedetect/sim.hpp"

using namespace clonedetect;
using namespace clonedetect::sim;

namespace {

NetworkConfig sparse(std::uint64_t seed = 1) {
    NetworkConfig c;
    c.seed = seed;
    return c;
}

NetworkConfig clean(std::uint64_t seed = 1) {
    NetworkConfig c;
    c.environment = Environment::Custom;
    c.num_clones = 0;
    c.seed = seed;
    return c;
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const auto& s) { return s.find(needle) != std::string::npos; });
}

void expect_graph_respects_radius(const SimulationState& s) {
    const auto& adj = s.graph.adjacency;
    ASSERT_EQ(adj.size(), s.nodes.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        EXPECT_LE(adj[i].size(), s.nodes.size() - 1);
        for (std::size_t j = i + 1; j < s.nodes.size(); ++j) {
            const bool near = lps::euclidean_distance(s.nodes[i].pos, s.nodes[j].pos) <= s.config.comm_radius;
            const bool edge = std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end();
            const bool back = std::find(adj[j].begin(), adj[j].end(), i) != adj[j].end();
            ASSERT_EQ(near, edge);
            ASSERT_EQ(edge, back);
        }
        ASSERT_EQ(std::count(adj[i].begin(), adj[i].end(), i), 0);
    }
}

/// Verdict expected from the state alone: a proof is only valid under the
/// registered key, and only fresh contexts match the LBS record.
lps::Verdict offline_verdict(const SimulationState& s, const Node& n) {
    const auto* stored = s.lbs.context(n.id);
    if (stored == nullptr) return lps::Verdict::NotRegistered;
    if (n.signing_key != s.nodes[n.id].keys.d) return lps::Verdict::CompromisedSignature;
    const lps::ContextInformation signed_ci =
        n.clone ? (n.clone->attack_case == 2 ? n.clone->captured : s.nodes[n.clone->victim_node].latest_ci)
                : n.latest_ci;
    return lps::context_matches(signed_ci, *stored) ? lps::Verdict::Confirmed : lps::Verdict::CompromisedContext;
}

}  // namespace

TEST(Config, DefaultsAreValid) {
    EXPECT_TRUE(sparse().violations().empty());
    NetworkConfig d;
    d.environment = Environment::Dense;
    d.num_devices = 500;
    EXPECT_TRUE(d.violations().empty());
    EXPECT_EQ(d.provers(), 350u);
    EXPECT_EQ(d.clones(), 50u);
    EXPECT_EQ(sparse().clones(), 20u);
}

TEST(Config, ViolationsAreListed) {
    NetworkConfig c;
    c.num_devices = 500;
    c.num_clones = 600;
    c.environment = Environment::Custom;
    EXPECT_TRUE(contains(c.violations(), "clones exceed provers"));
    c = sparse();
    c.num_devices = 50;
    c.batch_size = 7;
    c.num_clones = 3;
    const auto v = c.violations();
    EXPECT_TRUE(contains(v, "devices must be between"));
    EXPECT_TRUE(contains(v, "batch-size"));
    EXPECT_TRUE(contains(v, "sparse environment"));
    EXPECT_THROW(c.validate(), ConfigError);
    c = sparse();
    c.environment = Environment::Dense;
    c.num_clones = 10;
    EXPECT_TRUE(contains(c.violations(), "dense environment"));
    c = sparse();
    c.num_verifiers = 100;
    EXPECT_TRUE(contains(c.violations(), "verifiers must be fewer"));
    EXPECT_THROW(parse_environment("urban"), ConfigError);
}

TEST(Init, ReferenceScaleRoles) {
    NetworkConfig c;
    c.num_devices = 500;
    c.environment = Environment::Dense;
    const auto s = init_network(c);
    std::size_t verifiers = 0, provers = 0, idle = 0;
    for (const auto& n : s.nodes) {
        verifiers += n.role == NodeRole::Verifier;
        provers += n.role == NodeRole::Prover;
        idle += n.role == NodeRole::Idle;
        EXPECT_TRUE(n.keys.Q.on_curve());
        EXPECT_EQ(n.keys.Q, sig::keypair_from_private(n.keys.d).Q);
    }
    EXPECT_EQ(verifiers, 30u);
    EXPECT_EQ(provers, 350u);
    EXPECT_EQ(idle, 120u);
    EXPECT_EQ(s.verifiers.size(), 30u);
    EXPECT_EQ(s.lbs.context_count(), 380u);
    expect_graph_respects_radius(s);
}

TEST(Init, DeterministicPerSeed) {
    const auto a = init_network(sparse(5));
    const auto b = init_network(sparse(5));
    const auto c = init_network(sparse(6));
    bool differs = false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        EXPECT_EQ(a.nodes[i].pos, b.nodes[i].pos);
        EXPECT_EQ(a.nodes[i].role, b.nodes[i].role);
        EXPECT_EQ(a.nodes[i].keys.d, b.nodes[i].keys.d);
        differs |= !(a.nodes[i].pos == c.nodes[i].pos);
    }
    EXPECT_TRUE(differs);
}

TEST(Init, ZeroRadiusHasNoEdges) {
    auto c = sparse();
    c.comm_radius = 0.0;
    EXPECT_EQ(init_network(c).graph.edge_count(), 0u);
    c.comm_radius = 400.0;
    const auto s = init_network(c);
    EXPECT_EQ(s.graph.edge_count(), 100u * 99u / 2u);
    EXPECT_EQ(s.graph.max_degree(), 99u);
}

TEST(Init, InvalidConfigThrows) {
    auto c = sparse();
    c.num_devices = 20;
    EXPECT_THROW(init_network(c), ConfigError);
}

TEST(Mobility, ZeroSpeedFreezesPositions) {
    auto c = clean();
    c.speed_min = c.speed_max = 0.0;
    auto s = init_network(c);
    const auto before = s.nodes;
    for (int i = 0; i < 5; ++i) mobility_step(s);
    for (std::size_t i = 0; i < s.nodes.size(); ++i) EXPECT_EQ(s.nodes[i].pos, before[i].pos);
}

TEST(Mobility, GraphInvariantAfterEveryStep) {
    auto c = clean();
    c.comm_radius = 20.0;
    auto s = init_network(c);
    for (int i = 0; i < 10; ++i) {
        mobility_step(s);
        expect_graph_respects_radius(s);
        for (const auto& n : s.nodes) {
            EXPECT_GE(n.pos.x, 0.0);
            EXPECT_LT(n.pos.x, c.area_side);
        }
    }
}

TEST(Mobility, ArrivalWithZeroPauseSamplesFreshWaypointDeterministically) {
    auto c = clean(9);
    c.pause_min = c.pause_max = 0;
    auto a = init_network(c);
    auto b = init_network(c);
    for (auto* s : {&a, &b}) {
        s->nodes[0].waypoint.target = s->nodes[0].pos;
        mobility_step(*s);
    }
    EXPECT_FALSE(a.nodes[0].waypoint.target == a.nodes[0].pos);
    EXPECT_EQ(a.nodes[0].waypoint.target, b.nodes[0].waypoint.target);
    EXPECT_EQ(a.nodes[0].pos, b.nodes[0].pos);
}

TEST(Mobility, LongRunConcentratesTowardCentre) {
    auto c = clean(3);
    c.speed_min = 5.0;
    c.speed_max = 10.0;
    auto s = init_network(c);
    std::size_t inside = 0, samples = 0;
    for (int step = 0; step < 400; ++step) {
        mobility_step(s);
        if (step < 100) continue;
        for (const auto& n : s.nodes) {
            ++samples;
            inside += n.pos.x >= 64 && n.pos.x < 192 && n.pos.y >= 64 && n.pos.y < 192;
        }
    }
    // uniform placement would put a quarter of the samples in the centre square
    EXPECT_GT(static_cast<double>(inside) / samples, 0.30);
}

TEST(Clones, InjectionContract) {
    auto s = init_network(sparse());
    Rng rng(7);
    const auto before = s.nodes.size();
    EXPECT_TRUE(inject_clones(s, 0, rng).empty());
    EXPECT_EQ(s.nodes.size(), before);
    const auto created = inject_clones(s, 20, rng);
    EXPECT_EQ(created.size(), 20u);
    std::set<DeviceId> victims;
    for (auto idx : created) {
        const Node& c = s.nodes[idx];
        ASSERT_TRUE(c.clone.has_value());
        const Node& v = s.nodes[c.clone->victim_node];
        EXPECT_EQ(v.role, NodeRole::Prover);
        EXPECT_TRUE(v.alive);
        EXPECT_EQ(c.id, v.id);
        EXPECT_EQ(c.clone->captured, v.latest_ci);
        EXPECT_EQ(c.keys.d, v.keys.d);
        EXPECT_GT(lps::euclidean_distance(c.pos, v.pos), kClonePlacementGap);
        EXPECT_TRUE(lps::to_fixed(c.pos.x) != lps::to_fixed(v.pos.x) ||
                    lps::to_fixed(c.pos.y) != lps::to_fixed(v.pos.y));
        victims.insert(v.id);
    }
    EXPECT_EQ(victims.size(), 20u);
    EXPECT_THROW(inject_clones(s, 1000, rng), ConfigError);
}

TEST(Round, CleanNetworkConfirmsEveryone) {
    auto s = init_network(clean());
    for (int r = 0; r < 3; ++r) {
        if (r) mobility_step(s);
        const auto rep = run_detection_round(s);
        EXPECT_EQ(rep.verdicts.size(), 70u);
        for (const auto& v : rep.verdicts) EXPECT_EQ(v.verdict, lps::Verdict::Confirmed);
        EXPECT_EQ(rep.summary.failed_batches, 0u);
    }
    EXPECT_EQ(s.log.count(metrics::Category::CompromiseReport), 0u);
    EXPECT_EQ(s.lbs.proof_count(), 70u);
}

TEST(Round, MessageSequencePerProver) {
    auto s = init_network(clean());
    run_detection_round(s);
    using metrics::Category;
    EXPECT_EQ(s.log.count(Category::Sense), 140u);
    EXPECT_EQ(s.log.count(Category::Store), 70u);
    EXPECT_EQ(s.log.count(Category::ProofRequest), 70u);
    EXPECT_EQ(s.log.count(Category::ProofResponse), 70u);
    EXPECT_EQ(s.log.count(Category::CiCheck), 70u);
    EXPECT_EQ(s.log.count(Category::Ack), 140u);
    EXPECT_EQ(s.log.count(Category::VerifyConfirm), 70u);
}

TEST(Round, VerdictsMatchOfflineOracle) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto c = sparse(seed);
        auto s = init_network(c);
        Rng rng(seed + 100);
        inject_clones(s, c.clones(), rng);
        for (int r = 0; r < 3; ++r) {
            if (r) mobility_step(s);
            const auto rep = run_detection_round(s);
            EXPECT_EQ(rep.verdicts.size(), 90u);
            std::size_t flagged = 0;
            for (const auto& v : rep.verdicts) {
                const Node& n = s.nodes[v.node];
                EXPECT_EQ(v.verdict, offline_verdict(s, n)) << "node " << v.node;
                if (lps::is_compromised(v.verdict)) {
                    ++flagged;
                    EXPECT_EQ(n.role, NodeRole::Clone);
                }
                if (n.role == NodeRole::Clone) {
                    EXPECT_EQ(v.verdict, n.clone->attack_case == 1 ? lps::Verdict::CompromisedSignature
                                                                   : lps::Verdict::CompromisedContext);
                }
            }
            EXPECT_EQ(flagged, 20u);
        }
    }
}

TEST(Experiment, SparseAndDenseDetectEveryClone) {
    const auto r = run_experiment(sparse(4));
    EXPECT_EQ(r.injected_clones, 20u);
    EXPECT_EQ(r.detection_probability, 1.0);
    EXPECT_EQ(r.false_positives, 0u);
    EXPECT_EQ(r.missed_in_round, 0u);
    NetworkConfig d;
    d.environment = Environment::Dense;
    d.num_devices = 500;
    d.seed = 4;
    const auto rd = run_experiment(d);
    EXPECT_EQ(rd.injected_clones, 50u);
    EXPECT_EQ(rd.detection_probability, 1.0);
    EXPECT_EQ(rd.false_positives, 0u);
    for (const auto& det : rd.detections) {
        EXPECT_TRUE(det.detected);
        EXPECT_EQ(det.round, 1u);
    }
}

TEST(Experiment, NoClonesMeansProbabilityOne) {
    const auto r = run_experiment(clean());
    EXPECT_EQ(r.injected_clones, 0u);
    EXPECT_EQ(r.detection_probability, 1.0);
    EXPECT_EQ(r.verdict_counts.at("CONFIRMED"), 210u);
}

TEST(Experiment, ReportBytesAreDeterministic) {
    const auto a = run_experiment(sparse(7)).to_json().dump();
    const auto b = run_experiment(sparse(7)).to_json().dump();
    const auto c = run_experiment(sparse(8)).to_json().dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Experiment, DetectionTimePositiveAndMonotoneInLatency) {
    auto lo = sparse(2), hi = sparse(2);
    hi.latency_ms = 20.0;
    const auto a = run_experiment(lo), b = run_experiment(hi);
    ASSERT_EQ(a.detections.size(), b.detections.size());
    for (std::size_t i = 0; i < a.detections.size(); ++i) {
        EXPECT_GT(a.detections[i].protocol_ms, 0.0);
        EXPECT_LE(a.detections[i].protocol_ms, b.detections[i].protocol_ms);
    }
}

TEST(Experiment, CaseMixFollowsFraction) {
    auto c = sparse(3);
    c.case_one_fraction = 0.25;
    const auto r = run_experiment(c);
    std::size_t case_one = 0;
    for (const auto& d : r.detections) case_one += d.attack_case == 1;
    EXPECT_EQ(case_one, 5u);
    EXPECT_EQ(r.verdict_counts.at("COMPROMISED_SIGNATURE"), 15u);
    EXPECT_EQ(r.verdict_counts.at("COMPROMISED_CONTEXT"), 45u);
}

TEST(Experiment, ConfidenceStaysInUnitInterval) {
    const auto r = run_experiment(sparse(11));
    for (const auto& round : r.rounds)
        for (const auto& c : round.confidence) {
            EXPECT_GE(c.total, 0.0);
            EXPECT_LE(c.total, 1.0);
        }
}
