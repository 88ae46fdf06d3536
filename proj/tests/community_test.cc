// Copyright 2026 The hodgeflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hodgeflow/community.hpp"
#include "hodgeflow/ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"

namespace hodgeflow {
namespace {

using testing::MakeNetwork;

InfluenceNetwork TwoTriangles() {
  return MakeNetwork({{"a1", "a2", 1}, {"a2", "a3", 1}, {"a3", "a1", 1},
                      {"b1", "b2", 1}, {"b2", "b3", 1}, {"b3", "b1", 1}});
}

InfluenceNetwork BridgedTriangles() {
  auto net = TwoTriangles();
  net.edges[{*net.IndexOf("a1"), *net.IndexOf("b1")}] = 1;
  return net;
}

// Small graphs used for the brute-force optimality checks.
std::vector<InfluenceNetwork> SmallCorpus() {
  std::vector<InfluenceNetwork> out = {TwoTriangles(), BridgedTriangles()};
  // Two 4-cliques joined by a bridge, with directed and reciprocal counts.
  out.push_back(MakeNetwork({{"a", "b", 2}, {"a", "c", 1}, {"a", "d", 1}, {"b", "c", 1},
                             {"c", "b", 1}, {"b", "d", 1}, {"c", "d", 3}, {"e", "f", 1},
                             {"e", "g", 1}, {"e", "h", 2}, {"f", "g", 1}, {"f", "h", 1},
                             {"g", "h", 1}, {"d", "e", 1}}));
  // Star with a pendant pair.
  out.push_back(MakeNetwork({{"c", "l1", 1}, {"c", "l2", 1}, {"c", "l3", 1}, {"l3", "l4", 2}}));
  // Three triangles in a ring.
  out.push_back(MakeNetwork({{"1", "2", 1}, {"2", "3", 1}, {"3", "1", 1}, {"4", "5", 1},
                             {"5", "6", 1}, {"6", "4", 1}, {"7", "8", 1}, {"8", "1", 1},
                             {"3", "4", 1}, {"6", "7", 1}, {"7", "2", 1}}));
  // Weighted 5-cycle with a chord.
  out.push_back(MakeNetwork({{"p", "q", 3}, {"q", "r", 1}, {"r", "s", 3}, {"s", "t", 1},
                             {"t", "p", 2}, {"p", "r", 1}}));
  return out;
}

TEST(Modularity, TwoDisconnectedTriangles) {
  const auto net = TwoTriangles();
  std::vector<std::size_t> split(6);
  for (std::size_t i = 0; i < 6; ++i) split[i] = net.nodes[i][0] == 'a' ? 0 : 1;
  EXPECT_NEAR(Modularity(net, split, 1.0), 0.5, 1e-15);
  EXPECT_NEAR(oracle::Modularity(net, split, 1.0), 0.5, 1e-15);
}

TEST(Modularity, SingleCommunityIsOneMinusResolution) {
  for (const auto& net : SmallCorpus()) {
    const std::vector<std::size_t> one(net.size(), 0);
    for (double gamma : {0.5, 1.0, 2.0}) {
      EXPECT_NEAR(Modularity(net, one, gamma), 1.0 - gamma, 1e-14);
    }
  }
}

TEST(Modularity, BridgedTriangles) {
  const auto net = BridgedTriangles();
  std::vector<std::size_t> split(6);
  for (std::size_t i = 0; i < 6; ++i) split[i] = net.nodes[i][0] == 'a' ? 0 : 1;
  EXPECT_NEAR(Modularity(net, split, 1.0), 5.0 / 14.0, 1e-15);
  EXPECT_NEAR(oracle::BruteMaxModularity(net, 1.0), 5.0 / 14.0, 1e-15);
}

TEST(Modularity, AgreesWithDoubleSum) {
  Rng rng(8);
  for (const auto& net : SmallCorpus()) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::size_t> c(net.size());
      for (auto& v : c) v = rng.Below(3);
      for (double gamma : {0.7, 1.0, 1.3}) {
        EXPECT_NEAR(Modularity(net, c, gamma), oracle::Modularity(net, c, gamma), 1e-14);
      }
    }
  }
}

TEST(Modularity, Errors) {
  const auto empty = MakeNetwork({}, {"x"});
  EXPECT_THROW(Modularity(empty, {0}, 1.0), Error);
  EXPECT_THROW(Modularity(TwoTriangles(), {0, 0}, 1.0), Error);
  EXPECT_THROW(Modularity(TwoTriangles(), std::vector<std::size_t>(6, 0), 0.0), Error);
}

TEST(Louvain, TwoTriangles) {
  const auto net = TwoTriangles();
  const auto p = Louvain(net, 1.0, 1);
  EXPECT_EQ(p.community_count, 2u);
  EXPECT_NEAR(p.modularity, 0.5, 1e-12);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(p.assignment[i] == p.assignment[j], net.nodes[i][0] == net.nodes[j][0]);
    }
  }
}

TEST(Louvain, BridgedTriangles) {
  const auto p = LouvainBest(BridgedTriangles(), 1.0, 0, 5);
  EXPECT_EQ(p.community_count, 2u);
  EXPECT_NEAR(p.modularity, 5.0 / 14.0, 1e-12);
}

TEST(Louvain, SingleNodeIsAnError) {
  EXPECT_THROW(Louvain(MakeNetwork({}, {"x"}), 1.0, 0), Error);
  EXPECT_THROW(Louvain(InfluenceNetwork{}, 1.0, 0), Error);
  EXPECT_THROW(Louvain(TwoTriangles(), -1.0, 0), Error);
}

TEST(Louvain, ReachesBruteForceOptimumOnSmallGraphs) {
  for (const auto& net : SmallCorpus()) {
    for (double gamma : {1.0, 0.5, 1.5}) {
      const double optimum = oracle::BruteMaxModularity(net, gamma);
      double best = -1.0;
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        best = std::max(best, Louvain(net, gamma, seed).modularity);
      }
      EXPECT_NEAR(best, optimum, 1e-12) << "nodes " << net.size() << " gamma " << gamma;
    }
  }
}

TEST(Louvain, ConsistentDeterministicAndMonotone) {
  SynthConfig config;
  config.issuer_count = 30;
  config.entity_count = 400;
  config.gap_decay = 0.4;
  const auto net = BuildListNetwork(SynthGenerate(config, 2));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = Louvain(net, 1.0, seed);
    EXPECT_EQ(Modularity(net, p.assignment, 1.0), p.modularity);
    EXPECT_NEAR(oracle::Modularity(net, p.assignment, 1.0), p.modularity, 1e-12);
    EXPECT_GE(p.modularity, 0.0);
    for (std::size_t k = 1; k < p.pass_modularity.size(); ++k) {
      EXPECT_GE(p.pass_modularity[k], p.pass_modularity[k - 1] - 1e-12);
    }
    const auto again = Louvain(net, 1.0, seed);
    EXPECT_EQ(again.assignment, p.assignment);
    // Contiguous ids.
    std::set<std::size_t> ids(p.assignment.begin(), p.assignment.end());
    EXPECT_EQ(ids.size(), p.community_count);
    EXPECT_EQ(*ids.rbegin() + 1, p.community_count);
  }
}

TEST(Louvain, RelabelingPermutesAssignment) {
  const auto net = SmallCorpus()[2];
  std::vector<testing::EdgeSpec> renamed;
  for (const auto& [key, count] : net.edges) {
    renamed.emplace_back("x" + net.nodes[key.second], "x" + net.nodes[key.first], count);
  }
  // Reversing every edge leaves W unchanged; renaming keeps node order.
  const auto other = MakeNetwork(renamed);
  const auto a = LouvainBest(net, 1.0, 0, 5);
  const auto b = LouvainBest(other, 1.0, 0, 5);
  EXPECT_NEAR(a.modularity, b.modularity, 1e-12);
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = 0; j < net.size(); ++j) {
      EXPECT_EQ(a.assignment[i] == a.assignment[j], b.assignment[i] == b.assignment[j]);
    }
  }
}

TEST(PartitionFile, RoundTrips) {
  const auto net = TwoTriangles();
  const auto p = Louvain(net, 1.0, 3);
  std::ostringstream out;
  WritePartition(net, p, out);
  std::istringstream in(out.str());
  const auto back = ReadPartition(net, in);
  EXPECT_EQ(back.assignment, p.assignment);
  EXPECT_EQ(back.modularity, p.modularity);
  EXPECT_EQ(back.seed, 3u);
}

}  // namespace
}  // namespace hodgeflow
