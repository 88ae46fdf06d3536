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

#include "hodgeflow/hodge.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"

namespace hodgeflow {
namespace {

using testing::MakeFlow;

// A->B, B->C, A->C with unit flow and weight.
FlowNetwork FeedForwardTriangle() { return MakeFlow(3, {{0, 1, 1, 1}, {1, 2, 1, 1}, {0, 2, 1, 1}}); }
FlowNetwork ThreeCycle() { return MakeFlow(3, {{0, 1, 1, 1}, {1, 2, 1, 1}, {2, 0, 1, 1}}); }

FlowNetwork RandomFlow(Rng& rng, std::size_t n, double edge_prob, bool connected) {
  std::vector<std::tuple<std::size_t, std::size_t, double, double>> pairs;
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto add = [&](std::size_t i, std::size_t j) {
    if (i == j || !used.insert({std::min(i, j), std::max(i, j)}).second) return;
    const double w = 1.0 - rng.Uniform();  // (0, 1]
    const double f = static_cast<double>(rng.Below(7)) - 3.0;
    pairs.emplace_back(i, j, f, w);
  };
  if (connected) {
    for (std::size_t i = 1; i < n; ++i) add(i, rng.Below(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.Uniform() < edge_prob) add(i, j);
    }
  }
  return MakeFlow(n, pairs);
}

TEST(AssembleLaplacian, TwoNodes) {
  const auto sys = AssembleLaplacian(MakeFlow(2, {{0, 1, 1, 1}}));
  EXPECT_EQ(sys.At(0, 0), 1.0);
  EXPECT_EQ(sys.At(0, 1), -1.0);
  EXPECT_EQ(sys.At(1, 0), -1.0);
  EXPECT_EQ(sys.At(1, 1), 1.0);
  EXPECT_EQ(sys.rhs, (std::vector<double>{1.0, -1.0}));
  EXPECT_EQ(sys.component_count, 1u);
}

TEST(AssembleLaplacian, TriangleAndRowSums) {
  const auto sys = AssembleLaplacian(ThreeCycle());
  for (std::size_t i = 0; i < 3; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(sys.At(i, j), i == j ? 2.0 : -1.0);
      row += sys.At(i, j);
    }
    EXPECT_EQ(row, 0.0);
  }
}

TEST(AssembleLaplacian, DisconnectedPairsAreBlockDiagonal) {
  const auto sys = AssembleLaplacian(MakeFlow(4, {{0, 1, 1, 1}, {2, 3, 2, 0.5}}));
  EXPECT_EQ(sys.component_count, 2u);
  EXPECT_EQ(sys.component, (std::vector<std::size_t>{0, 0, 1, 1}));
  EXPECT_EQ(sys.At(0, 2), 0.0);
  EXPECT_EQ(sys.At(1, 3), 0.0);
  EXPECT_EQ(sys.At(2, 2), 0.5);
  EXPECT_EQ(sys.rhs[0] + sys.rhs[1], 0.0);
  EXPECT_EQ(sys.rhs[2] + sys.rhs[3], 0.0);
}

TEST(SolvePotentials, TwoNodes) {
  const auto pv = SolvePotentials(MakeFlow(2, {{0, 1, 1, 1}}));
  EXPECT_NEAR(pv.value[0], 0.5, 1e-14);
  EXPECT_NEAR(pv.value[1], -0.5, 1e-14);
}

TEST(SolvePotentials, BalancedCycleIsFlat) {
  const auto pv = SolvePotentials(ThreeCycle());
  for (double v : pv.value) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(SolvePotentials, FeedForwardTriangleMatchesOracle) {
  const auto flow = FeedForwardTriangle();
  const auto expected = oracle::PseudoinversePotentials(flow);
  EXPECT_NEAR(expected[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(expected[1], 0.0, 1e-12);
  EXPECT_NEAR(expected[2], -2.0 / 3.0, 1e-12);
  SolverOptions dense, iterative;
  iterative.dense_limit = 0;
  for (const auto& opt : {dense, iterative}) {
    const auto pv = SolvePotentials(flow, opt);
    EXPECT_NEAR(pv.value[0], 2.0 / 3.0, 1e-10);
    EXPECT_NEAR(pv.value[1], 0.0, 1e-10);
    EXPECT_NEAR(pv.value[2], -2.0 / 3.0, 1e-10);
  }
}

TEST(SolvePotentials, IsolatedNodesAndComponentsCentered) {
  const auto flow = MakeFlow(6, {{0, 1, 3, 1}, {2, 3, 1, 2}, {3, 4, 2, 1}});
  const auto pv = SolvePotentials(flow);
  EXPECT_EQ(pv.value[5], 0.0);
  EXPECT_NEAR(pv.value[0] + pv.value[1], 0.0, 1e-14);
  EXPECT_NEAR(pv.value[2] + pv.value[3] + pv.value[4], 0.0, 1e-14);
}

TEST(SolvePotentials, DenseAndIterativeAgreeWithPseudoinverse) {
  Rng rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.Below(90);
    const auto flow = RandomFlow(rng, n, 3.0 / static_cast<double>(n), trial % 3 != 0);
    const auto expected = oracle::PseudoinversePotentials(flow);
    SolverOptions dense, iterative;
    dense.dense_limit = 1000;
    iterative.dense_limit = 0;
    for (const auto& opt : {dense, iterative}) {
      const auto pv = SolvePotentials(flow, opt);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(pv.value[i], expected[i], 1e-8) << "n=" << n << " node " << i;
      }
    }
  }
}

TEST(SolvePotentials, NonConvergenceCarriesResidual) {
  SolverOptions opt;
  opt.dense_limit = 0;
  opt.iteration_factor = 0;
  try {
    SolvePotentials(FeedForwardTriangle(), opt);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
  opt = SolverOptions{};
  opt.tol = 0.0;
  EXPECT_THROW(SolvePotentials(FeedForwardTriangle(), opt), Error);
}

TEST(Decompose, FeedForwardTriangle) {
  const auto flow = FeedForwardTriangle();
  const auto d = Decompose(flow, SolvePotentials(flow));
  // Pairs are stored as (0,1), (0,2), (1,2): AB, AC, BC.
  EXPECT_NEAR(d.pairs[0].gradient, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.pairs[1].gradient, 4.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.pairs[2].gradient, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.pairs[0].circular, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.pairs[1].circular, -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(d.pairs[2].circular, 1.0 / 3.0, 1e-12);
  ASSERT_TRUE(d.ratios_defined);
  EXPECT_NEAR(d.gradient_ratio, 8.0 / 9.0, 1e-12);
  EXPECT_NEAR(d.loop_ratio, 1.0 / 9.0, 1e-12);
  const auto [g, l] = FlowRatios(d, flow);
  EXPECT_EQ(g, d.gradient_ratio);
  EXPECT_EQ(l, d.loop_ratio);
}

TEST(Decompose, CycleIsAllLoopAndPairIsAllGradient) {
  auto flow = ThreeCycle();
  auto d = Decompose(flow, SolvePotentials(flow));
  for (const auto& p : d.pairs) {
    EXPECT_NEAR(p.gradient, 0.0, 1e-14);
    EXPECT_NEAR(p.circular, p.flow, 1e-14);
  }
  EXPECT_NEAR(d.gradient_ratio, 0.0, 1e-12);
  EXPECT_NEAR(d.loop_ratio, 1.0, 1e-12);

  flow = MakeFlow(2, {{0, 1, 1, 1}});
  d = Decompose(flow, SolvePotentials(flow));
  EXPECT_NEAR(d.pairs[0].gradient, 1.0, 1e-14);
  EXPECT_NEAR(d.pairs[0].circular, 0.0, 1e-14);
}

TEST(Decompose, DirectedPathIsPureGradient) {
  const auto flow = MakeFlow(3, {{0, 1, 1, 1}, {1, 2, 1, 1}});
  const auto d = Decompose(flow, SolvePotentials(flow));
  EXPECT_NEAR(d.gradient_ratio, 1.0, 1e-10);
  EXPECT_LE(d.loop_ratio, 1e-10);
  const auto [g, l] = oracle::Ratios(flow, oracle::PseudoinversePotentials(flow));
  EXPECT_NEAR(g, 1.0, 1e-12);
  EXPECT_NEAR(l, 0.0, 1e-12);
}

TEST(Decompose, ErrorPaths) {
  const auto flow = FeedForwardTriangle();
  auto pv = SolvePotentials(MakeFlow(2, {{0, 1, 1, 1}}));
  EXPECT_THROW(Decompose(flow, pv), Error);
  const auto balanced = MakeFlow(2, {{0, 1, 0, 2}});
  const auto d = Decompose(balanced, SolvePotentials(balanced));
  EXPECT_FALSE(d.ratios_defined);
  EXPECT_THROW(FlowRatios(d, balanced), Error);
  EXPECT_THROW(FlowRatios(Decompose(flow, SolvePotentials(flow)), ThreeCycle()), Error);
}

TEST(DecomposeProperties, IdentitiesOnRandomNetworks) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.Below(199);
    const auto flow = RandomFlow(rng, n, 4.0 / static_cast<double>(n), trial % 2 == 0);
    const auto d = Decompose(flow, SolvePotentials(flow));
    if (!d.ratios_defined) continue;
    const auto flow_of = [](const DecomposedPair& p) { return p.flow; };
    const auto grad = [](const DecomposedPair& p) { return p.gradient; };
    const auto circ = [](const DecomposedPair& p) { return p.circular; };
    const double total = WeightedInner(d.pairs, flow_of, flow_of);
    EXPECT_LE(std::abs(WeightedInner(d.pairs, grad, circ)), 1e-8 * total);
    EXPECT_NEAR(d.gradient_ratio + d.loop_ratio, 1.0, 1e-10);
    for (const auto& p : d.pairs) {
      EXPECT_EQ(p.gradient + p.circular, p.flow);
      const double exact = p.weight * (d.potentials.value[p.i] - d.potentials.value[p.j]);
      EXPECT_LE(std::abs(p.gradient - exact),
                std::ldexp(std::max(std::abs(p.flow), std::abs(exact)), -51));
    }
    const auto sys = AssembleLaplacian(flow);
    double fmax = 0.0;
    for (double v : sys.rhs) fmax = std::max(fmax, std::abs(v));
    for (double v : CircularDivergence(d)) EXPECT_LE(std::abs(v), 1e-8 * fmax);
  }
}

TEST(DecomposeProperties, ScaleCovariance) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto flow = RandomFlow(rng, 20, 0.3, true);
    auto scaled = flow;
    for (auto& p : scaled.pairs) p.flow *= 2.5;
    const auto a = Decompose(flow, SolvePotentials(flow));
    const auto b = Decompose(scaled, SolvePotentials(scaled));
    if (!a.ratios_defined) continue;
    for (std::size_t i = 0; i < 20; ++i) {
      EXPECT_NEAR(b.potentials.value[i], 2.5 * a.potentials.value[i], 1e-9);
    }
    for (std::size_t k = 0; k < a.pairs.size(); ++k) {
      EXPECT_NEAR(b.pairs[k].gradient, 2.5 * a.pairs[k].gradient, 1e-9);
      EXPECT_NEAR(b.pairs[k].circular, 2.5 * a.pairs[k].circular, 1e-9);
    }
    EXPECT_NEAR(a.gradient_ratio, b.gradient_ratio, 1e-10);
    EXPECT_NEAR(a.loop_ratio, b.loop_ratio, 1e-10);
  }
}

TEST(DecomposeProperties, TreesAndCirculations) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.Below(100);
    // Random tree with nonzero flows.
    std::vector<std::tuple<std::size_t, std::size_t, double, double>> tree;
    for (std::size_t i = 1; i < n; ++i) {
      tree.emplace_back(i, rng.Below(i), 1.0 + static_cast<double>(rng.Below(3)),
                        1.0 - rng.Uniform());
    }
    const auto t = MakeFlow(n, tree);
    EXPECT_LE(Decompose(t, SolvePotentials(t)).loop_ratio, 1e-10);

    // Sum of random directed cycles, weights arbitrary: divergence-free.
    std::map<std::pair<std::size_t, std::size_t>, double> circulation;
    for (int c = 0; c < 4; ++c) {
      std::vector<std::size_t> nodes(n);
      for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
      rng.Shuffle(nodes);
      const std::size_t len = std::min<std::size_t>(n, 3 + rng.Below(5));
      if (len < 3) continue;
      for (std::size_t k = 0; k < len; ++k) {
        std::size_t a = nodes[k], b = nodes[(k + 1) % len];
        double f = 1.0;
        if (a > b) {
          std::swap(a, b);
          f = -1.0;
        }
        circulation[{a, b}] += f;
      }
    }
    std::vector<std::tuple<std::size_t, std::size_t, double, double>> loops;
    for (const auto& [key, f] : circulation) {
      loops.emplace_back(key.first, key.second, f, 1.0 - rng.Uniform());
    }
    const auto c = MakeFlow(n, loops);
    const auto d = Decompose(c, SolvePotentials(c));
    if (d.ratios_defined) {
      EXPECT_LE(d.gradient_ratio, 1e-10);
    }
  }
}

TEST(DecompositionFiles, RoundTripBitExact) {
  Rng rng(3);
  const auto flow = RandomFlow(rng, 15, 0.3, true);
  const auto d = Decompose(flow, SolvePotentials(flow));
  std::ostringstream nodes, pairs, summary;
  WriteNodeTable(d, nodes);
  WritePairTable(d, pairs);
  WriteSummary(d, summary);
  std::istringstream n_in(nodes.str()), p_in(pairs.str()), s_in(summary.str());
  const auto back = ReadDecomposition(n_in, p_in, s_in);
  EXPECT_EQ(back.potentials.value, d.potentials.value);
  EXPECT_EQ(back.potentials.component, d.potentials.component);
  EXPECT_EQ(back.gradient_ratio, d.gradient_ratio);
  EXPECT_EQ(back.loop_ratio, d.loop_ratio);
  ASSERT_EQ(back.pairs.size(), d.pairs.size());
  for (std::size_t k = 0; k < d.pairs.size(); ++k) {
    EXPECT_EQ(back.pairs[k].gradient, d.pairs[k].gradient);
    EXPECT_EQ(back.pairs[k].circular, d.pairs[k].circular);
  }
  EXPECT_EQ(nodes.str().substr(0, 24), "node,component,potential");
}

}  // namespace
}  // namespace hodgeflow
