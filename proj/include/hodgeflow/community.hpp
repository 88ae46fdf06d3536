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

// Modularity and Louvain community detection on the symmetrised network
// W = A + A^T.

#ifndef HODGEFLOW_COMMUNITY_HPP_
#define HODGEFLOW_COMMUNITY_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "hodgeflow/common.hpp"
#include "hodgeflow/netbuild.hpp"

namespace hodgeflow {

struct CommunityPartition {
  std::vector<std::size_t> assignment;  // ids contiguous from 0
  std::size_t community_count = 0;
  double modularity = 0.0;
  double resolution = 1.0;
  std::uint64_t seed = 0;
  // Modularity after each local-move sweep, across all aggregation levels.
  std::vector<double> pass_modularity;
};

namespace internal {

// Symmetric weighted graph; adjacency entries include self-loops, stored as
// A_ii in the convention sum_ij A_ij = 2m.
struct UndirectedGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;
  std::vector<double> strength;
  double total = 0.0;  // 2m

  std::size_t size() const { return adjacency.size(); }
};

inline UndirectedGraph Symmetrised(const InfluenceNetwork& net) {
  const std::size_t n = net.size();
  std::vector<std::map<std::size_t, double>> rows(n);
  for (const auto& [key, count] : net.edges) {
    rows[key.first][key.second] += static_cast<double>(count);
    rows[key.second][key.first] += static_cast<double>(count);
  }
  UndirectedGraph g;
  g.adjacency.resize(n);
  g.strength.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, w] : rows[i]) {
      g.adjacency[i].emplace_back(j, w);
      g.strength[i] += w;
    }
    g.total += g.strength[i];
  }
  return g;
}

inline double GraphModularity(const UndirectedGraph& g,
                              const std::vector<std::size_t>& community,
                              double resolution) {
  std::size_t count = 0;
  for (std::size_t c : community) count = std::max(count, c + 1);
  std::vector<double> internal(count, 0.0), degree(count, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    degree[community[i]] += g.strength[i];
    for (const auto& [j, w] : g.adjacency[i]) {
      if (community[j] == community[i]) internal[community[i]] += w;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < count; ++c) {
    const double share = degree[c] / g.total;
    q += internal[c] / g.total - resolution * share * share;
  }
  return q;
}

// Ids renumbered by first appearance in node order.
inline std::size_t Renumber(std::vector<std::size_t>& community) {
  std::map<std::size_t, std::size_t> ids;
  for (auto& c : community) {
    auto [it, inserted] = ids.emplace(c, ids.size());
    c = it->second;
  }
  return ids.size();
}

}  // namespace internal

// Newman modularity with resolution:
//   Q = (1/2m) sum_ij [W_ij - resolution k_i k_j / 2m] delta(c_i, c_j).
inline double Modularity(const InfluenceNetwork& net,
                         const std::vector<std::size_t>& assignment,
                         double resolution = 1.0) {
  if (assignment.size() != net.size()) {
    throw Error("assignment must cover every node");
  }
  if (!(resolution > 0.0)) throw Error("resolution must be positive");
  const auto g = internal::Symmetrised(net);
  if (!(g.total > 0.0)) throw Error("modularity undefined: network has zero total weight");
  return internal::GraphModularity(g, assignment, resolution);
}

// Largest network that gets the vertex-moving fine-tuning sweeps.
inline constexpr std::size_t kFineTuneLimit = 2000;

namespace internal {

// Local moving phase: visits nodes in `order` until no move strictly gains,
// starting from `community` (ids below g.size()). A node may also leave for
// an empty community. Calls `on_pass` after every sweep that moved a node.
template <class OnPass>
bool MoveNodes(const UndirectedGraph& g, std::vector<std::size_t>& community,
               const std::vector<std::size_t>& order, double resolution, double two_m,
               OnPass on_pass) {
  const std::size_t n = g.size();
  const double epsilon = 1e-12 * two_m;
  std::vector<double> total(n, 0.0);
  std::vector<std::size_t> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    total[community[i]] += g.strength[i];
    ++size[community[i]];
  }
  std::vector<std::size_t> empty;
  for (std::size_t c = n; c-- > 0;) {
    if (size[c] == 0) empty.push_back(c);
  }
  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  bool moved_any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i : order) {
      const std::size_t own = community[i];
      const double k = g.strength[i];
      touched.clear();
      for (const auto& [j, w] : g.adjacency[i]) {
        if (j == i) continue;
        const std::size_t c = community[j];
        if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) {
          touched.push_back(c);
        }
        link[c] += w;
      }
      total[own] -= k;
      auto gain = [&](std::size_t c) { return link[c] - resolution * total[c] * k / two_m; };
      std::size_t best = own;
      double best_gain = gain(own);
      for (std::size_t c : touched) {
        const double value = gain(c);
        if (value > best_gain + epsilon) {
          best = c;
          best_gain = value;
        }
      }
      // A community of its own gains exactly zero.
      if (size[own] > 1 && best_gain < -epsilon && !empty.empty()) {
        best = empty.back();
        best_gain = 0.0;
      }
      total[best] += k;
      if (best != own) {
        if (best == (empty.empty() ? n : empty.back())) empty.pop_back();
        --size[own];
        ++size[best];
        if (size[own] == 0) empty.push_back(own);
        community[i] = best;
        moved = true;
        moved_any = true;
      }
      for (std::size_t c : touched) link[c] = 0.0;
      link[own] = 0.0;
    }
    if (moved) on_pass(community);
  }
  return moved_any;
}

inline UndirectedGraph Aggregate(const UndirectedGraph& g,
                                 const std::vector<std::size_t>& community, std::size_t count) {
  std::vector<std::map<std::size_t, double>> rows(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& [j, w] : g.adjacency[i]) rows[community[i]][community[j]] += w;
  }
  UndirectedGraph next;
  next.adjacency.resize(count);
  next.strength.assign(count, 0.0);
  for (std::size_t c = 0; c < count; ++c) {
    for (const auto& [d, w] : rows[c]) {
      next.adjacency[c].emplace_back(d, w);
      next.strength[c] += w;
    }
    next.total += next.strength[c];
  }
  return next;
}

// Vertex-moving fine tuning: each sweep moves every node once, always taking
// the best available move even when it lowers modularity, then keeps the
// best prefix of the sweep. Returns true when the partition improved.
inline bool KernighanLinSweep(const UndirectedGraph& g, std::vector<std::size_t>& community,
                              double resolution) {
  const std::size_t n = g.size();
  const double two_m = g.total;
  const double epsilon = 1e-12 * two_m;
  std::vector<double> total(n, 0.0);
  std::vector<std::size_t> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    total[community[i]] += g.strength[i];
    ++size[community[i]];
  }
  std::vector<bool> locked(n, false);
  std::vector<std::pair<std::size_t, std::size_t>> moves;  // node, previous community
  std::vector<double> link(n, 0.0);
  double running = 0.0, best_total = 0.0;
  std::size_t best_prefix = 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = n, target = n;
    double pick_gain = -std::numeric_limits<double>::infinity();
    std::size_t empty = n;
    for (std::size_t c = 0; c < n && empty == n; ++c) {
      if (size[c] == 0) empty = c;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (locked[i]) continue;
      const std::size_t own = community[i];
      const double k = g.strength[i];
      for (const auto& [j, w] : g.adjacency[i]) {
        if (j != i) link[community[j]] += w;
      }
      const double stay = link[own] - resolution * (total[own] - k) * k / two_m;
      auto consider = [&](std::size_t c, double value) {
        if (value - stay > pick_gain + epsilon) {
          pick_gain = value - stay;
          pick = i;
          target = c;
        }
      };
      for (const auto& [j, w] : g.adjacency[i]) {
        const std::size_t c = community[j];
        if (j != i && c != own) consider(c, link[c] - resolution * total[c] * k / two_m);
      }
      if (size[own] > 1 && empty != n) consider(empty, 0.0);
      for (const auto& [j, w] : g.adjacency[i]) link[community[j]] = 0.0;
    }
    if (pick == n) break;
    const double k = g.strength[pick];
    moves.emplace_back(pick, community[pick]);
    total[community[pick]] -= k;
    --size[community[pick]];
    community[pick] = target;
    total[target] += k;
    ++size[target];
    locked[pick] = true;
    running += pick_gain;
    if (running > best_total + epsilon) {
      best_total = running;
      best_prefix = moves.size();
    }
  }
  for (std::size_t m = moves.size(); m-- > best_prefix;) {
    community[moves[m].first] = moves[m].second;
  }
  return best_prefix > 0;
}

}  // namespace internal

// Louvain with multilevel refinement: after the coarsening passes stop, the
// partition is projected back through every level and local moving resumes
// there, so nodes trapped by an early merge can still leave.
inline CommunityPartition Louvain(const InfluenceNetwork& net, double resolution = 1.0,
                                  std::uint64_t seed = 0) {
  if (net.size() == 0) throw Error("louvain: empty network");
  if (!(resolution > 0.0)) throw Error("resolution must be positive");
  const auto original = internal::Symmetrised(net);
  if (!(original.total > 0.0)) {
    throw Error("louvain: network has zero total weight");
  }
  Rng rng(seed);
  CommunityPartition result;
  result.resolution = resolution;
  result.seed = seed;
  const double two_m = original.total;

  // levels[l] is the graph at level l; up[l] maps its nodes onto level l + 1.
  std::vector<internal::UndirectedGraph> levels = {original};
  std::vector<std::vector<std::size_t>> up;
  std::vector<std::vector<std::size_t>> orders;

  // Original node -> node at the level being worked on.
  auto lift = [&](std::size_t level, const std::vector<std::size_t>& community) {
    std::vector<std::size_t> out(net.size());
    for (std::size_t v = 0; v < net.size(); ++v) {
      std::size_t x = v;
      for (std::size_t l = 0; l < level; ++l) x = up[l][x];
      out[v] = community[x];
    }
    return out;
  };
  auto record = [&](std::size_t level) {
    return [&, level](const std::vector<std::size_t>& community) {
      auto lifted = lift(level, community);
      internal::Renumber(lifted);
      result.pass_modularity.push_back(internal::GraphModularity(original, lifted, resolution));
    };
  };

  while (true) {
    const auto& g = levels.back();
    const std::size_t level = levels.size() - 1;
    std::vector<std::size_t> community(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) community[i] = i;
    std::vector<std::size_t> order(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) order[i] = i;
    rng.Shuffle(order);
    orders.push_back(order);
    if (!internal::MoveNodes(g, community, order, resolution, two_m, record(level))) break;
    const std::size_t count = internal::Renumber(community);
    up.push_back(community);
    levels.push_back(internal::Aggregate(g, community, count));
  }

  // Refinement from the level below the coarsest down to the original nodes.
  std::vector<std::size_t> top(levels.back().size());
  for (std::size_t i = 0; i < top.size(); ++i) top[i] = i;
  for (std::size_t l = up.size(); l-- > 0;) {
    std::vector<std::size_t> community(levels[l].size());
    for (std::size_t i = 0; i < community.size(); ++i) community[i] = top[up[l][i]];
    internal::MoveNodes(levels[l], community, orders[l], resolution, two_m, record(l));
    top = std::move(community);
  }

  // Fine tuning on the original nodes, then re-coarsening from the tuned
  // partition, until neither finds a gain. Each sweep is quadratic in the
  // node count, so large graphs keep the plain refined result.
  while (net.size() <= kFineTuneLimit &&
         internal::KernighanLinSweep(original, top, resolution)) {
    record(0)(top);
    internal::Renumber(top);
    const std::size_t count = *std::max_element(top.begin(), top.end()) + 1;
    auto coarse = internal::Aggregate(original, top, count);
    std::vector<std::size_t> merged(count);
    for (std::size_t c = 0; c < count; ++c) merged[c] = c;
    std::vector<std::size_t> order(count);
    for (std::size_t c = 0; c < count; ++c) order[c] = c;
    rng.Shuffle(order);
    if (internal::MoveNodes(coarse, merged, order, resolution, two_m, [](const auto&) {})) {
      for (auto& c : top) c = merged[c];
      record(0)(top);
    }
  }

  result.assignment = top;
  result.community_count = internal::Renumber(result.assignment);
  result.modularity = Modularity(net, result.assignment, resolution);
  if (result.pass_modularity.empty()) result.pass_modularity.push_back(result.modularity);
  return result;
}

// Runs `restarts` consecutive seeds starting at `seed`; keeps the highest
// modularity, earliest seed on ties.
inline CommunityPartition LouvainBest(const InfluenceNetwork& net, double resolution,
                                      std::uint64_t seed, std::size_t restarts) {
  CommunityPartition best = Louvain(net, resolution, seed);
  for (std::size_t r = 1; r < restarts; ++r) {
    auto candidate = Louvain(net, resolution, seed + r);
    if (candidate.modularity > best.modularity) best = std::move(candidate);
  }
  return best;
}

// `#modularity`, `#resolution`, `#seed` metadata lines, then `node,community`.
inline void WritePartition(const InfluenceNetwork& net, const CommunityPartition& p,
                           std::ostream& out) {
  out << "#modularity\t" << FormatReal(p.modularity) << '\n'
      << "#resolution\t" << FormatReal(p.resolution) << '\n'
      << "#seed\t" << p.seed << '\n'
      << "#communities\t" << p.community_count << '\n';
  WriteCsvRow(out, {"node", "community"});
  for (std::size_t i = 0; i < net.size(); ++i) {
    WriteCsvRow(out, {net.nodes[i], std::to_string(p.assignment[i])});
  }
}

// Reads a partition aligned to `net`'s node order.
inline CommunityPartition ReadPartition(const InfluenceNetwork& net, std::istream& in) {
  CommunityPartition p;
  std::string text;
  while (in.peek() == '#') {
    std::getline(in, text);
    const auto fields = Split(std::string_view(text).substr(1), '\t');
    if (fields.size() != 2) continue;
    if (fields[0] == "modularity") p.modularity = ParseReal(fields[1], "modularity");
    if (fields[0] == "resolution") p.resolution = ParseReal(fields[1], "resolution");
    if (fields[0] == "seed") {
      p.seed = static_cast<std::uint64_t>(ParseInteger(fields[1], "seed"));
    }
  }
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.Next(fields) || fields != std::vector<std::string>{"node", "community"}) {
    throw Error("partition header must be 'node,community'");
  }
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  p.assignment.assign(net.size(), kUnset);
  while (reader.Next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2) {
      throw Error("partition line " + std::to_string(reader.line()) +
                  ": expected node,community");
    }
    const auto idx = net.IndexOf(fields[0]);
    if (!idx) throw Error("partition names unknown node '" + fields[0] + "'");
    p.assignment[*idx] = static_cast<std::size_t>(ParseInteger(fields[1], "community"));
  }
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (p.assignment[i] == kUnset) {
      throw Error("partition does not cover node '" + net.nodes[i] + "'");
    }
    p.community_count = std::max(p.community_count, p.assignment[i] + 1);
  }
  return p;
}

}  // namespace hodgeflow

#endif  // HODGEFLOW_COMMUNITY_HPP_
