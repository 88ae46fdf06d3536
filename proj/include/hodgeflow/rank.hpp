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

#ifndef HODGEFLOW_RANK_HPP_
#define HODGEFLOW_RANK_HPP_

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hodgeflow/common.hpp"
#include "hodgeflow/netbuild.hpp"

namespace hodgeflow {

struct RankVector {
  std::vector<std::string> nodes;
  std::vector<double> score;
  double damping = 0.85;
  std::size_t iterations_used = 0;
  double last_delta = 0.0;
};

inline constexpr std::size_t kPageRankIterationCap = 10000;

// Weighted PageRank by power iteration. Out-edges are weighted by A_ij over
// out-strength; a dangling node spreads its mass uniformly; teleport is
// uniform. Stops once the L1 change of one step is at most `tol`.
inline RankVector PageRank(const InfluenceNetwork& net, double damping = 0.85,
                           double tol = 1e-12) {
  const std::size_t n = net.size();
  if (n == 0) throw Error("pagerank: empty network");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw Error("pagerank: damping must lie strictly between 0 and 1");
  }
  if (!(tol > 0.0)) throw Error("pagerank: tolerance must be positive");

  std::vector<double> out_strength(n, 0.0);
  for (const auto& [key, count] : net.edges) {
    out_strength[key.first] += static_cast<double>(count);
  }
  struct Link {
    std::size_t from, to;
    double share;
  };
  std::vector<Link> links;
  links.reserve(net.edges.size());
  for (const auto& [key, count] : net.edges) {
    links.push_back({key.first, key.second,
                     static_cast<double>(count) / out_strength[key.first]});
  }

  RankVector out;
  out.nodes = net.nodes;
  out.damping = damping;
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, uniform), next(n);
  for (std::size_t it = 1; it <= kPageRankIterationCap; ++it) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (out_strength[i] == 0.0) dangling += x[i];
    }
    const double base = (1.0 - damping) * uniform + damping * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (const auto& l : links) next[l.to] += damping * l.share * x[l.from];
    // Renormalise so rounding never lets the total drift from 1.
    double sum = 0.0;
    for (double v : next) sum += v;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= sum;
      delta += std::abs(next[i] - x[i]);
    }
    x.swap(next);
    out.iterations_used = it;
    out.last_delta = delta;
    if (delta <= tol) {
      out.score = std::move(x);
      return out;
    }
  }
  throw Error("pagerank did not converge within " +
              std::to_string(kPageRankIterationCap) +
              " iterations; last L1 change " + FormatReal(out.last_delta));
}

inline void WriteRanks(const RankVector& r, std::ostream& out) {
  WriteCsvRow(out, {"node", "pagerank"});
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    WriteCsvRow(out, {r.nodes[i], FormatReal(r.score[i])});
  }
}

inline RankVector ReadRanks(std::istream& in) {
  SkipCommentHeader(in);
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.Next(fields) || fields != std::vector<std::string>{"node", "pagerank"}) {
    throw Error("pagerank table header must be 'node,pagerank'");
  }
  RankVector r;
  while (reader.Next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 2) {
      throw Error("pagerank line " + std::to_string(reader.line()) +
                  ": expected node,pagerank");
    }
    r.nodes.push_back(fields[0]);
    r.score.push_back(ParseReal(fields[1], "pagerank"));
  }
  return r;
}

}  // namespace hodgeflow

#endif  // HODGEFLOW_RANK_HPP_
