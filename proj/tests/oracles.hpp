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

// Independent reference computations for tests. Nothing here calls the
// library's solvers; the routes are dense linear algebra and enumeration.

#ifndef HODGEFLOW_TESTS_ORACLES_HPP_
#define HODGEFLOW_TESTS_ORACLES_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "hodgeflow/ingest.hpp"
#include "hodgeflow/netbuild.hpp"

namespace hodgeflow::oracle {

inline std::vector<std::size_t> Components(std::size_t n,
                                           const std::vector<FlowPair>& pairs) {
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : pairs) {
      const std::size_t m = std::min(label[p.i], label[p.j]);
      if (label[p.i] != m || label[p.j] != m) {
        label[p.i] = label[p.j] = m;
        changed = true;
      }
    }
  }
  return label;
}

// Minimum-norm least-squares potentials via the Moore-Penrose pseudoinverse
// of the dense Laplacian, then centred per component.
inline std::vector<double> PseudoinversePotentials(const FlowNetwork& flow) {
  const auto n = static_cast<Eigen::Index>(flow.size());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  for (const auto& p : flow.pairs) {
    const auto i = static_cast<Eigen::Index>(p.i), j = static_cast<Eigen::Index>(p.j);
    lap(i, i) += p.weight;
    lap(j, j) += p.weight;
    lap(i, j) -= p.weight;
    lap(j, i) -= p.weight;
    f(i) += p.flow;
    f(j) -= p.flow;
  }
  Eigen::MatrixXd pinv = lap.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::VectorXd phi = pinv * f;
  std::vector<double> out(phi.data(), phi.data() + n);
  const auto label = Components(flow.size(), flow.pairs);
  std::map<std::size_t, std::pair<double, double>> sums;
  for (std::size_t i = 0; i < out.size(); ++i) {
    sums[label[i]].first += out[i];
    sums[label[i]].second += 1.0;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] -= sums[label[i]].first / sums[label[i]].second;
  }
  return out;
}

// (gradient_ratio, loop_ratio) from potentials with the w-weighted norm.
inline std::pair<double, double> Ratios(const FlowNetwork& flow,
                                        const std::vector<double>& phi) {
  double total = 0.0, grad = 0.0, circ = 0.0;
  for (const auto& p : flow.pairs) {
    const double g = p.weight * (phi[p.i] - phi[p.j]);
    total += p.flow * p.flow / p.weight;
    grad += g * g / p.weight;
    circ += (p.flow - g) * (p.flow - g) / p.weight;
  }
  return {grad / total, circ / total};
}

// Direct double loop over every pair of events sharing an entity.
inline std::map<std::pair<std::string, std::string>, std::int64_t> BruteListEdges(
    const EventSet& events) {
  std::map<std::pair<std::string, std::string>, std::int64_t> out;
  for (const auto& a : events.events) {
    for (const auto& b : events.events) {
      if (a.entity_id == b.entity_id && a.list_id != b.list_id && a.date < b.date) {
        ++out[{a.list_id, b.list_id}];
      }
    }
  }
  return out;
}

inline std::map<std::pair<std::string, std::string>, std::int64_t> BruteInstitutionEdges(
    const EventSet& events) {
  std::map<std::pair<std::string, std::string>, Date> first;
  for (const auto& e : events.events) {
    auto key = std::make_pair(e.issuer, e.entity_id);
    auto it = first.find(key);
    if (it == first.end() || e.date < it->second) first[key] = e.date;
  }
  std::map<std::pair<std::string, std::string>, std::int64_t> out;
  for (const auto& [ka, da] : first) {
    for (const auto& [kb, db] : first) {
      if (ka.second == kb.second && ka.first != kb.first && da < db) {
        ++out[{ka.first, kb.first}];
      }
    }
  }
  return out;
}

// Stationary vector of the dense Google matrix by a direct linear solve.
inline std::vector<double> DensePageRank(const InfluenceNetwork& net, double damping) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd out_strength = Eigen::VectorXd::Zero(n);
  for (const auto& [key, count] : net.edges) {
    out_strength(static_cast<Eigen::Index>(key.first)) += static_cast<double>(count);
  }
  for (const auto& [key, count] : net.edges) {
    const auto i = static_cast<Eigen::Index>(key.first);
    s(static_cast<Eigen::Index>(key.second), i) = static_cast<double>(count) / out_strength(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out_strength(i) == 0.0) s.col(i).setConstant(1.0 / static_cast<double>(n));
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - damping * s;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(n, (1.0 - damping) / static_cast<double>(n));
  Eigen::VectorXd x = a.fullPivLu().solve(b);
  x /= x.sum();
  return std::vector<double>(x.data(), x.data() + n);
}

// Modularity by the textbook double sum over node pairs.
inline double Modularity(const InfluenceNetwork& net, const std::vector<std::size_t>& c,
                         double resolution) {
  const std::size_t n = net.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (const auto& [key, count] : net.edges) {
    w[key.first][key.second] += static_cast<double>(count);
    w[key.second][key.first] += static_cast<double>(count);
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += w[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (c[i] == c[j]) q += w[i][j] - resolution * k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

// Enumerates all set partitions (restricted growth strings).
inline void ForEachPartition(std::size_t n,
                             const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> c(n, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      f(c);
      return;
    }
    for (std::size_t v = 0; v <= used && v < n; ++v) {
      c[i] = v;
      rec(i + 1, std::max(used, v + 1));
    }
  };
  if (n == 0) return;
  c[0] = 0;
  rec(1, 1);
}

inline double BruteMaxModularity(const InfluenceNetwork& net, double resolution) {
  double best = -1e300;
  ForEachPartition(net.size(), [&](const std::vector<std::size_t>& c) {
    best = std::max(best, oracle::Modularity(net, c, resolution));
  });
  return best;
}

}  // namespace hodgeflow::oracle

#endif  // HODGEFLOW_TESTS_ORACLES_HPP_
