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

// Presentation outputs: potential-axis layouts, ranked potential tables,
// PageRank-vs-potential scatter data and graph documents.

#ifndef HODGEFLOW_REPORT_HPP_
#define HODGEFLOW_REPORT_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hodgeflow/common.hpp"
#include "hodgeflow/community.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/netbuild.hpp"
#include "hodgeflow/rank.hpp"
#include "json.hpp"

namespace hodgeflow {

struct LayoutOptions {
  std::uint64_t seed = 0;
  double jitter = 0.0;  // 0 keeps y exactly at the potential
  double min_separation = 0.05;
  double gravity = 0.05;
  std::size_t iterations = 300;
};

struct LayoutResult {
  std::vector<std::string> nodes;
  std::vector<double> x;
  std::vector<double> y;
  std::uint64_t seed = 0;
  double overlap_jitter = 0.0;
  std::vector<bool> jittered;
  std::vector<double> energy_trace;  // one entry per accepted descent step
};

namespace internal {

inline constexpr double kLayoutSoftening = 1e-6;

struct LayoutEnergy {
  std::vector<std::tuple<std::size_t, std::size_t, double>> springs;
  const std::vector<double>* y = nullptr;
  double gravity = 0.0;

  double Distance(double dx, double dy) const {
    return std::sqrt(dx * dx + dy * dy + kLayoutSoftening * kLayoutSoftening);
  }

  // LinLog: attraction linear in distance along edges, repulsion logarithmic
  // between all pairs, plus a weak pull toward x = 0 that keeps
  // disconnected parts bounded.
  double Value(const std::vector<double>& x) const {
    const auto& yy = *y;
    double e = 0.0;
    for (const auto& [i, j, w] : springs) e += w * Distance(x[i] - x[j], yy[i] - yy[j]);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        e -= std::log(Distance(x[i] - x[j], yy[i] - yy[j]));
      }
      e += gravity * Distance(x[i], 0.0);
    }
    return e;
  }

  std::vector<double> Gradient(const std::vector<double>& x) const {
    const auto& yy = *y;
    std::vector<double> g(x.size(), 0.0);
    for (const auto& [i, j, w] : springs) {
      const double dx = x[i] - x[j];
      const double t = w * dx / Distance(dx, yy[i] - yy[j]);
      g[i] += t;
      g[j] -= t;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        const double dx = x[i] - x[j];
        const double d = Distance(dx, yy[i] - yy[j]);
        const double t = dx / (d * d);
        g[i] -= t;
        g[j] += t;
      }
      g[i] += gravity * x[i] / Distance(x[i], 0.0);
    }
    return g;
  }
};

}  // namespace internal

// y is the potential; x is placed by seeded gradient descent on the LinLog
// energy of W = A + A^T with y held fixed. With jitter > 0, nodes closer than
// min_separation to another node get y offsets spread over
// [-jitter, +jitter].
inline LayoutResult Layout(const InfluenceNetwork& net, const PotentialVector& potentials,
                           const LayoutOptions& options = {}) {
  const std::size_t n = net.size();
  if (potentials.nodes != net.nodes || potentials.value.size() != n) {
    throw Error("layout: potentials do not cover the network's nodes");
  }
  LayoutResult out;
  out.nodes = net.nodes;
  out.seed = options.seed;
  out.overlap_jitter = options.jitter;
  out.y = potentials.value;
  out.x.assign(n, 0.0);
  out.jittered.assign(n, false);
  if (n >= 2) {
    std::map<EdgeKey, double> spring;
    for (const auto& [key, count] : net.edges) {
      spring[{std::min(key.first, key.second), std::max(key.first, key.second)}] +=
          static_cast<double>(count);
    }
    internal::LayoutEnergy energy;
    energy.y = &out.y;
    energy.gravity = options.gravity;
    for (const auto& [key, w] : spring) energy.springs.emplace_back(key.first, key.second, w);

    Rng rng(options.seed);
    for (double& v : out.x) v = 2.0 * rng.Uniform() - 1.0;
    double current = energy.Value(out.x);
    out.energy_trace.push_back(current);
    double step = 0.1;
    std::vector<double> trial(n);
    for (std::size_t it = 0; it < options.iterations; ++it) {
      const auto grad = energy.Gradient(out.x);
      bool accepted = false;
      for (int halving = 0; halving < 60; ++halving) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = out.x[i] - step * grad[i];
        const double value = energy.Value(trial);
        if (value <= current) {
          out.x.swap(trial);
          current = value;
          accepted = true;
          step *= 1.5;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      out.energy_trace.push_back(current);
    }
  }

  if (options.jitter > 0.0 && n >= 2) {
    const auto& phi = potentials.value;
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::hypot(out.x[i] - out.x[j], phi[i] - phi[j]) < options.min_separation) {
          parent[find(j)] = find(i);
          out.jittered[i] = out.jittered[j] = true;
        }
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.jittered[i]) clusters[find(i)].push_back(i);
    }
    for (const auto& [root, members] : clusters) {
      const double span = static_cast<double>(members.size() - 1);
      for (std::size_t k = 0; k < members.size(); ++k) {
        out.y[members[k]] =
            phi[members[k]] + options.jitter * (2.0 * static_cast<double>(k) / span - 1.0);
      }
    }
  }
  return out;
}

inline void WriteLayout(const LayoutResult& l, std::ostream& out) {
  out << "#seed\t" << l.seed << '\n' << "#jitter\t" << FormatReal(l.overlap_jitter) << '\n';
  WriteCsvRow(out, {"node", "x", "y"});
  for (std::size_t i = 0; i < l.nodes.size(); ++i) {
    WriteCsvRow(out, {l.nodes[i], FormatReal(l.x[i]), FormatReal(l.y[i])});
  }
}

inline LayoutResult ReadLayout(std::istream& in) {
  LayoutResult l;
  std::string text;
  while (in.peek() == '#') {
    std::getline(in, text);
    const auto fields = Split(std::string_view(text).substr(1), '\t');
    if (fields.size() != 2) continue;
    if (fields[0] == "seed") l.seed = static_cast<std::uint64_t>(ParseInteger(fields[1], "seed"));
    if (fields[0] == "jitter") l.overlap_jitter = ParseReal(fields[1], "jitter");
  }
  for (const auto& row : internal::ReadTable(in, {"node", "x", "y"})) {
    l.nodes.push_back(row[0]);
    l.x.push_back(ParseReal(row[1], "x"));
    l.y.push_back(ParseReal(row[2], "y"));
  }
  l.jittered.assign(l.nodes.size(), false);
  return l;
}

struct PotentialRow {
  std::size_t rank = 0;
  std::string node;
  std::string name;
  double potential = 0.0;
  bool highlighted = false;
};

// Rows by descending potential; ties by display name, then node id. Nodes
// missing from `names` display as their id.
inline std::vector<PotentialRow> PotentialTable(
    const HodgeDecomposition& decomp, const std::map<std::string, std::string>& names = {},
    const std::set<std::string>& highlight = {}) {
  const auto& pv = decomp.potentials;
  std::vector<PotentialRow> rows;
  for (std::size_t i = 0; i < pv.nodes.size(); ++i) {
    auto it = names.find(pv.nodes[i]);
    rows.push_back({0, pv.nodes[i], it == names.end() ? pv.nodes[i] : it->second,
                    pv.value[i], highlight.count(pv.nodes[i]) > 0});
  }
  std::sort(rows.begin(), rows.end(), [](const PotentialRow& a, const PotentialRow& b) {
    if (a.potential != b.potential) return a.potential > b.potential;
    return std::tie(a.name, a.node) < std::tie(b.name, b.node);
  });
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].rank = k + 1;
  return rows;
}

inline void WritePotentialRows(const std::vector<PotentialRow>& rows, std::ostream& out) {
  WriteCsvRow(out, {"rank", "node", "name", "potential", "highlight"});
  for (const auto& r : rows) {
    WriteCsvRow(out, {std::to_string(r.rank), r.node, r.name, FormatFixed(r.potential, 3),
                      r.highlighted ? "1" : "0"});
  }
}

// Node x category view; "-" where a node is absent from a category network.
struct PotentialMatrix {
  std::vector<std::string> categories;
  std::vector<std::string> rows;
  std::vector<std::vector<std::string>> cells;
};

inline PotentialMatrix BuildPotentialMatrix(
    const std::vector<std::pair<std::string, HodgeDecomposition>>& categories,
    std::vector<std::string> rows = {}) {
  PotentialMatrix m;
  if (rows.empty()) {
    std::set<std::string> all;
    for (const auto& [label, d] : categories) {
      all.insert(d.potentials.nodes.begin(), d.potentials.nodes.end());
    }
    rows.assign(all.begin(), all.end());
  }
  m.rows = rows;
  for (const auto& [label, d] : categories) m.categories.push_back(label);
  for (const auto& node : m.rows) {
    auto& line = m.cells.emplace_back();
    for (const auto& [label, d] : categories) {
      const auto& names = d.potentials.nodes;
      auto it = std::lower_bound(names.begin(), names.end(), node);
      line.push_back(it == names.end() || *it != node
                         ? "-"
                         : FormatFixed(d.potentials.value[it - names.begin()], 3));
    }
  }
  return m;
}

inline void WritePotentialMatrix(const PotentialMatrix& m, std::ostream& out) {
  std::vector<std::string> header = {"node"};
  header.insert(header.end(), m.categories.begin(), m.categories.end());
  WriteCsvRow(out, header);
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    std::vector<std::string> row = {m.rows[r]};
    row.insert(row.end(), m.cells[r].begin(), m.cells[r].end());
    WriteCsvRow(out, row);
  }
}

struct ScatterTable {
  std::vector<std::string> nodes;
  std::vector<double> pagerank;
  std::vector<double> potential;
  double correlation = 0.0;
  bool constant_column = false;  // correlation undefined, reported as 0
};

inline double PearsonCorrelation(const std::vector<double>& a, const std::vector<double>& b,
                                 bool* constant = nullptr) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  const bool flat = n < 2 || saa <= 1e-30 * std::max(1.0, ma * ma) * static_cast<double>(n) ||
                    sbb <= 1e-30 * std::max(1.0, mb * mb) * static_cast<double>(n);
  if (constant) *constant = flat;
  return flat ? 0.0 : sab / std::sqrt(saa * sbb);
}

inline ScatterTable ScatterData(const RankVector& rank, const PotentialVector& potentials) {
  if (rank.nodes != potentials.nodes) {
    throw Error("scatter: pagerank and potentials cover different node sets");
  }
  ScatterTable t;
  t.nodes = rank.nodes;
  t.pagerank = rank.score;
  t.potential = potentials.value;
  t.correlation = PearsonCorrelation(t.pagerank, t.potential, &t.constant_column);
  return t;
}

inline void WriteScatter(const ScatterTable& t, std::ostream& out) {
  out << "#pearson\t" << FormatReal(t.correlation) << '\n'
      << "#constant_column\t" << (t.constant_column ? "true" : "false") << '\n';
  WriteCsvRow(out, {"node", "pagerank", "potential"});
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    WriteCsvRow(out, {t.nodes[i], FormatReal(t.pagerank[i]), FormatReal(t.potential[i])});
  }
}

enum class GraphFormat { kEdgeTable, kDot, kJsonGraph };

inline GraphFormat ParseGraphFormat(std::string_view name) {
  if (name == "edge_table") return GraphFormat::kEdgeTable;
  if (name == "dot") return GraphFormat::kDot;
  if (name == "json_graph") return GraphFormat::kJsonGraph;
  throw Error("unknown graph format '" + std::string(name) + "'");
}

namespace internal {

inline constexpr std::string_view kPalette[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string DotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct PairLookup {
  std::map<EdgeKey, const DecomposedPair*> index;

  explicit PairLookup(const HodgeDecomposition* d) {
    if (!d) return;
    for (const auto& p : d->pairs) index[{p.i, p.j}] = &p;
  }

  // Pair attributes oriented from i to j: F, w, F_grad, F_circ.
  std::optional<std::array<double, 4>> Oriented(std::size_t i, std::size_t j) const {
    auto it = index.find({std::min(i, j), std::max(i, j)});
    if (it == index.end()) return std::nullopt;
    const double sign = i < j ? 1.0 : -1.0;
    const auto& p = *it->second;
    return std::array<double, 4>{sign * p.flow, p.weight, sign * p.gradient,
                                 sign * p.circular};
  }

  std::array<double, 4> Require(const InfluenceNetwork& net, const EdgeKey& key) const {
    const auto found = Oriented(key.first, key.second);
    if (!found) {
      throw Error("export: edge " + net.nodes[key.first] + " -> " + net.nodes[key.second] +
                  " has no decomposed pair");
    }
    return *found;
  }
};

}  // namespace internal

// Emits the network with whatever node attributes (potential, community, x,
// y) and pair attributes (F, w, F_grad, F_circ, oriented along the edge) are
// supplied. Field order is fixed: node attributes in the order listed, then
// edge count A followed by the pair attributes.
inline std::string ExportGraph(const InfluenceNetwork& net,
                               const HodgeDecomposition* decomp,
                               const CommunityPartition* partition,
                               const LayoutResult* layout, GraphFormat format) {
  const std::size_t n = net.size();
  if (decomp && decomp->potentials.nodes != net.nodes) {
    throw Error("export: decomposition does not cover the network's nodes");
  }
  if (partition && partition->assignment.size() != n) {
    throw Error("export: partition does not cover the network's nodes");
  }
  if (layout && layout->nodes != net.nodes) {
    throw Error("export: layout does not cover the network's nodes");
  }
  const internal::PairLookup pairs(decomp);
  const std::array<const char*, 4> pair_names = {"F", "w", "F_grad", "F_circ"};
  std::ostringstream out;

  switch (format) {
    case GraphFormat::kEdgeTable: {
      for (const auto& name : net.nodes) internal::CheckName(name);
      out << "#level\t" << ToString(net.level) << '\n' << "#nodes";
      if (decomp) out << "\tpotential";
      if (partition) out << "\tcommunity";
      if (layout) out << "\tx\ty";
      out << '\n';
      for (std::size_t i = 0; i < n; ++i) {
        out << net.nodes[i];
        if (decomp) out << '\t' << FormatReal(decomp->potentials.value[i]);
        if (partition) out << '\t' << partition->assignment[i];
        if (layout) out << '\t' << FormatReal(layout->x[i]) << '\t' << FormatReal(layout->y[i]);
        out << '\n';
      }
      out << "#edges";
      if (decomp) {
        for (const char* name : pair_names) out << '\t' << name;
      }
      out << '\n';
      for (const auto& [key, count] : net.edges) {
        out << net.nodes[key.first] << '\t' << net.nodes[key.second] << '\t' << count;
        if (decomp) {
          for (double v : pairs.Require(net, key)) out << '\t' << FormatReal(v);
        }
        out << '\n';
      }
      break;
    }
    case GraphFormat::kDot: {
      out << "digraph influence {\n";
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> attrs;
        if (decomp) attrs.push_back("potential=" + FormatReal(decomp->potentials.value[i]));
        if (partition) {
          const std::size_t c = partition->assignment[i];
          attrs.push_back("community=" + std::to_string(c));
          attrs.push_back("style=filled");
          attrs.push_back("fillcolor=\"" +
                          std::string(internal::kPalette[c % std::size(internal::kPalette)]) +
                          "\"");
        }
        if (layout) {
          attrs.push_back("pos=\"" + FormatReal(layout->x[i]) + "," +
                          FormatReal(layout->y[i]) + "!\"");
        }
        out << "  " << internal::DotQuote(net.nodes[i]);
        if (!attrs.empty()) {
          out << " [";
          for (std::size_t k = 0; k < attrs.size(); ++k) out << (k ? ", " : "") << attrs[k];
          out << ']';
        }
        out << ";\n";
      }
      for (const auto& [key, count] : net.edges) {
        out << "  " << internal::DotQuote(net.nodes[key.first]) << " -> "
            << internal::DotQuote(net.nodes[key.second]) << " [weight=" << count;
        if (decomp) {
          const auto values = pairs.Require(net, key);
          for (std::size_t k = 0; k < 4; ++k) {
            out << ", " << pair_names[k] << '=' << FormatReal(values[k]);
          }
        }
        out << "];\n";
      }
      out << "}\n";
      break;
    }
    case GraphFormat::kJsonGraph: {
      nlohmann::ordered_json doc;
      doc["directed"] = true;
      doc["level"] = std::string(ToString(net.level));
      auto nodes = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < n; ++i) {
        nlohmann::ordered_json node;
        node["id"] = net.nodes[i];
        if (decomp) node["potential"] = decomp->potentials.value[i];
        if (partition) node["community"] = partition->assignment[i];
        if (layout) {
          node["x"] = layout->x[i];
          node["y"] = layout->y[i];
        }
        nodes.push_back(std::move(node));
      }
      auto links = nlohmann::ordered_json::array();
      for (const auto& [key, count] : net.edges) {
        nlohmann::ordered_json link;
        link["source"] = net.nodes[key.first];
        link["target"] = net.nodes[key.second];
        link["weight"] = count;
        if (decomp) {
          const auto values = pairs.Require(net, key);
          for (std::size_t k = 0; k < 4; ++k) link[pair_names[k]] = values[k];
        }
        links.push_back(std::move(link));
      }
      doc["nodes"] = std::move(nodes);
      doc["links"] = std::move(links);
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace hodgeflow

#endif  // HODGEFLOW_REPORT_HPP_
