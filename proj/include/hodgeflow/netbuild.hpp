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

// Directed influence networks built from date precedence of shared entities,
// and their symmetrized flow form.

#ifndef HODGEFLOW_NETBUILD_HPP_
#define HODGEFLOW_NETBUILD_HPP_

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hodgeflow/common.hpp"
#include "hodgeflow/ingest.hpp"

namespace hodgeflow {

enum class NetworkLevel { kList, kInstitution };

inline std::string_view ToString(NetworkLevel level) {
  return level == NetworkLevel::kList ? "list" : "institution";
}

inline NetworkLevel ParseNetworkLevel(std::string_view name) {
  if (name == "list") return NetworkLevel::kList;
  if (name == "institution") return NetworkLevel::kInstitution;
  throw Error("unknown network level '" + std::string(name) + "'");
}

using EdgeKey = std::pair<std::size_t, std::size_t>;

// Directed graph with positive integer counts A_ij; nodes are kept sorted.
// Absent edges are zero and self-loops never appear.
struct InfluenceNetwork {
  NetworkLevel level = NetworkLevel::kInstitution;
  std::vector<std::string> nodes;
  std::map<EdgeKey, std::int64_t> edges;

  std::size_t size() const { return nodes.size(); }

  std::optional<std::size_t> IndexOf(std::string_view name) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
    if (it == nodes.end() || *it != name) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }

  std::int64_t Count(std::size_t i, std::size_t j) const {
    auto it = edges.find({i, j});
    return it == edges.end() ? 0 : it->second;
  }

  std::int64_t TotalCount() const {
    std::int64_t total = 0;
    for (const auto& [key, count] : edges) total += count;
    return total;
  }

  friend bool operator==(const InfluenceNetwork&, const InfluenceNetwork&) = default;
};

namespace internal {

struct Appearance {
  std::size_t node;
  Date date;
};

// Counts every ordered precedence pair within each group. Groups are split
// across threads by index; integer sums make the merge order irrelevant.
inline std::map<EdgeKey, std::int64_t> CountPrecedence(
    const std::vector<std::vector<Appearance>>& groups, unsigned threads) {
  auto work = [&](std::size_t first, std::size_t stride,
                  std::map<EdgeKey, std::int64_t>& out) {
    for (std::size_t g = first; g < groups.size(); g += stride) {
      const auto& group = groups[g];
      for (const auto& a : group) {
        for (const auto& b : group) {
          if (a.node != b.node && a.date < b.date) ++out[{a.node, b.node}];
        }
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1 || groups.size() < 2) {
    std::map<EdgeKey, std::int64_t> out;
    work(0, 1, out);
    return out;
  }
  std::vector<std::map<EdgeKey, std::int64_t>> partial(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back(work, t, threads, std::ref(partial[t]));
  }
  for (auto& th : pool) th.join();
  std::map<EdgeKey, std::int64_t> out;
  for (const auto& p : partial) {
    for (const auto& [key, count] : p) out[key] += count;
  }
  return out;
}

}  // namespace internal

// List-level network: for every entity and every ordered pair of lists
// (A, B) carrying it, A_AB += 1 when A's date is strictly earlier.
inline InfluenceNetwork BuildListNetwork(const EventSet& events,
                                         unsigned threads = 1) {
  InfluenceNetwork net;
  net.level = NetworkLevel::kList;
  net.nodes.assign(events.lists.begin(), events.lists.end());
  std::map<std::string, std::vector<internal::Appearance>> by_entity;
  for (const auto& e : events.events) {
    by_entity[e.entity_id].push_back({*net.IndexOf(e.list_id), e.date});
  }
  std::vector<std::vector<internal::Appearance>> groups;
  groups.reserve(by_entity.size());
  for (auto& [entity, group] : by_entity) groups.push_back(std::move(group));
  net.edges = internal::CountPrecedence(groups, threads);
  return net;
}

// Institution-level network over the selected lists (all when `lists` is
// empty). Each institution's date for an entity is its earliest inclusion on
// any selected list, so an entity adds at most 1 to an ordered pair.
inline InfluenceNetwork BuildInstitutionNetwork(
    const EventSet& events,
    const std::optional<std::set<std::string>>& lists = std::nullopt,
    unsigned threads = 1) {
  if (lists) {
    for (const auto& l : *lists) {
      if (!events.lists.count(l)) throw Error("unknown list_id '" + l + "' in filter");
    }
  }
  auto selected = [&](const std::string& list) {
    return !lists || lists->count(list) > 0;
  };
  InfluenceNetwork net;
  net.level = NetworkLevel::kInstitution;
  std::set<std::string> issuers;
  for (const auto& [list, issuer] : events.list_to_issuer) {
    if (selected(list)) issuers.insert(issuer);
  }
  net.nodes.assign(issuers.begin(), issuers.end());

  std::map<std::string, std::map<std::size_t, Date>> first_date;
  for (const auto& e : events.events) {
    if (!selected(e.list_id)) continue;
    const std::size_t node = *net.IndexOf(e.issuer);
    auto& dates = first_date[e.entity_id];
    auto it = dates.find(node);
    if (it == dates.end()) {
      dates.emplace(node, e.date);
    } else if (e.date < it->second) {
      it->second = e.date;
    }
  }
  std::vector<std::vector<internal::Appearance>> groups;
  groups.reserve(first_date.size());
  for (const auto& [entity, dates] : first_date) {
    auto& group = groups.emplace_back();
    for (const auto& [node, date] : dates) group.push_back({node, date});
  }
  net.edges = internal::CountPrecedence(groups, threads);
  return net;
}

inline std::map<std::string, std::string> ReadCategoryMap(std::istream& in) {
  SkipCommentHeader(in);
  CsvReader reader(in);
  std::vector<std::string> fields;
  std::map<std::string, std::string> out;
  bool first = true;
  while (reader.Next(fields)) {
    if (fields.size() == 1 && Trim(fields[0]).empty()) continue;
    if (fields.size() != 2) {
      throw Error("category map line " + std::to_string(reader.line()) +
                  ": expected 2 fields (list_id,label)");
    }
    const std::string list(Trim(fields[0]));
    const std::string label(Trim(fields[1]));
    if (first && list == "list_id" && label == "label") {
      first = false;
      continue;
    }
    first = false;
    if (list.empty() || label.empty()) {
      throw Error("category map line " + std::to_string(reader.line()) +
                  ": empty list_id or label");
    }
    auto [it, inserted] = out.emplace(list, label);
    if (!inserted && it->second != label) {
      throw Error("category map assigns list '" + list + "' to both '" +
                  it->second + "' and '" + label + "'");
    }
  }
  return out;
}

inline void WriteCategoryMap(const std::map<std::string, std::string>& map,
                             std::ostream& out) {
  WriteCsvRow(out, {"list_id", "label"});
  for (const auto& [list, label] : map) WriteCsvRow(out, {list, label});
}

inline std::set<std::string> FilterByCategory(
    const EventSet& events, const std::map<std::string, std::string>& category_map,
    std::string_view label) {
  std::set<std::string> out;
  for (const auto& [list, l] : category_map) {
    if (!events.lists.count(list)) {
      throw Error("category map names list '" + list + "' absent from the events");
    }
    if (l == label) out.insert(list);
  }
  if (out.empty()) {
    throw Error("category '" + std::string(label) + "' matches no lists");
  }
  return out;
}

enum class WeightMode { kMean, kUnit };

inline std::string_view ToString(WeightMode mode) {
  return mode == WeightMode::kMean ? "mean" : "unit";
}

inline WeightMode ParseWeightMode(std::string_view name) {
  if (name == "mean") return WeightMode::kMean;
  if (name == "unit") return WeightMode::kUnit;
  throw Error("unknown weight mode '" + std::string(name) + "'");
}

// One unordered pair, stored with i < j. `flow` is F_ij; F_ji = -F_ij.
struct FlowPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double flow = 0.0;
  double weight = 0.0;

  friend bool operator==(const FlowPair&, const FlowPair&) = default;
};

struct FlowNetwork {
  std::vector<std::string> nodes;
  std::vector<FlowPair> pairs;  // sorted by (i, j)
  WeightMode mode = WeightMode::kMean;

  std::size_t size() const { return nodes.size(); }

  friend bool operator==(const FlowNetwork&, const FlowNetwork&) = default;
};

// F_ij = A_ij - A_ji; w_ij = (A_ij + A_ji) / 2 in mean mode, 1 in unit mode.
// Balanced pairs (F_ij = 0) are kept since their weight still constrains the
// potentials.
inline FlowNetwork Symmetrize(const InfluenceNetwork& net, WeightMode mode) {
  FlowNetwork out;
  out.nodes = net.nodes;
  out.mode = mode;
  std::map<EdgeKey, std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& [key, count] : net.edges) {
    const auto [i, j] = key;
    if (i == j) throw Error("network has a self-loop on '" + net.nodes[i] + "'");
    if (i < j) {
      pairs[{i, j}].first += count;
    } else {
      pairs[{j, i}].second += count;
    }
  }
  out.pairs.reserve(pairs.size());
  for (const auto& [key, counts] : pairs) {
    const auto [forward, backward] = counts;
    const double weight = mode == WeightMode::kMean
                              ? static_cast<double>(forward + backward) / 2.0
                              : 1.0;
    out.pairs.push_back({key.first, key.second,
                         static_cast<double>(forward - backward), weight});
  }
  return out;
}

namespace internal {

inline void CheckName(const std::string& name) {
  if (name.empty() || name.front() == '#' ||
      name.find_first_of("\t\r\n") != std::string::npos) {
    throw Error("node name '" + name +
                "' cannot be written (empty, leading '#', or tab/newline)");
  }
}

// Shared reader for the sectioned tab-separated formats. `#<key>\t<value>`
// lines before the first section are metadata; other `#` lines are comments.
struct SectionedText {
  std::map<std::string, std::string> meta;
  std::map<std::string, std::vector<std::vector<std::string>>> sections;
  std::map<std::string, std::vector<std::size_t>> lines;
};

inline SectionedText ReadSectioned(std::istream& in,
                                   const std::set<std::string>& section_names) {
  SectionedText out;
  std::string text;
  std::string current;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (text.front() == '#') {
      auto fields = Split(std::string_view(text).substr(1), '\t');
      if (section_names.count(fields[0])) {
        current = fields[0];
        out.sections[current];
      } else if (current.empty() && fields.size() == 2) {
        out.meta[fields[0]] = fields[1];
      }
      continue;
    }
    if (current.empty()) {
      throw Error("line " + std::to_string(line) + ": data before any section header");
    }
    out.sections[current].push_back(Split(text, '\t'));
    out.lines[current].push_back(line);
  }
  return out;
}

inline std::vector<std::string> ReadManifest(const SectionedText& text) {
  std::vector<std::string> nodes;
  auto it = text.sections.find("nodes");
  if (it == text.sections.end()) throw Error("missing #nodes section");
  for (const auto& row : it->second) nodes.push_back(row[0]);
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw Error("duplicate node in manifest");
  }
  return nodes;
}

inline std::size_t NodeIndex(const std::vector<std::string>& nodes,
                             const std::string& name, std::size_t line) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
  if (it == nodes.end() || *it != name) {
    throw Error("line " + std::to_string(line) + ": node '" + name +
                "' is not in the manifest");
  }
  return static_cast<std::size_t>(it - nodes.begin());
}

}  // namespace internal

// Sparse text form:
//   #level<TAB>institution
//   #nodes
//   <name>                       one per node, sorted
//   #edges
//   <src><TAB><dst><TAB><count>  sorted by (src, dst)
// Readers ignore extra trailing columns, so attribute-annotated edge tables
// load as the same network.
inline void WriteNetwork(const InfluenceNetwork& net, std::ostream& out) {
  for (const auto& n : net.nodes) internal::CheckName(n);
  out << "#level\t" << ToString(net.level) << '\n';
  out << "#nodes\n";
  for (const auto& n : net.nodes) out << n << '\n';
  out << "#edges\n";
  for (const auto& [key, count] : net.edges) {
    out << net.nodes[key.first] << '\t' << net.nodes[key.second] << '\t' << count
        << '\n';
  }
}

inline InfluenceNetwork ReadNetwork(std::istream& in) {
  const auto text = internal::ReadSectioned(in, {"nodes", "edges"});
  InfluenceNetwork net;
  auto level = text.meta.find("level");
  net.level = level == text.meta.end() ? NetworkLevel::kInstitution
                                       : ParseNetworkLevel(level->second);
  net.nodes = internal::ReadManifest(text);
  auto edges = text.sections.find("edges");
  if (edges == text.sections.end()) return net;
  const auto& lines = text.lines.at("edges");
  for (std::size_t r = 0; r < edges->second.size(); ++r) {
    const auto& row = edges->second[r];
    if (row.size() < 3) {
      throw Error("line " + std::to_string(lines[r]) +
                  ": edge needs src, dst and count");
    }
    const std::size_t i = internal::NodeIndex(net.nodes, row[0], lines[r]);
    const std::size_t j = internal::NodeIndex(net.nodes, row[1], lines[r]);
    const std::int64_t count = ParseInteger(row[2], "edge count");
    if (i == j) throw Error("line " + std::to_string(lines[r]) + ": self-loop");
    if (count <= 0) {
      throw Error("line " + std::to_string(lines[r]) + ": edge count must be positive");
    }
    if (!net.edges.emplace(EdgeKey{i, j}, count).second) {
      throw Error("line " + std::to_string(lines[r]) + ": duplicate edge");
    }
  }
  return net;
}

// Flow form: `#mode`, `#nodes`, then `#pairs` rows `i<TAB>j<TAB>F<TAB>w`.
inline void WriteFlowNetwork(const FlowNetwork& flow, std::ostream& out) {
  for (const auto& n : flow.nodes) internal::CheckName(n);
  out << "#mode\t" << ToString(flow.mode) << '\n';
  out << "#nodes\n";
  for (const auto& n : flow.nodes) out << n << '\n';
  out << "#pairs\n";
  for (const auto& p : flow.pairs) {
    out << flow.nodes[p.i] << '\t' << flow.nodes[p.j] << '\t' << FormatReal(p.flow)
        << '\t' << FormatReal(p.weight) << '\n';
  }
}

inline FlowNetwork ReadFlowNetwork(std::istream& in) {
  const auto text = internal::ReadSectioned(in, {"nodes", "pairs"});
  FlowNetwork flow;
  auto mode = text.meta.find("mode");
  flow.mode = mode == text.meta.end() ? WeightMode::kMean : ParseWeightMode(mode->second);
  flow.nodes = internal::ReadManifest(text);
  auto pairs = text.sections.find("pairs");
  if (pairs == text.sections.end()) return flow;
  const auto& lines = text.lines.at("pairs");
  std::map<EdgeKey, FlowPair> sorted;
  for (std::size_t r = 0; r < pairs->second.size(); ++r) {
    const auto& row = pairs->second[r];
    const std::string where = "line " + std::to_string(lines[r]) + ": ";
    if (row.size() < 4) throw Error(where + "pair needs i, j, F and w");
    std::size_t i = internal::NodeIndex(flow.nodes, row[0], lines[r]);
    std::size_t j = internal::NodeIndex(flow.nodes, row[1], lines[r]);
    double f = ParseReal(row[2], "flow");
    const double w = ParseReal(row[3], "weight");
    if (i == j) throw Error(where + "pair joins a node to itself");
    if (!(w > 0.0)) throw Error(where + "weight must be positive");
    if (i > j) {
      std::swap(i, j);
      f = -f;
    }
    if (!sorted.emplace(EdgeKey{i, j}, FlowPair{i, j, f, w}).second) {
      throw Error(where + "duplicate pair");
    }
  }
  for (const auto& [key, p] : sorted) flow.pairs.push_back(p);
  return flow;
}

}  // namespace hodgeflow

#endif  // HODGEFLOW_NETBUILD_HPP_
