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

// Sanctions-list event records: parsing, canonical serialization, validation
// and a seeded generator with a planted issuer hierarchy.

#ifndef HODGEFLOW_INGEST_HPP_
#define HODGEFLOW_INGEST_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hodgeflow/common.hpp"
#include "json.hpp"

namespace hodgeflow {

// One "issuer adds entity to list on date" record.
struct SanctionEvent {
  std::string issuer;
  std::string list_id;
  std::string entity_id;
  Date date;
  std::string category;  // empty when absent

  friend bool operator==(const SanctionEvent&, const SanctionEvent&) = default;
};

// Deduplicated events, one per (list_id, entity_id), sorted by
// (date, issuer, list_id, entity_id).
struct EventSet {
  std::vector<SanctionEvent> events;
  std::set<std::string> issuers;
  std::set<std::string> lists;
  std::map<std::string, std::string> list_to_issuer;

  std::set<std::string> Entities() const {
    std::set<std::string> out;
    for (const auto& e : events) out.insert(e.entity_id);
    return out;
  }

  friend bool operator==(const EventSet&, const EventSet&) = default;
};

enum class EventFormat { kDelimited, kLineRecord };

namespace internal {

struct RawEvent {
  SanctionEvent event;
  std::size_t line = 0;
};

inline bool EventOrder(const SanctionEvent& a, const SanctionEvent& b) {
  return std::tie(a.date, a.issuer, a.list_id, a.entity_id) <
         std::tie(b.date, b.issuer, b.list_id, b.entity_id);
}

inline std::string RequireField(std::string_view value, std::string_view name,
                                std::size_t line) {
  const std::string_view trimmed = Trim(value);
  if (trimmed.empty()) {
    throw Error("line " + std::to_string(line) + ": field '" +
                std::string(name) + "' is empty");
  }
  return std::string(trimmed);
}

inline Date ParseDateField(std::string_view value, std::size_t line) {
  try {
    return Date::Parse(Trim(value));
  } catch (const Error& e) {
    throw Error("line " + std::to_string(line) + ": field 'date': " + e.what());
  }
}

}  // namespace internal

// Builds an EventSet from raw records: enforces one issuer per list and keeps
// the earliest-dated event for each (list_id, entity_id). Same-date duplicates
// keep the lexicographically smallest category so the result does not depend
// on input order.
inline EventSet MakeEventSet(std::vector<SanctionEvent> records) {
  EventSet out;
  std::map<std::string, std::string> owner;
  for (const auto& r : records) {
    auto [it, inserted] = owner.emplace(r.list_id, r.issuer);
    if (!inserted && it->second != r.issuer) {
      const auto& [a, b] = std::minmax(it->second, r.issuer);
      throw Error("list '" + r.list_id + "' appears under two issuers: '" + a +
                  "' and '" + b + "'");
    }
  }
  std::map<std::pair<std::string, std::string>, SanctionEvent> first;
  for (auto& r : records) {
    auto key = std::make_pair(r.list_id, r.entity_id);
    auto it = first.find(key);
    if (it == first.end()) {
      first.emplace(std::move(key), std::move(r));
    } else if (r.date < it->second.date ||
               (r.date == it->second.date && r.category < it->second.category)) {
      it->second = std::move(r);
    }
  }
  out.events.reserve(first.size());
  for (auto& [key, ev] : first) out.events.push_back(std::move(ev));
  std::sort(out.events.begin(), out.events.end(), internal::EventOrder);
  for (const auto& e : out.events) {
    out.issuers.insert(e.issuer);
    out.lists.insert(e.list_id);
    out.list_to_issuer.emplace(e.list_id, e.issuer);
  }
  return out;
}

namespace internal {

inline std::vector<SanctionEvent> ReadDelimited(std::istream& in) {
  SkipCommentHeader(in);
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.Next(fields)) return {};
  const std::vector<std::string> known = {"issuer", "list_id", "entity_id",
                                          "date", "category"};
  std::map<std::string, std::size_t> column;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const std::string name(Trim(fields[k]));
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw Error("line " + std::to_string(reader.line()) +
                  ": unknown column '" + name + "' in header");
    }
    if (!column.emplace(name, k).second) {
      throw Error("line " + std::to_string(reader.line()) +
                  ": duplicate column '" + name + "' in header");
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (!column.count(known[k])) {
      throw Error("line " + std::to_string(reader.line()) +
                  ": header is missing column '" + known[k] + "'");
    }
  }
  const bool has_category = column.count("category") > 0;
  const std::size_t width = fields.size();

  std::vector<SanctionEvent> records;
  while (reader.Next(fields)) {
    const std::size_t line = reader.line();
    if (fields.size() == 1 && Trim(fields[0]).empty()) continue;
    if (fields.size() != width) {
      throw Error("line " + std::to_string(line) + ": expected " +
                  std::to_string(width) + " fields, found " +
                  std::to_string(fields.size()));
    }
    SanctionEvent ev;
    ev.issuer = RequireField(fields[column["issuer"]], "issuer", line);
    ev.list_id = RequireField(fields[column["list_id"]], "list_id", line);
    ev.entity_id = RequireField(fields[column["entity_id"]], "entity_id", line);
    ev.date = ParseDateField(fields[column["date"]], line);
    if (has_category) ev.category = std::string(Trim(fields[column["category"]]));
    records.push_back(std::move(ev));
  }
  return records;
}

inline std::vector<SanctionEvent> ReadLineRecords(std::istream& in) {
  std::vector<SanctionEvent> records;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const std::string_view body = Trim(text);
    if (body.empty() || body.front() == '#') continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("line " + std::to_string(line) + ": malformed record: " +
                  e.what());
    }
    if (!obj.is_object()) {
      throw Error("line " + std::to_string(line) + ": record is not an object");
    }
    auto field = [&](const char* name, bool required) -> std::string {
      auto it = obj.find(name);
      if (it == obj.end()) {
        if (required) {
          throw Error("line " + std::to_string(line) + ": field '" + name +
                      "' is missing");
        }
        return {};
      }
      if (!it->is_string()) {
        throw Error("line " + std::to_string(line) + ": field '" + name +
                    "' is not a string");
      }
      return it->get<std::string>();
    };
    for (const auto& item : obj.items()) {
      const std::string& key = item.key();
      if (key != "issuer" && key != "list_id" && key != "entity_id" &&
          key != "date" && key != "category") {
        throw Error("line " + std::to_string(line) + ": unknown field '" + key +
                    "'");
      }
    }
    SanctionEvent ev;
    ev.issuer = RequireField(field("issuer", true), "issuer", line);
    ev.list_id = RequireField(field("list_id", true), "list_id", line);
    ev.entity_id = RequireField(field("entity_id", true), "entity_id", line);
    ev.date = ParseDateField(field("date", true), line);
    ev.category = std::string(Trim(field("category", false)));
    records.push_back(std::move(ev));
  }
  return records;
}

}  // namespace internal

inline EventSet ParseEvents(std::istream& in, EventFormat format) {
  return MakeEventSet(format == EventFormat::kDelimited
                          ? internal::ReadDelimited(in)
                          : internal::ReadLineRecords(in));
}

inline EventFormat ParseEventFormat(std::string_view name) {
  if (name == "delimited" || name == "csv") return EventFormat::kDelimited;
  if (name == "line_record" || name == "jsonl") return EventFormat::kLineRecord;
  throw Error("unknown event format '" + std::string(name) + "'");
}

// Canonical delimited form. The category column is written only when some
// event carries one.
inline void SerializeEvents(const EventSet& set, std::ostream& out) {
  const bool has_category =
      std::any_of(set.events.begin(), set.events.end(),
                  [](const SanctionEvent& e) { return !e.category.empty(); });
  std::vector<std::string> header = {"issuer", "list_id", "entity_id", "date"};
  if (has_category) header.push_back("category");
  WriteCsvRow(out, header);
  for (const auto& e : set.events) {
    std::vector<std::string> row = {e.issuer, e.list_id, e.entity_id,
                                    e.date.ToString()};
    if (has_category) row.push_back(e.category);
    WriteCsvRow(out, row);
  }
}

struct ValidationReport {
  std::size_t issuer_count = 0;
  std::size_t list_count = 0;
  std::size_t entity_count = 0;
  std::size_t event_count = 0;
  // Entities listed on two or more lists.
  std::size_t cross_list_entities = 0;
  // Entities on exactly one list; they cannot produce any edge.
  std::vector<std::string> edge_inert_entities;
  // Lists sharing no entity with any other list.
  std::vector<std::string> isolated_lists;
  // Informational only.
  std::vector<std::string> single_entity_lists;

  std::size_t warning_count() const {
    return edge_inert_entities.size() + isolated_lists.size();
  }
};

inline ValidationReport ValidateEvents(const EventSet& set) {
  ValidationReport report;
  report.issuer_count = set.issuers.size();
  report.list_count = set.lists.size();
  report.event_count = set.events.size();
  std::map<std::string, std::size_t> lists_per_entity;
  std::map<std::string, std::vector<std::string>> entities_per_list;
  for (const auto& e : set.events) {
    ++lists_per_entity[e.entity_id];
    entities_per_list[e.list_id].push_back(e.entity_id);
  }
  report.entity_count = lists_per_entity.size();
  for (const auto& [entity, count] : lists_per_entity) {
    if (count >= 2) {
      ++report.cross_list_entities;
    } else {
      report.edge_inert_entities.push_back(entity);
    }
  }
  for (const auto& [list, entities] : entities_per_list) {
    if (entities.size() == 1) report.single_entity_lists.push_back(list);
    const bool shares = std::any_of(
        entities.begin(), entities.end(),
        [&](const std::string& e) { return lists_per_entity[e] >= 2; });
    if (!shares) report.isolated_lists.push_back(list);
  }
  return report;
}

inline void WriteValidationReport(const ValidationReport& r, std::ostream& out) {
  out << "issuers," << r.issuer_count << '\n'
      << "lists," << r.list_count << '\n'
      << "entities," << r.entity_count << '\n'
      << "events," << r.event_count << '\n'
      << "cross_list_entities," << r.cross_list_entities << '\n'
      << "warnings," << r.warning_count() << '\n';
  for (const auto& e : r.edge_inert_entities) {
    out << "edge_inert_entity," << CsvField(e) << '\n';
  }
  for (const auto& l : r.isolated_lists) out << "isolated_list," << CsvField(l) << '\n';
  for (const auto& l : r.single_entity_lists) {
    out << "single_entity_list," << CsvField(l) << '\n';
  }
}

// Synthetic feed with a planted issuer hierarchy. Each entity originates at
// a uniformly chosen issuer and then propagates downstream in rank order
// (rank 1 is the top). A downstream issuer copies it with probability
// copy_prob * gap_decay^(gap - 1), where gap is the rank distance to the most
// recent holder; copies are dated strictly after that holder. gap_decay = 0
// gives a strict chain in which only the next rank can copy.
struct SynthConfig {
  std::size_t issuer_count = 6;
  std::size_t lists_min = 1;
  std::size_t lists_max = 3;
  std::size_t entity_count = 200;
  std::vector<int> ranks;  // empty: 1..issuer_count in issuer order
  double copy_prob = 0.5;
  double gap_decay = 1.0;
  Date start = Date::Parse("2001-01-01");
  std::int32_t origin_span_days = 3650;
  std::int32_t max_delay_days = 180;
};

inline std::string SynthIssuerName(std::size_t index, std::size_t count) {
  const std::size_t width = std::to_string(count).size();
  std::string digits = std::to_string(index + 1);
  return "ISS" + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

inline EventSet SynthGenerate(const SynthConfig& config, std::uint64_t seed) {
  if (config.issuer_count == 0) throw Error("synth: issuer_count must be positive");
  if (config.entity_count == 0) throw Error("synth: entity_count must be positive");
  if (config.lists_min == 0 || config.lists_min > config.lists_max) {
    throw Error("synth: need 1 <= lists_min <= lists_max");
  }
  if (!(config.copy_prob >= 0.0 && config.copy_prob <= 1.0)) {
    throw Error("synth: copy_prob must lie in [0, 1]");
  }
  if (!(config.gap_decay >= 0.0 && config.gap_decay <= 1.0)) {
    throw Error("synth: gap_decay must lie in [0, 1]");
  }
  if (config.origin_span_days < 1 || config.max_delay_days < 0) {
    throw Error("synth: origin_span_days must be >= 1 and max_delay_days >= 0");
  }
  std::vector<int> ranks = config.ranks;
  if (ranks.empty()) {
    for (std::size_t i = 0; i < config.issuer_count; ++i) {
      ranks.push_back(static_cast<int>(i + 1));
    }
  }
  if (ranks.size() != config.issuer_count) {
    throw Error("synth: ranks must have one entry per issuer");
  }

  Rng rng(seed);
  const std::size_t n = config.issuer_count;
  std::vector<std::string> names(n);
  std::vector<std::vector<std::string>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    names[i] = SynthIssuerName(i, n);
    const std::size_t count =
        config.lists_min + rng.Below(config.lists_max - config.lists_min + 1);
    for (std::size_t l = 0; l < count; ++l) {
      lists[i].push_back(names[i] + "-L" + std::to_string(l + 1));
    }
  }
  // Issuers in downstream order; ties in rank keep issuer order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

  const std::size_t entity_width = std::to_string(config.entity_count).size();
  std::vector<SanctionEvent> records;
  for (std::size_t e = 0; e < config.entity_count; ++e) {
    std::string digits = std::to_string(e + 1);
    const std::string entity =
        "E" + std::string(entity_width - digits.size(), '0') + digits;
    const std::size_t origin = rng.Below(n);
    Date date = config.start.AddDays(
        static_cast<std::int32_t>(rng.Below(config.origin_span_days)));
    auto add = [&](std::size_t issuer, Date when) {
      const auto& own = lists[issuer];
      records.push_back(
          {names[issuer], own[rng.Below(own.size())], entity, when, ""});
    };
    add(origin, date);
    int holder_rank = ranks[origin];
    for (std::size_t idx : order) {
      if (idx == origin || ranks[idx] <= holder_rank) continue;
      const int gap = ranks[idx] - holder_rank;
      const double p = config.copy_prob * std::pow(config.gap_decay, gap - 1);
      if (rng.Uniform() < p) {
        date = date.AddDays(1 + static_cast<std::int32_t>(
                                    rng.Below(config.max_delay_days + 1)));
        add(idx, date);
        holder_rank = ranks[idx];
      }
    }
  }
  return MakeEventSet(std::move(records));
}

}  // namespace hodgeflow

#endif  // HODGEFLOW_INGEST_HPP_
