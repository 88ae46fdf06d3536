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

#ifndef HODGEFLOW_COMMON_HPP_
#define HODGEFLOW_COMMON_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hodgeflow {

inline constexpr std::string_view kVersion = "0.1.0";

// All library failures surface as this type. The CLI maps it to exit status 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Calendar date at day resolution, stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days) : days_(days) {}

  // Accepts strict ISO 8601 `YYYY-MM-DD` only.
  static Date Parse(std::string_view text) {
    auto fail = [&] {
      return Error("invalid date '" + std::string(text) +
                   "' (expected YYYY-MM-DD)");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
    auto digits = [&](std::size_t pos, std::size_t len) {
      int value = 0;
      for (std::size_t k = pos; k < pos + len; ++k) {
        if (text[k] < '0' || text[k] > '9') throw fail();
        value = value * 10 + (text[k] - '0');
      }
      return value;
    };
    const std::chrono::year_month_day ymd{
        std::chrono::year{digits(0, 4)},
        std::chrono::month{static_cast<unsigned>(digits(5, 2))},
        std::chrono::day{static_cast<unsigned>(digits(8, 2))}};
    if (!ymd.ok()) throw fail();
    return Date(static_cast<std::int32_t>(
        std::chrono::sys_days{ymd}.time_since_epoch().count()));
  }

  std::string ToString() const {
    const std::chrono::year_month_day ymd{
        std::chrono::sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
  }

  constexpr std::int32_t days() const { return days_; }
  constexpr Date AddDays(std::int32_t n) const { return Date(days_ + n); }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::int32_t days_ = 0;
};

inline std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' ||
           c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> Split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Shortest text that parses back to the same double is not guaranteed by
// printf, so exported reals always carry 17 significant digits.
inline std::string FormatReal(double value) {
  if (value == 0.0) value = 0.0;  // folds -0 into 0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline std::string FormatFixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string out = buf;
  // "-0.000" reads as a sign claim the value does not support.
  if (out.front() == '-' &&
      out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

inline double ParseReal(std::string_view text, std::string_view what) {
  const std::string s(Trim(text));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error("cannot parse " + std::string(what) + " '" + s + "' as a number");
  }
  if (used != s.size()) {
    throw Error("cannot parse " + std::string(what) + " '" + s + "' as a number");
  }
  return value;
}

inline std::int64_t ParseInteger(std::string_view text, std::string_view what) {
  const std::string s(Trim(text));
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw Error("cannot parse " + std::string(what) + " '" + s + "' as an integer");
  }
  if (used != s.size()) {
    throw Error("cannot parse " + std::string(what) + " '" + s + "' as an integer");
  }
  return value;
}

// RFC 4180 comma-separated records. Quoted fields may contain commas, quotes
// (doubled) and line breaks.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`; returns false at end of input.
  // `line()` afterwards is the 1-based line on which the record started.
  bool Next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) return false;
    ++line_;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (true) {
      if (c == std::char_traits<char>::eof()) {
        if (quoted) {
          throw Error("line " + std::to_string(record_line_) +
                      ": unterminated quoted field");
        }
        fields.push_back(std::move(field));
        return true;
      }
      const char ch = static_cast<char>(c);
      if (quoted) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (ch == '\n') ++line_;
          field.push_back(ch);
        }
      } else if (ch == '"' && field.empty() && !was_quoted) {
        quoted = true;
        was_quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
      } else if (ch == '\n') {
        fields.push_back(std::move(field));
        return true;
      } else if (ch == '\r' && in_.peek() == '\n') {
        // CRLF terminator
      } else {
        field.push_back(ch);
      }
      c = in_.get();
    }
  }

  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

inline std::string CsvField(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos &&
      (value.empty() || (value.front() != ' ' && value.back() != ' '))) {
    return std::string(value);
  }
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void WriteCsvRow(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out << ',';
    out << CsvField(fields[k]);
  }
  out << '\n';
}

// Skips `#`-prefixed metadata lines at the head of a stream.
inline void SkipCommentHeader(std::istream& in) {
  while (in.peek() == '#') {
    std::string discard;
    std::getline(in, discard);
  }
}

// 64-bit generator plus bounded draws with fixed semantics, so seeded output
// does not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // splitmix64
  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound).
  std::uint64_t Below(std::uint64_t bound) {
    if (bound == 0) throw Error("Rng::Below called with bound 0");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = Next();
    while (draw >= limit) draw = Next();
    return draw % bound;
  }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  template <class T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t k = items.size(); k > 1; --k) {
      std::swap(items[k - 1], items[Below(k)]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace hodgeflow

#endif  // HODGEFLOW_COMMON_HPP_
