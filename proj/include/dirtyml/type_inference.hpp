// Copyright 2026 The dirtyml Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirtyml/error.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

enum class FeatureType { numeric, boolean, categorical, constant, all_missing };

inline std::string_view to_string(FeatureType t) noexcept {
  switch (t) {
    case FeatureType::numeric: return "numeric";
    case FeatureType::boolean: return "boolean";
    case FeatureType::categorical: return "categorical";
    case FeatureType::constant: return "constant";
    case FeatureType::all_missing: return "all_missing";
  }
  return "unknown";
}

inline std::set<std::string> default_missing_tokens() {
  return {"", "NA", "N/A", "NaN", "nan", "null", "NULL", "none", "-", "?"};
}

struct InferenceConfig {
  double numeric_threshold = 0.95;
  std::set<std::string> missing_tokens = default_missing_tokens();
};

inline std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Trimmed cell, or nullopt when the cell is one of the missing tokens.
inline std::optional<std::string> normalize_missing(std::string_view cell,
                                                    const std::set<std::string>& missing_tokens) {
  const auto t = trim(cell);
  if (missing_tokens.contains(std::string(t))) return std::nullopt;
  return std::string(t);
}

// Decimal number: [sign] digits [. digits] [(e|E) [sign] digits], with at
// least one digit in the mantissa. Surrounding whitespace is ignored; no
// thousands separators, no inf/nan, no locale.
inline std::optional<double> parse_number(std::string_view s) noexcept {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  std::size_t mantissa_digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++mantissa_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++mantissa_digits;
  }
  if (mantissa_digits == 0) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline std::optional<bool> parse_boolean(std::string_view s) noexcept {
  std::string lower;
  for (const char c : trim(s)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "true" || lower == "1" || lower == "yes") return true;
  if (lower == "false" || lower == "0" || lower == "no") return false;
  return std::nullopt;
}

/// Returns a copy of `data` with trimmed cells and the missing mask set for
/// every cell matching a missing token. Existing mask bits are kept.
inline Dataset resolve_missing(const Dataset& data, const std::set<std::string>& missing_tokens) {
  std::vector<Column> cols;
  cols.reserve(data.n_cols());
  for (const auto& col : data.columns()) {
    Column c{col.name, {}, {}};
    c.cells.reserve(col.size());
    c.missing.reserve(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) {
      auto v = normalize_missing(col.cells[i], missing_tokens);
      const bool miss = col.is_missing(i) || !v;
      c.cells.push_back(miss ? std::string{} : std::move(*v));
      c.missing.push_back(miss ? 1 : 0);
    }
    cols.push_back(std::move(c));
  }
  return Dataset(std::move(cols), data.target());
}

struct ColumnProfile {
  std::string name;
  FeatureType type = FeatureType::categorical;
  std::size_t cardinality = 0;
  double missing_fraction = 0.0;
  double numeric_parse_fraction = 0.0;
  bool is_target = false;

  bool operator==(const ColumnProfile&) const = default;
};

/// Per-column profile of a dataset. The target column is profiled but belongs
/// to neither the categorical nor the other partition.
struct TypeReport {
  std::vector<ColumnProfile> columns;

  const ColumnProfile& at(std::string_view name) const {
    for (const auto& c : columns) {
      if (c.name == name) return c;
    }
    throw DataError("no column named '" + std::string(name) + "' in type report");
  }

  std::vector<std::string> categorical_columns() const {
    std::vector<std::string> out;
    for (const auto& c : columns) {
      if (!c.is_target && c.type == FeatureType::categorical) out.push_back(c.name);
    }
    return out;
  }

  std::vector<std::string> other_columns() const {
    std::vector<std::string> out;
    for (const auto& c : columns) {
      if (!c.is_target && c.type != FeatureType::categorical) out.push_back(c.name);
    }
    return out;
  }

  bool operator==(const TypeReport&) const = default;
};

/// Profiles one column. Rules, first match wins: no non-missing cell ->
/// all_missing; one distinct level -> constant; every level a boolean token
/// -> boolean; at least `numeric_threshold` of non-missing cells parse as
/// numbers -> numeric; otherwise categorical.
inline ColumnProfile profile_column(const Column& col, const InferenceConfig& cfg) {
  ColumnProfile p;
  p.name = col.name;
  std::unordered_set<std::string> levels;
  std::size_t present = 0;
  std::size_t numeric = 0;
  bool all_boolean = true;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col.is_missing(i)) continue;
    auto v = normalize_missing(col.cells[i], cfg.missing_tokens);
    if (!v) continue;
    ++present;
    if (parse_number(*v)) ++numeric;
    if (all_boolean && !parse_boolean(*v)) all_boolean = false;
    levels.insert(std::move(*v));
  }
  const double n = static_cast<double>(col.size());
  p.cardinality = levels.size();
  p.missing_fraction = col.size() == 0 ? 0.0 : static_cast<double>(col.size() - present) / n;
  p.numeric_parse_fraction =
      present == 0 ? 0.0 : static_cast<double>(numeric) / static_cast<double>(present);
  if (present == 0) {
    p.type = FeatureType::all_missing;
  } else if (levels.size() == 1) {
    p.type = FeatureType::constant;
  } else if (all_boolean) {
    p.type = FeatureType::boolean;
  } else if (p.numeric_parse_fraction >= cfg.numeric_threshold) {
    p.type = FeatureType::numeric;
  } else {
    p.type = FeatureType::categorical;
  }
  return p;
}

inline TypeReport infer_types(const Dataset& data, const InferenceConfig& cfg = {}) {
  if (!(cfg.numeric_threshold > 0.0 && cfg.numeric_threshold <= 1.0)) {
    throw UsageError("numeric_threshold must lie in (0, 1]");
  }
  if (data.n_cols() == 0 || data.n_rows() == 0) throw DataError("cannot infer types of an empty dataset");
  TypeReport report;
  report.columns.reserve(data.n_cols());
  for (const auto& col : data.columns()) {
    auto p = profile_column(col, cfg);
    p.is_target = data.is_target(col.name);
    report.columns.push_back(std::move(p));
  }
  return report;
}

inline nlohmann::json to_json(const TypeReport& report) {
  auto out = nlohmann::json::array();
  for (const auto& c : report.columns) {
    out.push_back({{"name", c.name},
                   {"type", std::string(to_string(c.type))},
                   {"cardinality", c.cardinality},
                   {"missing_fraction", c.missing_fraction}});
  }
  return out;
}

}  // namespace dirtyml
