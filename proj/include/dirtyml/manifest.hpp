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
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirtyml/error.hpp"
#include "dirtyml/labels.hpp"
#include "dirtyml/tabular.hpp"
#include "dirtyml/type_inference.hpp"

namespace dirtyml {

/// Shape summary of a classification dataset. Counts may be written
/// abbreviated ("2k", "1.7m", "1M").
struct DatasetManifest {
  std::string name;
  std::size_t classes = 0;
  std::string instances;
  std::size_t features = 0;
  std::size_t categorical_features = 0;

  bool operator==(const DatasetManifest&) const = default;

  nlohmann::json to_json() const {
    return {{"name", name},
            {"classes", classes},
            {"instances", instances},
            {"features", features},
            {"categorical_features", categorical_features}};
  }

  static DatasetManifest from_json(const nlohmann::json& j) {
    try {
      DatasetManifest m;
      m.name = j.at("name").get<std::string>();
      m.classes = j.at("classes").get<std::size_t>();
      m.instances = j.at("instances").is_string() ? j.at("instances").get<std::string>()
                                                  : std::to_string(j.at("instances").get<std::size_t>());
      m.features = j.at("features").get<std::size_t>();
      m.categorical_features = j.at("categorical_features").get<std::size_t>();
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad manifest: ") + e.what());
    }
  }
};

// The seven dirty benchmark tables.
inline const std::vector<DatasetManifest>& reference_manifests() {
  static const std::vector<DatasetManifest> all{
      {"Kickstarter", 2, "331k", 13, 5},      {"Openpayments", 2, "460k", 178, 102},
      {"Roadsafety", 3, "1M", 66, 2},         {"Trafficviolations", 4, "1.7m", 42, 36},
      {"Drugdirectory", 7, "120k", 20, 14},   {"Midwest", 9, "2k", 27, 26},
      {"Metobjects", 19, "476k", 53, 42},
  };
  return all;
}

inline const DatasetManifest& reference_manifest(std::string_view name) {
  for (const auto& m : reference_manifests()) {
    if (m.name == name) return m;
  }
  throw UsageError("no manifest named '" + std::string(name) + "'");
}

struct AbbreviatedCount {
  double value = 0;
  double unit = 1;
  std::size_t decimals = 0;
};

inline AbbreviatedCount parse_abbreviated_count(std::string_view s) {
  AbbreviatedCount out;
  std::string digits(s);
  if (!digits.empty()) {
    const char u = static_cast<char>(std::tolower(static_cast<unsigned char>(digits.back())));
    if (u == 'k' || u == 'm') {
      out.unit = u == 'k' ? 1e3 : 1e6;
      digits.pop_back();
    }
  }
  const auto v = parse_number(digits);
  if (!v || *v < 0 || digits.find_first_of("eE+-") != std::string::npos) {
    throw FormatError("bad count '" + std::string(s) + "'");
  }
  const auto dot = digits.find('.');
  out.decimals = dot == std::string::npos ? 0 : digits.size() - dot - 1;
  out.value = *v;
  return out;
}

/// True when `n` rounds to the abbreviated count at its written precision.
inline bool matches_count(std::size_t n, std::string_view abbreviated) {
  const auto a = parse_abbreviated_count(abbreviated);
  const double step = a.unit * std::pow(10.0, -static_cast<double>(a.decimals));
  const double x = static_cast<double>(n);
  return std::abs(x - a.value * a.unit) <= step / 2.0;
}

inline std::string abbreviate_count(std::size_t n) {
  if (n < 1000) return std::to_string(n);
  const bool millions = n >= 1'000'000;
  const double v = static_cast<double>(n) / (millions ? 1e6 : 1e3);
  char buf[32];
  const double rounded = std::round(v * 10.0) / 10.0;
  if (rounded == std::floor(rounded) || v >= 100.0) {
    std::snprintf(buf, sizeof buf, "%.0f%c", std::round(v), millions ? 'M' : 'k');
  } else {
    std::snprintf(buf, sizeof buf, "%.1f%c", rounded, millions ? 'M' : 'k');
  }
  return buf;
}

/// Manifest measured from a loaded table with a target column.
inline DatasetManifest describe_dataset(const Dataset& raw, std::string name, const InferenceConfig& cfg = {}) {
  if (!raw.target()) throw UsageError("describing a dataset needs a target column");
  const Dataset data = resolve_missing(raw, cfg.missing_tokens);
  const auto report = infer_types(data, cfg);
  DatasetManifest m;
  m.name = std::move(name);
  m.classes = target_labels(data).n_classes();
  m.instances = abbreviate_count(data.n_rows());
  m.features = data.n_features();
  m.categorical_features = report.categorical_columns().size();
  return m;
}

struct ManifestCheck {
  bool ok = true;
  std::vector<std::string> mismatches;
};

inline ManifestCheck check_manifest(const Dataset& raw, const DatasetManifest& expected,
                                    const InferenceConfig& cfg = {}) {
  ManifestCheck out;
  auto note = [&](std::string what) {
    out.ok = false;
    out.mismatches.push_back(std::move(what));
  };
  if (!matches_count(raw.n_rows(), expected.instances)) {
    note("instances: " + std::to_string(raw.n_rows()) + " vs " + expected.instances);
  }
  if (raw.n_features() != expected.features) {
    note("features: " + std::to_string(raw.n_features()) + " vs " + std::to_string(expected.features));
  }
  if (raw.target()) {
    const auto got = describe_dataset(raw, expected.name, cfg);
    if (got.classes != expected.classes) {
      note("classes: " + std::to_string(got.classes) + " vs " + std::to_string(expected.classes));
    }
    if (got.categorical_features != expected.categorical_features) {
      note("categorical features: " + std::to_string(got.categorical_features) + " vs " +
           std::to_string(expected.categorical_features));
    }
  }
  return out;
}

}  // namespace dirtyml
