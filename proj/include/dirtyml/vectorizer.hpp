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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirtyml/encoders.hpp"
#include "dirtyml/encoders/serialize.hpp"
#include "dirtyml/error.hpp"
#include "dirtyml/hash.hpp"
#include "dirtyml/labels.hpp"
#include "dirtyml/models/classifiers.hpp"
#include "dirtyml/tabular.hpp"
#include "dirtyml/type_inference.hpp"

namespace dirtyml {

enum class SelectionMode { all_categorical, top_feature_only, simple_only };

inline std::string_view to_string(SelectionMode m) noexcept {
  switch (m) {
    case SelectionMode::all_categorical: return "all_categorical";
    case SelectionMode::top_feature_only: return "top_feature_only";
    case SelectionMode::simple_only: return "simple_only";
  }
  return "?";
}

inline SelectionMode parse_selection_mode(std::string_view s) {
  for (auto m : {SelectionMode::all_categorical, SelectionMode::top_feature_only, SelectionMode::simple_only}) {
    if (to_string(m) == s) return m;
  }
  throw UsageError("unknown selection mode '" + std::string(s) + "'");
}

struct ImportanceConfig {
  std::size_t n_trees = 50;
  std::size_t max_depth = 10;
  std::uint64_t seed = 0;
};

struct VectorizerConfig {
  SelectionMode mode = SelectionMode::all_categorical;
  std::size_t low_card_threshold = 40;
  std::size_t row_switch = 10000;
  std::size_t gram = 3;
  std::size_t max_prototypes = 100;
  std::size_t minhash_hashes = 30;
  std::size_t gap_topics = 30;
  std::size_t gap_max_iters = 100;
  double gap_tol = 1e-4;
  // Encoder applied to every categorical column in simple_only mode.
  EncoderSpec simple_encoder = EncoderSpec::one_hot();
  std::uint64_t seed = 0;
  bool impute_numeric = true;
  InferenceConfig inference;
  ImportanceConfig importance;
};

/// Morphological encoder for a column: similarity below the low-cardinality
/// threshold, otherwise min-hash on large tables and GAP on small ones.
inline EncoderSpec choose_encoder(std::size_t cardinality, std::size_t n_rows, const VectorizerConfig& cfg) {
  if (cardinality < cfg.low_card_threshold) {
    return EncoderSpec::similarity(cfg.max_prototypes, cfg.gram);
  }
  if (n_rows > cfg.row_switch) return EncoderSpec::minhash(cfg.minhash_hashes, cfg.gram, cfg.seed);
  return EncoderSpec::gap(cfg.gap_topics, cfg.gram, cfg.gap_max_iters, cfg.gap_tol, cfg.seed);
}

// ---------------------------------------------------------------------------
// Numeric pass-through
// ---------------------------------------------------------------------------

// Numeric view of a non-categorical column; NaN marks missing or
// unparseable cells.
inline std::vector<double> numeric_values(const Column& col, FeatureType type) {
  std::vector<double> out(col.size(), std::nan(""));
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col.is_missing(i)) continue;
    switch (type) {
      case FeatureType::boolean:
        if (auto b = parse_boolean(col.cells[i])) out[i] = *b ? 1.0 : 0.0;
        break;
      case FeatureType::constant:
        out[i] = parse_number(col.cells[i]).value_or(1.0);
        break;
      case FeatureType::all_missing: break;
      default:
        if (auto v = parse_number(col.cells[i])) out[i] = *v;
        break;
    }
  }
  return out;
}

inline double nan_mean(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (const double x : v) {
    if (!std::isnan(x)) s += x, ++n;
  }
  return n ? s / static_cast<double>(n) : 0.0;
}

// ---------------------------------------------------------------------------
// Feature importance and top-feature selection
// ---------------------------------------------------------------------------

struct FeatureScore {
  std::string name;
  double importance = 0.0;
};

/// Random-forest Gini importance per feature column (target excluded),
/// normalized to sum to 1, in dataset column order.
///
/// Categorical columns are ordinal-encoded and numerics mean-imputed. The
/// forest sees columns sorted by name, and columns with identical content
/// share one forest input whose importance is split evenly between them;
/// together this makes scores independent of column order and exactly tied
/// for duplicated columns.
inline std::vector<FeatureScore> feature_importance(const Dataset& raw, const VectorizerConfig& cfg) {
  if (!raw.target()) throw UsageError("feature importance needs a target column");
  const Dataset data = resolve_missing(raw, cfg.inference.missing_tokens);
  if (data.n_features() == 0) throw DataError("dataset has no feature columns");
  const auto report = infer_types(data, cfg.inference);
  const Labels labels = target_labels(data);
  if (labels.distinct_present() < 2) throw DataError("target has a single class");

  std::vector<std::string> names;
  for (const auto& c : data.columns()) {
    if (!data.is_target(c.name)) names.push_back(c.name);
  }
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());

  // Group identical columns; the representative is the first by name.
  std::vector<std::size_t> group_of(sorted.size());
  std::vector<std::size_t> representatives;
  std::map<std::uint64_t, std::vector<std::size_t>> by_hash;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& col = data.column(sorted[i]);
    std::uint64_t h = kFnvOffset;
    for (std::size_t r = 0; r < col.size(); ++r) {
      h = fnv1a64(col.is_missing(r) ? std::string_view("\x01") : std::string_view(col.cells[r]), h);
      h = fnv1a64(std::string_view("\x00", 1), h);
    }
    bool placed = false;
    for (const auto g : by_hash[h]) {
      const auto& other = data.column(sorted[representatives[g]]);
      if (other.cells == col.cells && other.missing == col.missing) {
        group_of[i] = g;
        placed = true;
        break;
      }
    }
    if (!placed) {
      group_of[i] = representatives.size();
      by_hash[h].push_back(representatives.size());
      representatives.push_back(i);
    }
  }

  Matrix x(data.n_rows(), representatives.size());
  for (std::size_t g = 0; g < representatives.size(); ++g) {
    const auto& col = data.column(sorted[representatives[g]]);
    const auto& prof = report.at(col.name);
    std::vector<double> v;
    if (prof.type == FeatureType::categorical) {
      const auto enc = fit(EncoderSpec::ordinal(), col);
      v.resize(col.size());
      for (std::size_t r = 0; r < col.size(); ++r) v[r] = static_cast<double>(*enc.level_code(level_of(col, r)));
    } else {
      v = numeric_values(col, prof.type);
      const double m = nan_mean(v);
      for (auto& e : v) {
        if (std::isnan(e)) e = m;
      }
    }
    for (std::size_t r = 0; r < v.size(); ++r) x(r, g) = v[r];
  }

  ModelSpec rf;
  rf.family = ModelFamily::random_forest;
  rf.n_trees = cfg.importance.n_trees;
  rf.max_depth = cfg.importance.max_depth;
  rf.seed = cfg.importance.seed;
  const auto forest = RandomForest::fit(rf, x, labels.y, labels.n_classes());
  const auto group_imp = forest.feature_importance();
  std::vector<std::size_t> group_size(representatives.size(), 0);
  for (const auto g : group_of) ++group_size[g];

  std::map<std::string, double> score;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    score[sorted[i]] = group_imp[group_of[i]] / static_cast<double>(group_size[group_of[i]]);
  }
  std::vector<FeatureScore> out;
  for (const auto& n : names) out.push_back({n, score[n]});
  return out;
}

/// Categorical column with the highest importance; ties go to the
/// lexicographically smallest name.
inline std::string most_predictive_categorical(const Dataset& raw, const VectorizerConfig& cfg) {
  const Dataset data = resolve_missing(raw, cfg.inference.missing_tokens);
  const auto cats = infer_types(data, cfg.inference).categorical_columns();
  if (cats.empty()) throw DataError("dataset has no categorical columns");
  if (cats.size() == 1) return cats.front();
  const auto scores = feature_importance(data, cfg);
  std::optional<FeatureScore> best;
  for (const auto& s : scores) {
    if (std::find(cats.begin(), cats.end(), s.name) == cats.end()) continue;
    if (!best || s.importance > best->importance ||
        (s.importance == best->importance && s.name < best->name)) {
      best = s;
    }
  }
  return best->name;
}

// ---------------------------------------------------------------------------
// Encoding plan and pipeline
// ---------------------------------------------------------------------------

struct PlanEntry {
  std::string column;
  FeatureType type = FeatureType::categorical;
  // Set for categorical columns; unset means numeric pass-through.
  std::optional<EncoderSpec> encoder;

  bool operator==(const PlanEntry&) const = default;
};

/// Per-column encoding decisions, in dataset column order (target excluded).
struct EncodingPlan {
  SelectionMode mode = SelectionMode::all_categorical;
  std::optional<std::string> selected;
  std::vector<PlanEntry> entries;

  bool operator==(const EncodingPlan&) const = default;

  nlohmann::json to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& e : entries) {
      nlohmann::json j{{"column", e.column}, {"type", std::string(to_string(e.type))}};
      j["encoder"] = e.encoder ? e.encoder->to_json() : nlohmann::json(nullptr);
      cols.push_back(std::move(j));
    }
    return {{"mode", std::string(to_string(mode))},
            {"selected", selected ? nlohmann::json(*selected) : nlohmann::json(nullptr)},
            {"columns", std::move(cols)}};
  }

  static EncodingPlan from_json(const nlohmann::json& j) {
    static const std::map<std::string, FeatureType> types{
        {"numeric", FeatureType::numeric},         {"boolean", FeatureType::boolean},
        {"categorical", FeatureType::categorical}, {"constant", FeatureType::constant},
        {"all_missing", FeatureType::all_missing}};
    EncodingPlan p;
    p.mode = parse_selection_mode(j.at("mode").get<std::string>());
    if (!j.at("selected").is_null()) p.selected = j.at("selected").get<std::string>();
    for (const auto& c : j.at("columns")) {
      PlanEntry e;
      e.column = c.at("column").get<std::string>();
      e.type = types.at(c.at("type").get<std::string>());
      if (!c.at("encoder").is_null()) e.encoder = EncoderSpec::from_json(c.at("encoder"));
      p.entries.push_back(std::move(e));
    }
    return p;
  }

  // Short description of the categorical encoders, e.g. "gap(d=30,n=3)+ordinal".
  std::string encoder_summary() const {
    std::vector<std::string> parts;
    for (const auto& e : entries) {
      if (!e.encoder) continue;
      const auto d = e.encoder->describe();
      if (std::find(parts.begin(), parts.end(), d) == parts.end()) parts.push_back(d);
    }
    if (parts.empty()) return "none";
    std::string out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) out += "+" + parts[i];
    return out;
  }
};

inline Container plan_container(const EncodingPlan& plan) {
  return {"encoding_plan", {{"mode", std::string(to_string(plan.mode))}}, plan.to_json()};
}

inline EncodingPlan plan_from_container(const Container& c) {
  if (c.kind != "encoding_plan") throw FormatError("document holds a '" + c.kind + "', not an encoding plan");
  try {
    return EncodingPlan::from_json(c.state);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed encoding plan: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError(std::string("malformed encoding plan: ") + e.what());
  }
}

/// Decides each column's treatment. `data` must have missing values resolved.
/// In top_feature_only mode the selected column (computed when not given)
/// gets the morphological encoder and other categoricals are ordinal-coded.
inline EncodingPlan plan_encoding(const Dataset& data, const TypeReport& report, const VectorizerConfig& cfg,
                                  std::optional<std::string> selected = std::nullopt) {
  EncodingPlan plan;
  plan.mode = cfg.mode;
  const auto cats = report.categorical_columns();
  if (cfg.mode == SelectionMode::top_feature_only && !cats.empty()) {
    plan.selected = selected ? std::move(selected) : most_predictive_categorical(data, cfg);
  }
  for (const auto& col : data.columns()) {
    if (data.is_target(col.name)) continue;
    const auto& prof = report.at(col.name);
    PlanEntry e{col.name, prof.type, std::nullopt};
    if (prof.type == FeatureType::categorical) {
      switch (cfg.mode) {
        case SelectionMode::all_categorical:
          e.encoder = choose_encoder(prof.cardinality, data.n_rows(), cfg);
          break;
        case SelectionMode::top_feature_only:
          e.encoder = col.name == plan.selected ? choose_encoder(prof.cardinality, data.n_rows(), cfg)
                                                : EncoderSpec::ordinal();
          break;
        case SelectionMode::simple_only: e.encoder = cfg.simple_encoder; break;
      }
    }
    plan.entries.push_back(std::move(e));
  }
  return plan;
}

/// Encoders and imputation values fitted on one dataset, applicable to any
/// dataset with the same columns.
class FittedPipeline {
 public:
  FittedPipeline(EncodingPlan plan, std::vector<std::optional<FittedEncoder>> encoders,
                 std::vector<double> fill, bool impute)
      : plan_(std::move(plan)), encoders_(std::move(encoders)), fill_(std::move(fill)), impute_(impute) {}

  const EncodingPlan& plan() const noexcept { return plan_; }
  const std::vector<std::optional<FittedEncoder>>& encoders() const noexcept { return encoders_; }

  DesignMatrix transform(const Dataset& data) const {
    std::vector<DesignMatrix> parts;
    parts.reserve(plan_.entries.size());
    for (std::size_t i = 0; i < plan_.entries.size(); ++i) {
      const auto& e = plan_.entries[i];
      const auto& col = data.column(e.column);
      if (encoders_[i]) {
        parts.push_back(encoders_[i]->transform(col));
        continue;
      }
      auto v = numeric_values(col, e.type);
      if (impute_) {
        for (auto& x : v) {
          if (std::isnan(x)) x = fill_[i];
        }
      }
      const std::size_t n = v.size();
      parts.push_back(DesignMatrix::dense(e.column, "passthrough", Matrix(n, 1, std::move(v))));
    }
    if (parts.empty()) return DesignMatrix(data.n_rows(), {});
    return assemble(parts);
  }

 private:
  EncodingPlan plan_;
  std::vector<std::optional<FittedEncoder>> encoders_;
  std::vector<double> fill_;
  bool impute_ = true;
};

inline FittedPipeline fit_pipeline(const Dataset& data, const EncodingPlan& plan, const VectorizerConfig& cfg,
                                   const std::optional<Labels>& labels = std::nullopt) {
  std::vector<std::optional<FittedEncoder>> encoders;
  std::vector<double> fill;
  for (const auto& e : plan.entries) {
    const auto& col = data.column(e.column);
    if (e.encoder) {
      encoders.emplace_back(fit(*e.encoder, col, labels));
      fill.push_back(0.0);
    } else {
      encoders.emplace_back(std::nullopt);
      fill.push_back(nan_mean(numeric_values(col, e.type)));
    }
  }
  return FittedPipeline(plan, std::move(encoders), std::move(fill), cfg.impute_numeric);
}

struct PipelineResult {
  TypeReport report;
  EncodingPlan plan;
  DesignMatrix matrix;
};

/// End-to-end categorical pipeline: resolve missing tokens, infer types,
/// pick encoders, fit them and assemble the transformed design matrix with
/// the same rows in the same order.
inline PipelineResult run_pipeline(const Dataset& raw, const VectorizerConfig& cfg) {
  const Dataset data = resolve_missing(raw, cfg.inference.missing_tokens);
  auto report = infer_types(data, cfg.inference);
  auto plan = plan_encoding(data, report, cfg);
  std::optional<Labels> labels;
  if (data.target()) labels = target_labels(data);
  const auto pipeline = fit_pipeline(data, plan, cfg, labels);
  auto matrix = pipeline.transform(data);
  return {std::move(report), std::move(plan), std::move(matrix)};
}

}  // namespace dirtyml
