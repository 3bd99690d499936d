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

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirtyml/error.hpp"
#include "dirtyml/search.hpp"
#include "dirtyml/tabular.hpp"
#include "dirtyml/type_inference.hpp"
#include "dirtyml/vectorizer.hpp"

namespace dirtyml {

/// Flat configuration text: `key = value` lines, `[section]` headers that
/// prefix following keys with "section.", `#` comments. Values are bare or
/// double-quoted strings.
using KeyValues = std::map<std::string, std::string>;

inline KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto where = [&] { return "config line " + std::to_string(line_no); };
    bool quoted = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    const std::string body(trim(line.substr(0, cut)));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']' || body.size() < 3) throw UsageError(where() + ": malformed section header");
      section = std::string(trim(std::string_view(body).substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError(where() + ": expected key = value");
    const std::string key(trim(std::string_view(body).substr(0, eq)));
    std::string value(trim(std::string_view(body).substr(eq + 1)));
    if (key.empty()) throw UsageError(where() + ": empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    } else if (!value.empty() && (value.front() == '"' || value.back() == '"')) {
      throw UsageError(where() + ": unbalanced quotes");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (!out.emplace(full, value).second) throw UsageError(where() + ": duplicate key '" + full + "'");
  }
  return out;
}

inline KeyValues load_config_file(const std::string& path) { return parse_config_text(read_file(path)); }

namespace config_detail {

template <typename T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  const auto d = parse_number(v);
  if (!d) throw UsageError("config key '" + key + "' expects a number, got '" + v + "'");
  return *d;
}

inline bool parse_flag(const std::string& key, const std::string& v) {
  const auto b = parse_boolean(v);
  if (!b) throw UsageError("config key '" + key + "' expects true or false, got '" + v + "'");
  return *b;
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = v.find(',', pos);
    out.emplace_back(trim(std::string_view(v).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace config_detail

inline VectorizerConfig top_feature_defaults() {
  VectorizerConfig v;
  v.mode = SelectionMode::top_feature_only;
  return v;
}

/// Everything a run depends on. Serialized into every output.
struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t budget_candidates = 0;
  double budget_seconds = 0.0;
  SplitKind split = SplitKind::holdout;
  double holdout = 0.25;
  std::size_t kfold = 5;
  bool stratify = false;
  Metric metric = Metric::accuracy;
  std::size_t threads = 1;
  bool timing = false;
  VectorizerConfig vectorizer = top_feature_defaults();
  std::vector<EncoderKind> simple_kinds{EncoderKind::one_hot, EncoderKind::ordinal, EncoderKind::hashing};
  std::vector<ModelFamily> families{std::begin(kAllModelFamilies), std::end(kAllModelFamilies)};
  std::string out_dir;

  /// Applies one key; throws UsageError on unknown keys or bad values.
  void set(const std::string& key, const std::string& v) {
    using namespace config_detail;
    auto& vz = vectorizer;
    if (key == "seed") seed = parse_integer<std::uint64_t>(key, v);
    else if (key == "budget.candidates") budget_candidates = parse_integer<std::size_t>(key, v);
    else if (key == "budget.seconds") budget_seconds = parse_real(key, v);
    else if (key == "split.kind") split = v == "kfold" ? SplitKind::kfold : v == "holdout" ? SplitKind::holdout
                                         : throw UsageError("split.kind must be holdout or kfold");
    else if (key == "split.holdout") holdout = parse_real(key, v);
    else if (key == "split.kfold") kfold = parse_integer<std::size_t>(key, v);
    else if (key == "split.stratify") stratify = parse_flag(key, v);
    else if (key == "search.metric") metric = parse_metric(v);
    else if (key == "search.threads") threads = parse_integer<std::size_t>(key, v);
    else if (key == "search.timing") timing = parse_flag(key, v);
    else if (key == "search.simple_encoders") {
      simple_kinds.clear();
      for (const auto& s : split_list(v)) simple_kinds.push_back(parse_encoder_kind(s));
    } else if (key == "search.families") {
      families.clear();
      for (const auto& s : split_list(v)) families.push_back(parse_model_family(s));
    } else if (key == "inference.numeric_threshold") vz.inference.numeric_threshold = parse_real(key, v);
    else if (key == "inference.missing_tokens") {
      const auto tokens = split_list(v);
      vz.inference.missing_tokens = {tokens.begin(), tokens.end()};
    }
    else if (key == "vectorizer.mode") vz.mode = parse_selection_mode(v);
    else if (key == "vectorizer.low_card_threshold") vz.low_card_threshold = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.row_switch") vz.row_switch = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.gram") vz.gram = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.max_prototypes") vz.max_prototypes = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.minhash_hashes") vz.minhash_hashes = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.gap_topics") vz.gap_topics = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.gap_max_iters") vz.gap_max_iters = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.gap_tol") vz.gap_tol = parse_real(key, v);
    else if (key == "vectorizer.importance_trees") vz.importance.n_trees = parse_integer<std::size_t>(key, v);
    else if (key == "vectorizer.importance_depth") vz.importance.max_depth = parse_integer<std::size_t>(key, v);
    else if (key == "output.dir") out_dir = v;
    else throw UsageError("unknown config key '" + key + "'");
  }

  void merge(const KeyValues& kv) {
    for (const auto& [k, v] : kv) set(k, v);
  }

  void validate() const {
    if (!(holdout > 0.0 && holdout < 1.0)) throw UsageError("holdout fraction must lie in (0, 1)");
    if (split == SplitKind::kfold && kfold < 2) throw UsageError("k-fold needs k >= 2");
    if (budget_seconds < 0.0) throw UsageError("budget seconds must not be negative");
    if (threads == 0) throw UsageError("threads must be positive");
    const auto& inf = vectorizer.inference;
    if (!(inf.numeric_threshold > 0.0 && inf.numeric_threshold <= 1.0)) {
      throw UsageError("numeric threshold must lie in (0, 1]");
    }
    if (vectorizer.gram == 0) throw UsageError("gram size must be positive");
    search_space().validate();
  }

  /// Search space implied by the mode and toggles. Encoder hyperparameters
  /// come from the space's grids, not from the vectorizer settings.
  SearchSpace search_space() const {
    SearchSpace s;
    s.modes = {vectorizer.mode};
    s.simple_kinds = simple_kinds;
    s.families = families;
    return s;
  }

  SearchOptions search_options() const {
    SearchOptions o;
    o.budget = {budget_candidates, budget_seconds};
    o.seed = seed;
    o.threads = threads;
    o.evaluation.metric = metric;
    o.evaluation.vectorizer = vectorizer;
    o.evaluation.vectorizer.seed = seed;
    o.evaluation.vectorizer.importance.seed = seed;
    return o;
  }

  nlohmann::json to_json() const {
    nlohmann::json simple = nlohmann::json::array(), fam = nlohmann::json::array();
    for (const auto k : simple_kinds) simple.push_back(std::string(to_string(k)));
    for (const auto f : families) fam.push_back(std::string(to_string(f)));
    const auto& vz = vectorizer;
    return {{"seed", seed},
            {"budget", {{"candidates", budget_candidates}, {"seconds", budget_seconds}}},
            {"split",
             {{"kind", split == SplitKind::holdout ? "holdout" : "kfold"},
              {"holdout", holdout},
              {"kfold", kfold},
              {"stratify", stratify}}},
            {"search",
             {{"metric", std::string(to_string(metric))},
              {"threads", threads},
              {"timing", timing},
              {"simple_encoders", simple},
              {"families", fam}}},
            {"inference",
             {{"numeric_threshold", vz.inference.numeric_threshold}, {"missing_tokens", vz.inference.missing_tokens}}},
            {"vectorizer",
             {{"mode", std::string(to_string(vz.mode))},
              {"low_card_threshold", vz.low_card_threshold},
              {"row_switch", vz.row_switch},
              {"gram", vz.gram},
              {"max_prototypes", vz.max_prototypes},
              {"minhash_hashes", vz.minhash_hashes},
              {"gap_topics", vz.gap_topics},
              {"gap_max_iters", vz.gap_max_iters},
              {"gap_tol", vz.gap_tol},
              {"importance_trees", vz.importance.n_trees},
              {"importance_depth", vz.importance.max_depth}}},
            {"output", {{"dir", out_dir}}}};
  }
};

inline SplitPlan make_split(const RunConfig& cfg, const Dataset& data) {
  if (cfg.split == SplitKind::kfold) return make_kfold(data.n_rows(), cfg.kfold, cfg.seed);
  if (cfg.stratify) {
    const auto labels = target_labels(resolve_missing(data, cfg.vectorizer.inference.missing_tokens));
    return make_stratified_holdout(labels.y, cfg.holdout, cfg.seed);
  }
  return make_holdout(data.n_rows(), cfg.holdout, cfg.seed);
}

}  // namespace dirtyml
