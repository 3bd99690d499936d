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

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirtyml/error.hpp"
#include "dirtyml/random.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

/// Dirty categorical data generator.
///
/// Each of `n_topics` pools holds one random substring of `topic_length`
/// lowercase letters; pool p belongs to class p % class_count. A level is
/// filler + pool substring + filler, with filler lengths drawn from
/// [filler_min, filler_max]. Rows take levels round-robin (row i gets level
/// i % n_levels) and are then shuffled, so every level appears. Each signal
/// cell then receives, with probability typo_rate, exactly one edit
/// (substitute, delete or insert, equally likely, uniform position).
/// Noise columns draw uniformly from `noise_levels` short tokens.
///
/// All randomness comes from xoshiro256** seeded through SplitMix64, so the
/// output is identical on every platform.
struct SyntheticSpec {
  std::size_t n_rows = 1000;
  std::size_t n_levels = 100;
  std::size_t n_topics = 0;  // 0 = one pool per class
  std::size_t topic_length = 6;
  std::size_t filler_min = 2;
  std::size_t filler_max = 5;
  double typo_rate = 0.0;
  std::size_t n_noise_features = 2;
  std::size_t noise_levels = 10;
  std::size_t class_count = 2;
  std::uint64_t seed = 0;

  std::size_t pools() const noexcept { return n_topics ? n_topics : class_count; }

  void validate() const {
    if (n_rows == 0) throw UsageError("synthetic data needs at least one row");
    if (class_count < 2) throw UsageError("synthetic data needs at least two classes");
    if (n_levels < class_count) throw UsageError("n_levels must be at least class_count");
    if (pools() < class_count) throw UsageError("n_topics must be at least class_count");
    if (topic_length < 3) throw UsageError("topic_length must be at least 3");
    if (filler_min > filler_max) throw UsageError("filler_min exceeds filler_max");
    if (!(typo_rate >= 0.0 && typo_rate <= 1.0)) throw UsageError("typo_rate must lie in [0, 1]");
    if (n_noise_features > 0 && noise_levels == 0) throw UsageError("noise_levels must be positive");
  }

  nlohmann::json to_json() const {
    return {{"n_rows", n_rows},           {"n_levels", n_levels},     {"n_topics", pools()},
            {"topic_length", topic_length}, {"filler_min", filler_min}, {"filler_max", filler_max},
            {"typo_rate", typo_rate},     {"n_noise_features", n_noise_features},
            {"noise_levels", noise_levels}, {"class_count", class_count}, {"seed", seed}};
  }
};

struct SyntheticData {
  Dataset data;
  std::vector<std::string> substrings;  // per pool
  std::vector<std::size_t> pool_class;  // class index per pool
  std::vector<std::string> levels;      // clean levels, before typos
  std::vector<std::size_t> level_pool;
};

namespace synthetic_detail {

inline char letter(Rng& rng) { return static_cast<char>('a' + rng.below(26)); }

inline std::string letters(Rng& rng, std::size_t n) {
  std::string s(n, 'a');
  for (auto& c : s) c = letter(rng);
  return s;
}

inline std::string class_name(std::size_t c) { return "class_" + std::to_string(c); }

// Exactly one character edit.
inline std::string typo(std::string s, Rng& rng) {
  const auto op = rng.below(3);
  if (op == 1 && s.size() > 1) {
    s.erase(rng.below(s.size()), 1);
  } else if (op == 2) {
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size() + 1)), letter(rng));
  } else {
    auto& c = s[rng.below(s.size())];
    c = static_cast<char>('a' + (c - 'a' + 1 + rng.below(25)) % 26);
  }
  return s;
}

}  // namespace synthetic_detail

inline SyntheticData gen_synthetic_detailed(const SyntheticSpec& spec) {
  using namespace synthetic_detail;
  spec.validate();
  Rng rng(spec.seed);
  SyntheticData out;

  // Distinct pool substrings, none containing another.
  while (out.substrings.size() < spec.pools()) {
    auto s = letters(rng, spec.topic_length);
    bool clash = false;
    for (const auto& t : out.substrings) clash = clash || t.find(s) != std::string::npos || s.find(t) != std::string::npos;
    if (clash) continue;
    out.pool_class.push_back(out.substrings.size() % spec.class_count);
    out.substrings.push_back(std::move(s));
  }

  // Levels; a level must carry exactly its own pool's substring.
  std::set<std::string> seen;
  const auto filler_len = [&] { return spec.filler_min + rng.below(spec.filler_max - spec.filler_min + 1); };
  while (out.levels.size() < spec.n_levels) {
    const std::size_t pool = out.levels.size() % spec.pools();
    const std::string level = letters(rng, filler_len()) + out.substrings[pool] + letters(rng, filler_len());
    bool clash = false;
    for (std::size_t p = 0; p < out.substrings.size(); ++p) {
      if (out.pool_class[p] != out.pool_class[pool] && level.find(out.substrings[p]) != std::string::npos) clash = true;
    }
    if (clash || !seen.insert(level).second) continue;
    out.levels.push_back(level);
    out.level_pool.push_back(pool);
  }

  std::vector<std::size_t> level_of(spec.n_rows);
  for (std::size_t i = 0; i < spec.n_rows; ++i) level_of[i] = i % spec.n_levels;
  rng.shuffle(std::span<std::size_t>(level_of));

  std::vector<Column> cols;
  Column signal{"signal", {}, {}};
  Column label{"label", {}, {}};
  for (const auto l : level_of) {
    std::string cell = out.levels[l];
    if (rng.bernoulli(spec.typo_rate)) cell = typo(std::move(cell), rng);
    signal.cells.push_back(std::move(cell));
    label.cells.push_back(class_name(out.pool_class[out.level_pool[l]]));
  }
  signal.missing.assign(spec.n_rows, 0);
  label.missing.assign(spec.n_rows, 0);
  cols.push_back(std::move(signal));
  for (std::size_t k = 0; k < spec.n_noise_features; ++k) {
    Column noise{"noise_" + std::to_string(k + 1), {}, std::vector<std::uint8_t>(spec.n_rows, 0)};
    for (std::size_t i = 0; i < spec.n_rows; ++i) noise.cells.push_back("n" + std::to_string(rng.below(spec.noise_levels)));
    cols.push_back(std::move(noise));
  }
  cols.push_back(std::move(label));
  out.data = Dataset(std::move(cols), "label");
  return out;
}

inline Dataset gen_synthetic(const SyntheticSpec& spec) { return gen_synthetic_detailed(spec).data; }

}  // namespace dirtyml
