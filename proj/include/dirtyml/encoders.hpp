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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "dirtyml/encoders/gap.hpp"
#include "dirtyml/encoders/minhash.hpp"
#include "dirtyml/encoders/spec.hpp"
#include "dirtyml/error.hpp"
#include "dirtyml/hash.hpp"
#include "dirtyml/labels.hpp"
#include "dirtyml/ngram.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

// ---------------------------------------------------------------------------
// Free-standing pieces of the individual encoders
// ---------------------------------------------------------------------------

inline std::size_t hashing_index(std::string_view level, std::size_t m) {
  if (m < 1) throw UsageError("hashing dims must be >= 1");
  return static_cast<std::size_t>(stable_hash64(level) % m);
}

/// Empirical-Bayes blend lambda * p_i + (1 - lambda) * p0 with
/// lambda = n_i / (n_i + m_s). An unseen level (n_i = 0) gets the prior.
inline double target_blend(double n_i, double p_i, double p0, double m_s) noexcept {
  if (n_i <= 0.0) return p0;
  if (m_s <= 0.0) return p_i;
  const double lambda = n_i / (n_i + m_s);
  return lambda * p_i + (1.0 - lambda) * p0;
}

/// All levels when they fit, else the `max_prototypes` most frequent ones
/// (ties by lexicographic order). Output is in that priority order.
inline std::vector<std::string> similarity_fit_prototypes(
    const std::map<std::string, std::size_t>& level_counts, std::size_t max_prototypes) {
  if (max_prototypes < 1) throw UsageError("max_prototypes must be >= 1");
  std::vector<std::pair<std::string, std::size_t>> v(level_counts.begin(), level_counts.end());
  if (v.size() > max_prototypes) {
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    v.resize(max_prototypes);
  }
  std::vector<std::string> out;
  out.reserve(v.size());
  for (auto& [level, count] : v) out.push_back(std::move(level));
  return out;
}

inline std::vector<double> similarity_transform_row(std::string_view level,
                                                    std::span<const NGramSet> prototype_grams,
                                                    std::size_t n) {
  const auto grams = char_ngrams(level, n);
  std::vector<double> out;
  out.reserve(prototype_grams.size());
  for (const auto& p : prototype_grams) out.push_back(jaccard(grams, p));
  return out;
}

// ---------------------------------------------------------------------------
// Fitted state per kind
// ---------------------------------------------------------------------------

struct OneHotState {
  bool operator==(const OneHotState&) const = default;
};
struct OrdinalState {
  bool operator==(const OrdinalState&) const = default;
};
struct HashingState {
  bool operator==(const HashingState&) const = default;
};

// Blended values per training level (aligned with the encoder's level list)
// and the prior per output column.
struct TargetState {
  std::vector<std::string> classes;
  std::vector<double> prior;
  std::vector<std::vector<double>> values;
  bool operator==(const TargetState&) const = default;
};

struct SimilarityState {
  std::vector<std::string> prototypes;
  bool operator==(const SimilarityState&) const = default;
};

struct MinHashState {
  MinHashFamily family;
  bool operator==(const MinHashState&) const = default;
};

struct GapState {
  std::vector<std::string> vocabulary;
  Matrix topics;  // n_topics x vocabulary
  bool operator==(const GapState&) const = default;
};

using EncoderState = std::variant<OneHotState, OrdinalState, HashingState, TargetState,
                                  SimilarityState, MinHashState, GapState>;

// Level text of row i: the cell, or the dedicated missing level.
inline std::string level_of(const Column& col, std::size_t i) {
  return col.is_missing(i) ? std::string(kMissingLevel) : col.cells[i];
}

/// Immutable result of fitting one encoder to one categorical column.
class FittedEncoder {
 public:
  FittedEncoder(EncoderSpec spec, std::vector<std::string> levels, EncoderState state)
      : spec_(std::move(spec)), levels_(std::move(levels)), state_(std::move(state)) {
    for (std::size_t i = 0; i < levels_.size(); ++i) index_.emplace(levels_[i], i);
    if (index_.size() != levels_.size()) throw FormatError("encoder level list has duplicates");
    if (const auto* s = std::get_if<SimilarityState>(&state_)) {
      for (const auto& p : s->prototypes) proto_grams_.push_back(char_ngrams(prep(p), spec_.gram));
    }
    if (const auto* g = std::get_if<GapState>(&state_)) {
      for (std::size_t j = 0; j < g->vocabulary.size(); ++j) {
        vocab_index_.emplace(g->vocabulary[j], static_cast<std::uint32_t>(j));
      }
      if (g->topics.cols() != g->vocabulary.size()) throw FormatError("GAP topics/vocabulary mismatch");
    }
    width_ = compute_width();
  }

  const EncoderSpec& spec() const noexcept { return spec_; }
  EncoderKind kind() const noexcept { return spec_.kind; }
  const std::vector<std::string>& levels() const noexcept { return levels_; }
  const EncoderState& state() const noexcept { return state_; }
  std::size_t output_width() const noexcept { return width_; }

  std::optional<std::size_t> level_code(std::string_view level) const {
    const auto it = index_.find(std::string(level));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Dense encoding of a single level; unseen levels follow the per-kind
  /// policy (one-hot: zeros, ordinal: n, target: prior, others: computed
  /// from the string).
  std::vector<double> encode_level(std::string_view level) const {
    std::vector<double> out(width_, 0.0);
    const auto code = level_code(level);
    switch (spec_.kind) {
      case EncoderKind::one_hot:
        if (code) out[*code] = 1.0;
        break;
      case EncoderKind::ordinal:
        out[0] = static_cast<double>(code ? *code : levels_.size());
        break;
      case EncoderKind::hashing: out[hashing_index(level, spec_.hashing_dims)] = 1.0; break;
      case EncoderKind::target: {
        const auto& s = std::get<TargetState>(state_);
        out = code ? s.values[*code] : s.prior;
        break;
      }
      case EncoderKind::similarity:
        out = similarity_transform_row(prep(level), proto_grams_, spec_.gram);
        break;
      case EncoderKind::minhash:
        out = minhash_signature(prep(level), std::get<MinHashState>(state_).family, spec_.gram);
        break;
      case EncoderKind::gap: {
        const auto& g = std::get<GapState>(state_);
        const auto counts = count_known_grams(prep(level), spec_.gram, vocab_index_);
        out = gap_solve_activations(counts, g.topics);
        break;
      }
    }
    return out;
  }

  DesignMatrix transform(const Column& col) const {
    const std::size_t n = col.size();
    const std::string encoder(to_string(spec_.kind));
    if (spec_.kind == EncoderKind::one_hot || spec_.kind == EncoderKind::hashing) {
      std::vector<Triplet> entries;
      entries.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto level = level_of(col, i);
        if (spec_.kind == EncoderKind::hashing) {
          entries.push_back({i, hashing_index(level, spec_.hashing_dims), 1.0});
        } else if (const auto code = level_code(level)) {
          entries.push_back({i, *code, 1.0});
        }
      }
      return DesignMatrix::sparse(col.name, encoder, n, width_, std::move(entries));
    }
    Matrix values(n, width_);
    std::unordered_map<std::string, std::vector<double>> cache;
    for (std::size_t i = 0; i < n; ++i) {
      const auto level = level_of(col, i);
      auto it = cache.find(level);
      if (it == cache.end()) it = cache.emplace(level, encode_level(level)).first;
      std::copy(it->second.begin(), it->second.end(), values.row(i).begin());
    }
    return DesignMatrix::dense(col.name, encoder, std::move(values));
  }

 private:
  std::string prep(std::string_view s) const {
    return spec_.fold_case ? ascii_lower(s) : std::string(s);
  }

  std::size_t compute_width() const {
    switch (spec_.kind) {
      case EncoderKind::one_hot: return levels_.size();
      case EncoderKind::ordinal: return 1;
      case EncoderKind::hashing: return spec_.hashing_dims;
      case EncoderKind::target: return std::get<TargetState>(state_).prior.size();
      case EncoderKind::similarity: return std::get<SimilarityState>(state_).prototypes.size();
      case EncoderKind::minhash: return std::get<MinHashState>(state_).family.size();
      case EncoderKind::gap: return std::get<GapState>(state_).topics.rows();
    }
    return 0;
  }

  EncoderSpec spec_;
  std::vector<std::string> levels_;
  EncoderState state_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<NGramSet> proto_grams_;
  std::unordered_map<std::string, std::uint32_t> vocab_index_;
  std::size_t width_ = 0;
};

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

namespace encoder_detail {

inline TargetState fit_target(const EncoderSpec& spec, const Column& col,
                              const std::vector<std::string>& levels, const Labels& labels) {
  if (labels.size() != col.size()) throw DataError("target length does not match column length");
  const std::size_t n_classes = labels.n_classes();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < levels.size(); ++i) index.emplace(levels[i], i);

  std::vector<std::size_t> level_total(levels.size(), 0);
  std::vector<std::vector<std::size_t>> level_class(levels.size(), std::vector<std::size_t>(n_classes, 0));
  std::vector<std::size_t> class_total(n_classes, 0);
  for (std::size_t i = 0; i < col.size(); ++i) {
    const std::size_t l = index.at(level_of(col, i));
    const auto c = static_cast<std::size_t>(labels.y[i]);
    ++level_total[l];
    ++level_class[l][c];
    ++class_total[c];
  }
  // Binary targets encode the probability of the second class only.
  std::vector<std::size_t> out_classes;
  if (n_classes == 2) {
    out_classes = {1};
  } else {
    for (std::size_t c = 0; c < n_classes; ++c) out_classes.push_back(c);
  }
  TargetState s;
  s.classes = labels.classes;
  const double n = static_cast<double>(col.size());
  for (const auto c : out_classes) s.prior.push_back(static_cast<double>(class_total[c]) / n);
  s.values.resize(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const double n_l = static_cast<double>(level_total[l]);
    for (std::size_t o = 0; o < out_classes.size(); ++o) {
      const double p_l = static_cast<double>(level_class[l][out_classes[o]]) / n_l;
      s.values[l].push_back(target_blend(n_l, p_l, s.prior[o], spec.smoothing));
    }
  }
  return s;
}

}  // namespace encoder_detail

/// Fits `spec` to a column. Missing cells are encoded as the level
/// "__MISSING__". `labels` is required for the target kind and ignored by
/// every other kind.
inline FittedEncoder fit(const EncoderSpec& spec, const Column& col,
                         const std::optional<Labels>& labels = std::nullopt) {
  spec.validate();
  if (col.size() == 0) throw DataError("cannot fit an encoder on empty column '" + col.name + "'");
  if (spec.kind == EncoderKind::target && !labels) {
    throw UsageError("target encoding of '" + col.name + "' needs a target");
  }
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < col.size(); ++i) ++counts[level_of(col, i)];
  std::vector<std::string> levels;
  levels.reserve(counts.size());
  for (const auto& [level, c] : counts) levels.push_back(level);

  auto prep = [&](const std::string& s) { return spec.fold_case ? ascii_lower(s) : s; };

  EncoderState state;
  switch (spec.kind) {
    case EncoderKind::one_hot: state = OneHotState{}; break;
    case EncoderKind::ordinal: state = OrdinalState{}; break;
    case EncoderKind::hashing: state = HashingState{}; break;
    case EncoderKind::target:
      state = encoder_detail::fit_target(spec, col, levels, *labels);
      break;
    case EncoderKind::similarity:
      state = SimilarityState{similarity_fit_prototypes(counts, spec.max_prototypes)};
      break;
    case EncoderKind::minhash:
      state = MinHashState{MinHashFamily::draw(spec.n_hashes, spec.seed)};
      break;
    case EncoderKind::gap: {
      std::vector<std::string> texts;
      for (const auto& l : levels) texts.push_back(prep(l));
      std::sort(texts.begin(), texts.end());
      texts.erase(std::unique(texts.begin(), texts.end()), texts.end());
      const auto cm = build_count_matrix(texts, spec.gram);
      GapOptions opts;
      opts.n_topics = spec.n_topics;
      opts.max_iters = spec.max_iters;
      opts.tol = spec.tol;
      opts.seed = spec.seed;
      auto factors = gap_factorize(cm.counts, opts);
      state = GapState{cm.vocabulary, std::move(factors.topics)};
      break;
    }
  }
  return FittedEncoder(spec, std::move(levels), std::move(state));
}

inline DesignMatrix transform(const FittedEncoder& enc, const Column& col) { return enc.transform(col); }

inline std::vector<std::vector<std::string>> gap_topic_terms(const FittedEncoder& enc, std::size_t k) {
  const auto* g = std::get_if<GapState>(&enc.state());
  if (!g) throw UsageError("topic terms require a fitted GAP encoder");
  return gap_topic_terms(g->topics, g->vocabulary, k);
}

}  // namespace dirtyml
