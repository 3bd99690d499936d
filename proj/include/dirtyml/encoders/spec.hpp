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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dirtyml/error.hpp"

namespace dirtyml {

enum class EncoderKind { one_hot, ordinal, hashing, target, similarity, minhash, gap };

inline constexpr EncoderKind kAllEncoderKinds[] = {
    EncoderKind::one_hot,    EncoderKind::ordinal, EncoderKind::hashing, EncoderKind::target,
    EncoderKind::similarity, EncoderKind::minhash, EncoderKind::gap};

inline std::string_view to_string(EncoderKind k) noexcept {
  switch (k) {
    case EncoderKind::one_hot: return "one_hot";
    case EncoderKind::ordinal: return "ordinal";
    case EncoderKind::hashing: return "hashing";
    case EncoderKind::target: return "target";
    case EncoderKind::similarity: return "similarity";
    case EncoderKind::minhash: return "minhash";
    case EncoderKind::gap: return "gap";
  }
  return "unknown";
}

inline EncoderKind parse_encoder_kind(std::string_view s) {
  for (const auto k : kAllEncoderKinds) {
    if (to_string(k) == s) return k;
  }
  throw UsageError("unknown encoder kind '" + std::string(s) + "'");
}

inline bool is_morphological(EncoderKind k) noexcept {
  return k == EncoderKind::similarity || k == EncoderKind::minhash || k == EncoderKind::gap;
}

// Label given to missing cells before any encoder sees them.
inline constexpr std::string_view kMissingLevel = "__MISSING__";

/// Encoder kind plus hyperparameters. Only the fields relevant to `kind` are
/// serialized or compared by the encoders.
struct EncoderSpec {
  EncoderKind kind = EncoderKind::one_hot;
  std::size_t hashing_dims = 64;
  double smoothing = 10.0;
  std::size_t max_prototypes = 100;
  std::size_t n_hashes = 30;
  std::size_t gram = 3;
  std::size_t n_topics = 30;
  std::size_t max_iters = 100;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  bool fold_case = false;

  static EncoderSpec one_hot() { return {EncoderKind::one_hot}; }
  static EncoderSpec ordinal() { return {EncoderKind::ordinal}; }
  static EncoderSpec hashing(std::size_t dims) {
    EncoderSpec s{EncoderKind::hashing};
    s.hashing_dims = dims;
    return s;
  }
  static EncoderSpec target(double smoothing = 10.0) {
    EncoderSpec s{EncoderKind::target};
    s.smoothing = smoothing;
    return s;
  }
  static EncoderSpec similarity(std::size_t max_prototypes = 100, std::size_t gram = 3) {
    EncoderSpec s{EncoderKind::similarity};
    s.max_prototypes = max_prototypes;
    s.gram = gram;
    return s;
  }
  static EncoderSpec minhash(std::size_t n_hashes = 30, std::size_t gram = 3, std::uint64_t seed = 0) {
    EncoderSpec s{EncoderKind::minhash};
    s.n_hashes = n_hashes;
    s.gram = gram;
    s.seed = seed;
    return s;
  }
  static EncoderSpec gap(std::size_t n_topics = 30, std::size_t gram = 3, std::size_t max_iters = 100,
                         double tol = 1e-4, std::uint64_t seed = 0) {
    EncoderSpec s{EncoderKind::gap};
    s.n_topics = n_topics;
    s.gram = gram;
    s.max_iters = max_iters;
    s.tol = tol;
    s.seed = seed;
    return s;
  }

  void validate() const {
    auto positive = [](std::size_t v, const char* what) {
      if (v < 1) throw UsageError(std::string(what) + " must be >= 1");
    };
    switch (kind) {
      case EncoderKind::hashing: positive(hashing_dims, "hashing dims"); break;
      case EncoderKind::target:
        if (!(smoothing >= 0.0)) throw UsageError("target smoothing must be >= 0");
        break;
      case EncoderKind::similarity:
        positive(max_prototypes, "max_prototypes");
        positive(gram, "gram length");
        break;
      case EncoderKind::minhash:
        positive(n_hashes, "n_hashes");
        positive(gram, "gram length");
        break;
      case EncoderKind::gap:
        positive(n_topics, "n_topics");
        positive(gram, "gram length");
        positive(max_iters, "max_iters");
        if (!(tol > 0.0)) throw UsageError("tol must be > 0");
        break;
      default: break;
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"kind", std::string(to_string(kind))}};
    switch (kind) {
      case EncoderKind::hashing: j["dims"] = hashing_dims; break;
      case EncoderKind::target: j["smoothing"] = smoothing; break;
      case EncoderKind::similarity:
        j["max_prototypes"] = max_prototypes;
        j["gram"] = gram;
        j["fold_case"] = fold_case;
        break;
      case EncoderKind::minhash:
        j["n_hashes"] = n_hashes;
        j["gram"] = gram;
        j["seed"] = seed;
        j["fold_case"] = fold_case;
        break;
      case EncoderKind::gap:
        j["n_topics"] = n_topics;
        j["gram"] = gram;
        j["max_iters"] = max_iters;
        j["tol"] = tol;
        j["seed"] = seed;
        j["fold_case"] = fold_case;
        break;
      default: break;
    }
    return j;
  }

  static EncoderSpec from_json(const nlohmann::json& j) {
    EncoderSpec s;
    s.kind = parse_encoder_kind(j.at("kind").get<std::string>());
    s.hashing_dims = j.value("dims", s.hashing_dims);
    s.smoothing = j.value("smoothing", s.smoothing);
    s.max_prototypes = j.value("max_prototypes", s.max_prototypes);
    s.n_hashes = j.value("n_hashes", s.n_hashes);
    s.gram = j.value("gram", s.gram);
    s.n_topics = j.value("n_topics", s.n_topics);
    s.max_iters = j.value("max_iters", s.max_iters);
    s.tol = j.value("tol", s.tol);
    s.seed = j.value("seed", s.seed);
    s.fold_case = j.value("fold_case", s.fold_case);
    s.validate();
    return s;
  }

  // Compact human-readable form, e.g. "gap(d=30,n=3)".
  std::string describe() const {
    const std::string name(to_string(kind));
    switch (kind) {
      case EncoderKind::hashing: return name + "(m=" + std::to_string(hashing_dims) + ")";
      case EncoderKind::target: {
        nlohmann::json v = smoothing;
        return name + "(m_s=" + v.dump() + ")";
      }
      case EncoderKind::similarity:
        return name + "(p=" + std::to_string(max_prototypes) + ",n=" + std::to_string(gram) + ")";
      case EncoderKind::minhash:
        return name + "(d=" + std::to_string(n_hashes) + ",n=" + std::to_string(gram) + ")";
      case EncoderKind::gap:
        return name + "(d=" + std::to_string(n_topics) + ",n=" + std::to_string(gram) + ")";
      default: return name;
    }
  }

  bool operator==(const EncoderSpec& o) const { return to_json() == o.to_json(); }
};

}  // namespace dirtyml
