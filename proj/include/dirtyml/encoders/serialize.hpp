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

#include <fstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dirtyml/encoders.hpp"
#include "dirtyml/error.hpp"
#include "dirtyml/hash.hpp"
#include "dirtyml/tabular.hpp"

// Versioned JSON container shared by every persisted artifact:
//   {format_version, kind, spec, state, checksum}
// where checksum is FNV-1a 64 (hex) over the compact dump of
// {"kind", "spec", "state"}; nlohmann objects keep keys sorted, which makes
// that dump canonical.

namespace dirtyml {

inline constexpr int kFormatVersion = 1;

struct Container {
  std::string kind;
  nlohmann::json spec;
  nlohmann::json state;
};

inline std::string container_checksum(const Container& c) {
  const nlohmann::json canonical{{"kind", c.kind}, {"spec", c.spec}, {"state", c.state}};
  return to_hex64(fnv1a64(canonical.dump()));
}

inline nlohmann::json to_document(const Container& c) {
  return {{"format_version", kFormatVersion},
          {"kind", c.kind},
          {"spec", c.spec},
          {"state", c.state},
          {"checksum", container_checksum(c)}};
}

inline Container from_document(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("malformed document: not a JSON object");
  for (const char* key : {"format_version", "kind", "spec", "state", "checksum"}) {
    if (!doc.contains(key)) throw FormatError(std::string("malformed document: missing '") + key + "'");
  }
  if (!doc["format_version"].is_number_integer()) throw FormatError("malformed document: bad format_version");
  const auto version = doc["format_version"].get<long long>();
  if (version != kFormatVersion) {
    throw VersionError("unsupported format_version " + std::to_string(version) + " (expected " +
                       std::to_string(kFormatVersion) + ")");
  }
  if (!doc["kind"].is_string() || !doc["checksum"].is_string()) {
    throw FormatError("malformed document: bad kind or checksum field");
  }
  Container c{doc["kind"].get<std::string>(), doc["spec"], doc["state"]};
  if (container_checksum(c) != doc["checksum"].get<std::string>()) {
    throw ChecksumError("checksum mismatch");
  }
  return c;
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file '" + path + "'");
  out << text;
  if (!out) throw DataError("failed writing file '" + path + "'");
}

// ---------------------------------------------------------------------------
// Encoders
// ---------------------------------------------------------------------------

inline Container encoder_container(const FittedEncoder& enc) {
  nlohmann::json state{{"levels", enc.levels()}};
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, TargetState>) {
          state["classes"] = s.classes;
          state["prior"] = s.prior;
          state["values"] = s.values;
        } else if constexpr (std::is_same_v<S, SimilarityState>) {
          state["prototypes"] = s.prototypes;
        } else if constexpr (std::is_same_v<S, MinHashState>) {
          state["a"] = s.family.a;
          state["b"] = s.family.b;
        } else if constexpr (std::is_same_v<S, GapState>) {
          state["vocabulary"] = s.vocabulary;
          state["n_topics"] = s.topics.rows();
          state["topics"] = s.topics.data();
        }
      },
      enc.state());
  return {"encoder", enc.spec().to_json(), std::move(state)};
}

inline FittedEncoder encoder_from_container(const Container& c) {
  if (c.kind != "encoder") throw FormatError("document holds a '" + c.kind + "', not an encoder");
  try {
    const auto spec = EncoderSpec::from_json(c.spec);
    auto levels = c.state.at("levels").get<std::vector<std::string>>();
    EncoderState state;
    switch (spec.kind) {
      case EncoderKind::one_hot: state = OneHotState{}; break;
      case EncoderKind::ordinal: state = OrdinalState{}; break;
      case EncoderKind::hashing: state = HashingState{}; break;
      case EncoderKind::target: {
        TargetState s;
        s.classes = c.state.at("classes").get<std::vector<std::string>>();
        s.prior = c.state.at("prior").get<std::vector<double>>();
        s.values = c.state.at("values").get<std::vector<std::vector<double>>>();
        if (s.values.size() != levels.size()) throw FormatError("target values/levels mismatch");
        for (const auto& v : s.values) {
          if (v.size() != s.prior.size()) throw FormatError("target value width mismatch");
        }
        state = std::move(s);
        break;
      }
      case EncoderKind::similarity:
        state = SimilarityState{c.state.at("prototypes").get<std::vector<std::string>>()};
        break;
      case EncoderKind::minhash: {
        MinHashFamily f{c.state.at("a").get<std::vector<std::uint64_t>>(),
                        c.state.at("b").get<std::vector<std::uint64_t>>()};
        if (f.a.size() != f.b.size() || f.a.empty()) throw FormatError("bad min-hash family");
        state = MinHashState{std::move(f)};
        break;
      }
      case EncoderKind::gap: {
        auto vocab = c.state.at("vocabulary").get<std::vector<std::string>>();
        const auto d = c.state.at("n_topics").get<std::size_t>();
        auto flat = c.state.at("topics").get<std::vector<double>>();
        if (flat.size() != d * vocab.size()) throw FormatError("GAP topic matrix size mismatch");
        const std::size_t width = flat.size() / std::max<std::size_t>(d, 1);
        state = GapState{std::move(vocab), Matrix(d, width, std::move(flat))};
        break;
      }
    }
    return FittedEncoder(spec, std::move(levels), std::move(state));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed encoder state: ") + e.what());
  } catch (const UsageError& e) {
    throw FormatError(std::string("invalid encoder spec: ") + e.what());
  }
}

inline std::string encoder_to_string(const FittedEncoder& enc) {
  return to_document(encoder_container(enc)).dump(1);
}

inline FittedEncoder encoder_from_string(std::string_view text) {
  return encoder_from_container(from_document(text));
}

inline void save_encoder(const FittedEncoder& enc, const std::string& path) {
  write_text_file(path, encoder_to_string(enc));
}

inline FittedEncoder load_encoder(const std::string& path) {
  return encoder_from_string(read_file(path));
}

}  // namespace dirtyml
