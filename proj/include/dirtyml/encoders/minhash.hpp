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
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "dirtyml/error.hpp"
#include "dirtyml/hash.hpp"
#include "dirtyml/ngram.hpp"
#include "dirtyml/random.hpp"

namespace dirtyml {

// Mersenne prime 2^61 - 1.
inline constexpr std::uint64_t kMinHashPrime = (std::uint64_t{1} << 61) - 1;

/// Universal affine family h_j(x) = (a_j * x + b_j) mod p over 64-bit gram
/// hashes reduced mod p.
struct MinHashFamily {
  std::vector<std::uint64_t> a;
  std::vector<std::uint64_t> b;

  std::size_t size() const noexcept { return a.size(); }

  static MinHashFamily draw(std::size_t d, std::uint64_t seed) {
    if (d < 1) throw UsageError("min-hash needs at least one hash function");
    MinHashFamily f;
    f.a.reserve(d);
    f.b.reserve(d);
    Rng rng(seed);
    for (std::size_t j = 0; j < d; ++j) {
      f.a.push_back(1 + rng.below(kMinHashPrime - 1));
      f.b.push_back(rng.below(kMinHashPrime));
    }
    return f;
  }

  bool operator==(const MinHashFamily&) const = default;
};

inline std::uint64_t mulmod_p61(std::uint64_t a, std::uint64_t x, std::uint64_t b) noexcept {
  const unsigned __int128 v = static_cast<unsigned __int128>(a) * x + b;
  return static_cast<std::uint64_t>(v % kMinHashPrime);
}

/// Raw signature: per hash function, the minimum over the level's n-grams.
inline std::vector<std::uint64_t> minhash_raw(std::string_view level, const MinHashFamily& family,
                                              std::size_t n) {
  std::vector<std::uint64_t> sig(family.size(), std::numeric_limits<std::uint64_t>::max());
  std::vector<std::uint64_t> gram_hashes;
  for_each_ngram(level, n, [&](std::string_view g) {
    gram_hashes.push_back(stable_hash64(g) % kMinHashPrime);
  });
  std::sort(gram_hashes.begin(), gram_hashes.end());
  gram_hashes.erase(std::unique(gram_hashes.begin(), gram_hashes.end()), gram_hashes.end());
  for (std::size_t j = 0; j < family.size(); ++j) {
    std::uint64_t m = std::numeric_limits<std::uint64_t>::max();
    for (const auto x : gram_hashes) m = std::min(m, mulmod_p61(family.a[j], x, family.b[j]));
    sig[j] = m;
  }
  return sig;
}

// Signature rescaled into [0, 1) by dividing by the prime.
inline std::vector<double> minhash_signature(std::string_view level, const MinHashFamily& family,
                                             std::size_t n) {
  const auto raw = minhash_raw(level, family, n);
  std::vector<double> out(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = static_cast<double>(raw[j]) / static_cast<double>(kMinHashPrime);
  }
  return out;
}

// Fraction of agreeing components: an unbiased-in-the-limit estimate of the
// Jaccard similarity of the two underlying gram sets.
template <typename T>
double minhash_jaccard_estimate(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size() || a.empty()) throw UsageError("signatures must have equal, nonzero length");
  std::size_t same = 0;
  for (std::size_t j = 0; j < a.size(); ++j) same += a[j] == b[j] ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

}  // namespace dirtyml
