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
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dirtyml/error.hpp"

namespace dirtyml {

// Byte offsets of every UTF-8 scalar start in `s`, plus s.size() as sentinel.
inline std::vector<std::size_t> utf8_boundaries(std::string_view s) {
  std::vector<std::size_t> out;
  out.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) out.push_back(i);
  }
  out.push_back(s.size());
  return out;
}

inline std::size_t utf8_length(std::string_view s) { return utf8_boundaries(s).size() - 1; }

// ASCII-only case fold.
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Visits every contiguous n-scalar substring of `s` in order of appearance.
/// Inputs shorter than n produce the whole string once.
template <typename Fn>
void for_each_ngram(std::string_view s, std::size_t n, Fn&& fn) {
  if (n == 0) throw UsageError("n-gram length must be >= 1");
  if (s.empty()) throw DataError("cannot take n-grams of an empty string");
  const auto bounds = utf8_boundaries(s);
  const std::size_t len = bounds.size() - 1;
  if (len < n) {
    fn(s);
    return;
  }
  for (std::size_t i = 0; i + n <= len; ++i) {
    fn(s.substr(bounds[i], bounds[i + n] - bounds[i]));
  }
}

/// Set of character n-grams, stored sorted and deduplicated.
struct NGramSet {
  std::size_t n = 3;
  std::vector<std::string> grams;

  std::size_t size() const noexcept { return grams.size(); }
  bool contains(std::string_view g) const {
    return std::binary_search(grams.begin(), grams.end(), g);
  }
  bool operator==(const NGramSet&) const = default;
};

inline NGramSet char_ngrams(std::string_view s, std::size_t n = 3) {
  NGramSet out{n, {}};
  for_each_ngram(s, n, [&](std::string_view g) { out.grams.emplace_back(g); });
  std::sort(out.grams.begin(), out.grams.end());
  out.grams.erase(std::unique(out.grams.begin(), out.grams.end()), out.grams.end());
  return out;
}

inline double jaccard(const NGramSet& a, const NGramSet& b) {
  if (a.n != b.n) throw UsageError("jaccard of n-gram sets with different n");
  if (a.grams.empty() && b.grams.empty()) return 1.0;
  std::size_t common = 0;
  auto i = a.grams.begin();
  auto j = b.grams.begin();
  while (i != a.grams.end() && j != b.grams.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  const std::size_t uni = a.grams.size() + b.grams.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

// Compressed sparse row matrix of nonnegative doubles.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return values.size(); }
  std::size_t row_begin(std::size_t r) const noexcept { return row_ptr[r]; }
  std::size_t row_end(std::size_t r) const noexcept { return row_ptr[r + 1]; }

  double sum() const noexcept {
    double s = 0.0;
    for (const double v : values) s += v;
    return s;
  }

  double at(std::size_t r, std::size_t c) const noexcept {
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] == c) return values[k];
    }
    return 0.0;
  }

  void push_row(std::span<const std::pair<std::uint32_t, double>> entries) {
    for (const auto& [c, v] : entries) {
      col_idx.push_back(c);
      values.push_back(v);
    }
    row_ptr.push_back(values.size());
    ++rows;
  }

  static CsrMatrix from_dense(std::size_t rows, std::size_t cols, std::span<const double> dense) {
    CsrMatrix m;
    m.cols = cols;
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t r = 0; r < rows; ++r) {
      row.clear();
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = dense[r * cols + c];
        if (v != 0.0) row.emplace_back(static_cast<std::uint32_t>(c), v);
      }
      m.push_row(row);
    }
    return m;
  }

  bool operator==(const CsrMatrix&) const = default;
};

/// Level-by-n-gram occurrence counts. Vocabulary order is first appearance
/// scanning levels in order, then grams left to right.
struct CountMatrix {
  std::size_t n = 3;
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::uint32_t> vocab_index;
  std::vector<std::string> levels;
  std::unordered_map<std::string, std::size_t> level_index;
  CsrMatrix counts;
};

// (vocabulary column, count) pairs of `s` against a fixed vocabulary; grams
// outside the vocabulary are dropped. Columns appear in first-seen order.
inline std::vector<std::pair<std::uint32_t, double>> count_known_grams(
    std::string_view s, std::size_t n,
    const std::unordered_map<std::string, std::uint32_t>& vocab_index) {
  std::vector<std::pair<std::uint32_t, double>> row;
  for_each_ngram(s, n, [&](std::string_view g) {
    const auto it = vocab_index.find(std::string(g));
    if (it == vocab_index.end()) return;
    auto pos = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == it->second; });
    if (pos == row.end()) {
      row.emplace_back(it->second, 1.0);
    } else {
      pos->second += 1.0;
    }
  });
  return row;
}

inline CountMatrix build_count_matrix(std::span<const std::string> levels, std::size_t n = 3) {
  if (levels.empty()) throw DataError("count matrix needs at least one level");
  CountMatrix cm;
  cm.n = n;
  cm.counts.cols = 0;
  std::vector<std::pair<std::uint32_t, double>> row;
  for (const auto& level : levels) {
    if (!cm.level_index.emplace(level, cm.levels.size()).second) {
      throw DataError("duplicate level '" + level + "' in count matrix input");
    }
    cm.levels.push_back(level);
    row.clear();
    for_each_ngram(level, n, [&](std::string_view g) {
      auto [it, inserted] =
          cm.vocab_index.emplace(std::string(g), static_cast<std::uint32_t>(cm.vocabulary.size()));
      if (inserted) cm.vocabulary.emplace_back(g);
      auto pos = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == it->second; });
      if (pos == row.end()) {
        row.emplace_back(it->second, 1.0);
      } else {
        pos->second += 1.0;
      }
    });
    cm.counts.push_row(row);
  }
  cm.counts.cols = cm.vocabulary.size();
  return cm;
}

}  // namespace dirtyml
