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
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dirtyml/error.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

// Class labels as indices into a lexicographically ordered class list.
struct Labels {
  std::vector<std::string> classes;
  std::vector<int> y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t n_classes() const noexcept { return classes.size(); }

  Labels take(std::span<const std::size_t> rows) const {
    Labels out{classes, {}};
    out.y.reserve(rows.size());
    for (const auto r : rows) out.y.push_back(y.at(r));
    return out;
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const int c : y) ++counts[static_cast<std::size_t>(c)];
    return counts;
  }

  std::size_t distinct_present() const {
    const auto counts = class_counts();
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
  }

  bool operator==(const Labels&) const = default;
};

inline Labels make_labels(std::span<const std::string> values) {
  Labels out;
  std::set<std::string> distinct(values.begin(), values.end());
  out.classes.assign(distinct.begin(), distinct.end());
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < out.classes.size(); ++i) index[out.classes[i]] = static_cast<int>(i);
  out.y.reserve(values.size());
  for (const auto& v : values) out.y.push_back(index[v]);
  return out;
}

inline Labels make_labels(const Column& col) {
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col.is_missing(i)) {
      throw DataError("target column '" + col.name + "' has a missing value at row " +
                      std::to_string(i));
    }
  }
  return make_labels(std::span<const std::string>(col.cells));
}

inline Labels target_labels(const Dataset& data) {
  if (!data.target()) throw UsageError("dataset has no target column");
  return make_labels(data.column(*data.target()));
}

}  // namespace dirtyml
