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
#include <span>

#include "dirtyml/error.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

inline constexpr double kProbClip = 1e-15;

inline double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.empty()) throw UsageError("accuracy of empty inputs");
  if (y_true.size() != y_pred.size()) throw UsageError("accuracy inputs differ in length");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hit += y_true[i] == y_pred[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(y_true.size());
}

// Mean negative log of the true-class probability, clipped to
// [1e-15, 1 - 1e-15] before the log.
inline double log_loss(std::span<const int> y_true, const Matrix& proba) {
  if (y_true.empty()) throw UsageError("log_loss of empty inputs");
  if (y_true.size() != proba.rows()) throw UsageError("log_loss inputs differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto c = static_cast<std::size_t>(y_true[i]);
    if (c >= proba.cols()) throw UsageError("label outside probability columns");
    const double p = std::clamp(proba(i, c), kProbClip, 1.0 - kProbClip);
    total -= std::log(p);
  }
  return total / static_cast<double>(y_true.size());
}

// Row-wise argmax; ties go to the lowest class index.
inline std::vector<int> argmax_rows(const Matrix& proba) {
  std::vector<int> out(proba.rows());
  for (std::size_t i = 0; i < proba.rows(); ++i) {
    const auto r = proba.row(i);
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

}  // namespace dirtyml
