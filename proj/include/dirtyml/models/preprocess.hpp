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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dirtyml/error.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

enum class Imputer { mean, median, mode, none };
enum class Scaler { standard, minmax, none };

inline std::string_view to_string(Imputer i) noexcept {
  switch (i) {
    case Imputer::mean: return "mean";
    case Imputer::median: return "median";
    case Imputer::mode: return "mode";
    case Imputer::none: return "none";
  }
  return "?";
}

inline std::string_view to_string(Scaler s) noexcept {
  switch (s) {
    case Scaler::standard: return "standard";
    case Scaler::minmax: return "minmax";
    case Scaler::none: return "none";
  }
  return "?";
}

inline Imputer parse_imputer(std::string_view s) {
  for (auto i : {Imputer::mean, Imputer::median, Imputer::mode, Imputer::none}) {
    if (to_string(i) == s) return i;
  }
  throw UsageError("unknown imputer '" + std::string(s) + "'");
}

inline Scaler parse_scaler(std::string_view s) {
  for (auto x : {Scaler::standard, Scaler::minmax, Scaler::none}) {
    if (to_string(x) == s) return x;
  }
  throw UsageError("unknown scaler '" + std::string(s) + "'");
}

struct PreprocSpec {
  Imputer imputer = Imputer::mean;
  Scaler scaler = Scaler::none;

  std::string describe() const {
    return "impute=" + std::string(to_string(imputer)) + ";scale=" + std::string(to_string(scaler));
  }
  bool operator==(const PreprocSpec&) const = default;
};

/// Per-column imputation values and affine scaling (x - shift) * factor.
struct FittedPreproc {
  PreprocSpec spec;
  std::vector<double> fill;
  std::vector<double> shift;
  std::vector<double> factor;

  Matrix apply(const Matrix& x) const {
    if (x.cols() != fill.size()) throw UsageError("preprocessor width mismatch");
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
      auto r = out.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) {
        if (std::isnan(r[j]) && spec.imputer != Imputer::none) r[j] = fill[j];
        r[j] = (r[j] - shift[j]) * factor[j];
      }
    }
    return out;
  }
};

namespace preprocess_detail {

inline double imputation_value(std::vector<double> observed, Imputer imputer) {
  if (observed.empty()) return 0.0;
  switch (imputer) {
    case Imputer::mean: {
      double s = 0.0;
      for (const double v : observed) s += v;
      return s / static_cast<double>(observed.size());
    }
    case Imputer::median: {
      std::sort(observed.begin(), observed.end());
      const std::size_t n = observed.size();
      return n % 2 ? observed[n / 2] : 0.5 * (observed[n / 2 - 1] + observed[n / 2]);
    }
    case Imputer::mode: {
      std::map<double, std::size_t> counts;
      for (const double v : observed) ++counts[v];
      double best = counts.begin()->first;
      std::size_t best_n = 0;
      for (const auto& [v, n] : counts) {
        if (n > best_n) best = v, best_n = n;  // ties keep the smallest value
      }
      return best;
    }
    case Imputer::none: return 0.0;
  }
  return 0.0;
}

}  // namespace preprocess_detail

inline FittedPreproc preprocess_fit(const PreprocSpec& spec, const Matrix& x) {
  FittedPreproc f{spec, std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 0.0),
                  std::vector<double>(x.cols(), 1.0)};
  std::vector<double> col;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    col.clear();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (!std::isnan(x(i, j))) col.push_back(x(i, j));
    }
    f.fill[j] = preprocess_detail::imputation_value(col, spec.imputer);
    if (spec.scaler == Scaler::none) continue;
    // Scaling statistics see the imputed column.
    if (spec.imputer != Imputer::none) col.resize(x.rows(), f.fill[j]);
    if (col.empty()) continue;
    if (spec.scaler == Scaler::standard) {
      double mean = 0.0;
      for (const double v : col) mean += v;
      mean /= static_cast<double>(col.size());
      double var = 0.0;
      for (const double v : col) var += (v - mean) * (v - mean);
      var /= static_cast<double>(col.size());
      f.shift[j] = mean;
      f.factor[j] = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
    } else {
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      f.shift[j] = *lo;
      f.factor[j] = *hi > *lo ? 1.0 / (*hi - *lo) : 0.0;
    }
  }
  return f;
}

inline std::pair<FittedPreproc, Matrix> preprocess_fit_transform(const PreprocSpec& spec, const Matrix& x) {
  auto f = preprocess_fit(spec, x);
  auto out = f.apply(x);
  return {std::move(f), std::move(out)};
}

inline std::pair<FittedPreproc, Matrix> preprocess_fit_transform(const PreprocSpec& spec,
                                                                 const DesignMatrix& x) {
  return preprocess_fit_transform(spec, x.to_dense());
}

}  // namespace dirtyml
