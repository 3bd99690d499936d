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
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dirtyml/error.hpp"
#include "dirtyml/parallel.hpp"
#include "dirtyml/random.hpp"
#include "dirtyml/tabular.hpp"

namespace dirtyml {

enum class ModelFamily { logistic_regression, bernoulli_nb, decision_tree, random_forest };

inline constexpr ModelFamily kAllModelFamilies[] = {
    ModelFamily::logistic_regression, ModelFamily::bernoulli_nb, ModelFamily::decision_tree,
    ModelFamily::random_forest};

inline std::string_view to_string(ModelFamily f) noexcept {
  switch (f) {
    case ModelFamily::logistic_regression: return "logistic_regression";
    case ModelFamily::bernoulli_nb: return "bernoulli_nb";
    case ModelFamily::decision_tree: return "decision_tree";
    case ModelFamily::random_forest: return "random_forest";
  }
  return "?";
}

inline ModelFamily parse_model_family(std::string_view s) {
  for (const auto f : kAllModelFamilies) {
    if (to_string(f) == s) return f;
  }
  throw UsageError("unknown model family '" + std::string(s) + "'");
}

inline bool is_tree_based(ModelFamily f) noexcept {
  return f == ModelFamily::decision_tree || f == ModelFamily::random_forest;
}

/// Classifier family and hyperparameters. max_depth 0 means unlimited;
/// max_features 0 means sqrt(width) features per split.
struct ModelSpec {
  ModelFamily family = ModelFamily::logistic_regression;
  double l2 = 1e-4;
  double learning_rate = 0.1;
  std::size_t epochs = 200;
  double alpha = 1.0;
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  std::size_t n_trees = 50;
  double max_features = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  std::string describe() const {
    auto num = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", v);
      return std::string(buf);
    };
    auto depth = [&] { return max_depth == 0 ? std::string("none") : std::to_string(max_depth); };
    switch (family) {
      case ModelFamily::logistic_regression:
        return "l2=" + num(l2) + ";lr=" + num(learning_rate) + ";epochs=" + std::to_string(epochs);
      case ModelFamily::bernoulli_nb: return "alpha=" + num(alpha);
      case ModelFamily::decision_tree:
        return "max_depth=" + depth() + ";min_samples_split=" + std::to_string(min_samples_split);
      case ModelFamily::random_forest:
        return "n_trees=" + std::to_string(n_trees) + ";max_depth=" + depth() +
               ";max_features=" + (max_features == 0.0 ? std::string("sqrt") : num(max_features));
    }
    return {};
  }

  bool operator==(const ModelSpec& o) const {
    return family == o.family && describe() == o.describe() && seed == o.seed;
  }
};

namespace model_detail {

inline void check_training_data(const Matrix& x, std::span<const int> y, std::size_t n_classes) {
  if (x.rows() == 0 || x.cols() == 0) throw DataError("cannot fit a model on an empty matrix");
  if (y.size() != x.rows()) throw UsageError("label count does not match matrix rows");
  std::vector<std::size_t> seen(n_classes, 0);
  for (const int c : y) {
    if (c < 0 || static_cast<std::size_t>(c) >= n_classes) throw UsageError("label out of range");
    ++seen[static_cast<std::size_t>(c)];
  }
  if (std::count_if(seen.begin(), seen.end(), [](std::size_t s) { return s > 0; }) < 2) {
    throw DataError("training labels contain a single class");
  }
  for (const double v : x.data()) {
    if (!std::isfinite(v)) throw DataError("model input contains non-finite values");
  }
}

inline void check_width(const Matrix& x, std::size_t width) {
  if (x.cols() != width) {
    throw UsageError("input width " + std::to_string(x.cols()) + " does not match trained width " +
                     std::to_string(width));
  }
}

inline void softmax_inplace(std::span<double> z) noexcept {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (auto& v : z) v /= s;
}

}  // namespace model_detail

// ---------------------------------------------------------------------------
// Multinomial logistic regression
// ---------------------------------------------------------------------------

/// Softmax regression trained by full-batch gradient descent on the
/// L2-regularized mean cross-entropy.
class LogisticRegression {
 public:
  LogisticRegression() = default;
  LogisticRegression(std::size_t n_classes, std::size_t width)
      : n_classes_(n_classes), width_(width), weights_(n_classes, width, 0.0), bias_(n_classes, 0.0) {}

  static LogisticRegression fit(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                                std::size_t n_classes) {
    model_detail::check_training_data(x, y, n_classes);
    LogisticRegression m(n_classes, x.cols());
    const std::size_t n = x.rows(), p = x.cols(), c = n_classes;

    // Rows are stored as offsets from each column's most common value, so
    // one-hot and hashing blocks stay cheap even after scaling shifts them.
    std::vector<double> base(p, 0.0);
    std::vector<double> col(n);
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = x(i, j);
      std::sort(col.begin(), col.end());
      std::size_t best = 0;
      for (std::size_t i = 0; i < n;) {
        std::size_t e = i;
        while (e < n && col[e] == col[i]) ++e;
        if (e - i > best) base[j] = col[i], best = e - i;  // ties keep the smallest value
        i = e;
      }
    }
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = x.row(i);
      for (std::size_t j = 0; j < p; ++j) {
        if (r[j] != base[j]) rows[i].emplace_back(static_cast<std::uint32_t>(j), r[j] - base[j]);
      }
    }

    Matrix grad(c, p);
    std::vector<double> grad_b(c), z(c), offset(c);
    for (std::size_t epoch = 0; epoch <= spec.epochs; ++epoch) {
      std::fill(grad.data().begin(), grad.data().end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (std::size_t k = 0; k < c; ++k) {
        double o = m.bias_[k];
        const auto w = m.weights_.row(k);
        for (std::size_t j = 0; j < p; ++j) o += w[j] * base[j];
        offset[k] = o;
      }
      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < c; ++k) {
          double s = offset[k];
          const auto w = m.weights_.row(k);
          for (const auto& [j, v] : rows[i]) s += w[j] * v;
          z[k] = s;
        }
        model_detail::softmax_inplace(z);
        const auto yi = static_cast<std::size_t>(y[i]);
        loss -= std::log(std::max(z[yi], 1e-300));
        for (std::size_t k = 0; k < c; ++k) {
          const double diff = z[k] - (k == yi ? 1.0 : 0.0);
          grad_b[k] += diff;
          auto g = grad.row(k);
          for (const auto& [j, v] : rows[i]) g[j] += diff * v;
        }
      }
      for (std::size_t k = 0; k < c; ++k) {
        auto g = grad.row(k);
        for (std::size_t j = 0; j < p; ++j) g[j] += grad_b[k] * base[j];
      }
      double penalty = 0.0;
      for (const double w : m.weights_.data()) penalty += w * w;
      m.loss_history_.push_back(loss / static_cast<double>(n) + 0.5 * spec.l2 * penalty);
      if (epoch == spec.epochs) break;

      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t k = 0; k < c; ++k) {
        auto w = m.weights_.row(k);
        const auto g = grad.row(k);
        for (std::size_t j = 0; j < p; ++j) w[j] -= spec.learning_rate * (g[j] * inv_n + spec.l2 * w[j]);
        m.bias_[k] -= spec.learning_rate * grad_b[k] * inv_n;
      }
      if (!std::isfinite(m.loss_history_.back())) throw DataError("logistic regression diverged");
    }
    for (const double w : m.weights_.data()) {
      if (!std::isfinite(w)) throw DataError("logistic regression diverged");
    }
    return m;
  }

  Matrix predict_proba(const Matrix& x) const {
    model_detail::check_width(x, width_);
    Matrix out(x.rows(), n_classes_);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto z = out.row(i);
      const auto r = x.row(i);
      for (std::size_t k = 0; k < n_classes_; ++k) {
        double s = bias_[k];
        const auto w = weights_.row(k);
        for (std::size_t j = 0; j < width_; ++j) s += w[j] * r[j];
        z[k] = s;
      }
      model_detail::softmax_inplace(z);
    }
    return out;
  }

  std::size_t n_classes() const noexcept { return n_classes_; }
  const Matrix& weights() const noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  // Objective value before each update, then after the last one.
  const std::vector<double>& loss_history() const noexcept { return loss_history_; }

 private:
  std::size_t n_classes_ = 0;
  std::size_t width_ = 0;
  Matrix weights_;
  std::vector<double> bias_;
  std::vector<double> loss_history_;
};

// ---------------------------------------------------------------------------
// Bernoulli naive Bayes
// ---------------------------------------------------------------------------

inline constexpr double kBinarizeThreshold = 0.5;

class BernoulliNB {
 public:
  static BernoulliNB fit(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                         std::size_t n_classes) {
    model_detail::check_training_data(x, y, n_classes);
    if (!(spec.alpha > 0.0)) throw UsageError("naive Bayes alpha must be > 0");
    BernoulliNB m;
    m.width_ = x.cols();
    std::vector<double> class_n(n_classes, 0.0);
    Matrix ones(n_classes, x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto c = static_cast<std::size_t>(y[i]);
      class_n[c] += 1.0;
      const auto r = x.row(i);
      auto o = ones.row(c);
      for (std::size_t j = 0; j < r.size(); ++j) o[j] += r[j] > kBinarizeThreshold ? 1.0 : 0.0;
    }
    m.log_prior_.resize(n_classes);
    m.log_p_ = Matrix(n_classes, x.cols());
    m.log_q_ = Matrix(n_classes, x.cols());
    for (std::size_t c = 0; c < n_classes; ++c) {
      m.log_prior_[c] = std::log(class_n[c] / static_cast<double>(x.rows()));
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double p = (ones(c, j) + spec.alpha) / (class_n[c] + 2.0 * spec.alpha);
        m.log_p_(c, j) = std::log(p);
        m.log_q_(c, j) = std::log1p(-p);
      }
    }
    return m;
  }

  Matrix predict_proba(const Matrix& x) const {
    model_detail::check_width(x, width_);
    const std::size_t c = log_prior_.size();
    Matrix out(x.rows(), c);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto r = x.row(i);
      auto z = out.row(i);
      for (std::size_t k = 0; k < c; ++k) {
        double s = log_prior_[k];
        for (std::size_t j = 0; j < width_; ++j) s += r[j] > kBinarizeThreshold ? log_p_(k, j) : log_q_(k, j);
        z[k] = s;
      }
      model_detail::softmax_inplace(z);
    }
    return out;
  }

 private:
  std::size_t width_ = 0;
  std::vector<double> log_prior_;
  Matrix log_p_;
  Matrix log_q_;
};

// ---------------------------------------------------------------------------
// Decision tree (greedy Gini)
// ---------------------------------------------------------------------------

struct TreeParams {
  std::size_t max_depth = 0;
  std::size_t min_samples_split = 2;
  // Features tried per split; 0 = all.
  std::size_t features_per_split = 0;
};

/// Column layout shared by all trees grown on one matrix. Columns with at
/// most 255 distinct values (one-hot, hashing, ordinal, and their scaled
/// versions) store a code per row plus the rows off the most common value,
/// so split search on them is a histogram over whichever of the node and
/// the off-base rows is smaller instead of a sort over the node.
struct ColumnIndex {
  static constexpr std::size_t kMaxCodes = 255;

  struct Discrete {
    std::vector<double> values;  // sorted distinct values
    std::uint8_t base = 0;       // code of the most common value
    std::vector<std::uint8_t> codes;
    std::vector<std::uint32_t> off_base;
  };
  std::vector<std::optional<Discrete>> columns;

  explicit ColumnIndex(const Matrix& x) : columns(x.cols()) {
    std::vector<double> seen;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      seen.clear();
      bool ok = true;
      for (std::size_t i = 0; i < x.rows() && ok; ++i) {
        const double v = x(i, j);
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
          seen.push_back(v);
          ok = seen.size() <= kMaxCodes;
        }
      }
      if (!ok || seen.size() < 2) continue;
      Discrete d;
      d.values = seen;
      std::sort(d.values.begin(), d.values.end());
      d.codes.resize(x.rows());
      std::vector<std::size_t> freq(d.values.size(), 0);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto code = std::lower_bound(d.values.begin(), d.values.end(), x(i, j)) - d.values.begin();
        d.codes[i] = static_cast<std::uint8_t>(code);
        ++freq[static_cast<std::size_t>(code)];
      }
      d.base = static_cast<std::uint8_t>(std::max_element(freq.begin(), freq.end()) - freq.begin());
      for (std::size_t i = 0; i < x.rows(); ++i) {
        if (d.codes[i] != d.base) d.off_base.push_back(static_cast<std::uint32_t>(i));
      }
      columns[j] = std::move(d);
    }
  }
};

class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
  };

  /// Grows a tree where row i carries weight `weights[i]` (bootstrap
  /// multiplicity; 0 = not sampled). Splits are x <= threshold, with the
  /// threshold halfway between consecutive distinct values.
  static DecisionTree fit(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                          std::span<const std::uint32_t> weights, const TreeParams& params,
                          const ColumnIndex& index, Rng& rng) {
    DecisionTree t;
    t.n_classes_ = n_classes;
    t.width_ = x.cols();
    t.importance_.assign(x.cols(), 0.0);

    std::vector<std::uint32_t> rows;
    double n_root = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0) {
        rows.push_back(static_cast<std::uint32_t>(i));
        n_root += weights[i];
      }
    }
    // Node that currently owns each row.
    std::vector<std::uint32_t> node_of(x.rows(), 0);

    struct Work {
      std::uint32_t node;
      std::size_t begin, end, depth;
    };
    std::vector<Work> stack{{0, 0, rows.size(), 0}};
    t.nodes_.emplace_back();
    t.values_.resize(n_classes);

    std::vector<std::size_t> features(x.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t mtry =
        params.features_per_split == 0 ? x.cols() : std::min(params.features_per_split, x.cols());
    struct Item {
      double value;
      int label;
      double weight;
    };
    std::vector<Item> buf;
    std::vector<double> counts(n_classes), left(n_classes), hist;

    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      std::fill(counts.begin(), counts.end(), 0.0);
      for (std::size_t s = w.begin; s < w.end; ++s) {
        counts[static_cast<std::size_t>(y[rows[s]])] += weights[rows[s]];
      }
      const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
      double* value = t.values_.data() + static_cast<std::size_t>(w.node) * n_classes;
      for (std::size_t k = 0; k < n_classes; ++k) value[k] = counts[k] / n;

      const double parent_gini = gini(counts, n);
      const bool depth_ok = params.max_depth == 0 || w.depth < params.max_depth;
      if (!depth_ok || n < static_cast<double>(params.min_samples_split) || parent_gini <= 0.0) continue;

      if (mtry < x.cols()) {
        for (std::size_t i = 0; i < mtry; ++i) {
          const auto j = i + static_cast<std::size_t>(rng.below(x.cols() - i));
          std::swap(features[i], features[j]);
        }
      }
      // Impure nodes take the best valid split even at zero gain (XOR needs
      // one at the root).
      double best_gain = -std::numeric_limits<double>::infinity();
      std::int32_t best_feature = -1;
      double best_threshold = 0.0;
      auto consider = [&](std::size_t f, double threshold, double nl) {
        const double nr = n - nl;
        double sl = 0.0, sr = 0.0;
        for (std::size_t k = 0; k < n_classes; ++k) {
          sl += left[k] * left[k];
          const double r = counts[k] - left[k];
          sr += r * r;
        }
        const double gain = parent_gini - (nl - sl / nl + nr - sr / nr) / n;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = threshold;
        }
      };

      for (std::size_t fi = 0; fi < mtry; ++fi) {
        const std::size_t f = features[fi];
        if (const auto& d = index.columns[f]) {
          const std::size_t n_codes = d->values.size();
          hist.assign(n_codes * n_classes, 0.0);
          auto add = [&](std::uint32_t r) { hist[d->codes[r] * n_classes + static_cast<std::size_t>(y[r])] += weights[r]; };
          if (d->off_base.size() < w.end - w.begin) {
            for (const auto r : d->off_base) {
              if (weights[r] != 0 && node_of[r] == w.node) add(r);
            }
            // The base value takes whatever the off-base rows leave.
            double* b = hist.data() + d->base * n_classes;
            for (std::size_t k = 0; k < n_classes; ++k) {
              double other = 0.0;
              for (std::size_t c = 0; c < n_codes; ++c) {
                if (c != d->base) other += hist[c * n_classes + k];
              }
              b[k] = counts[k] - other;
            }
          } else {
            for (std::size_t s = w.begin; s < w.end; ++s) add(rows[s]);
          }
          // Same thresholds as the sorted scan: midpoints between
          // consecutive values present in the node.
          std::fill(left.begin(), left.end(), 0.0);
          double nl = 0.0;
          std::optional<std::size_t> prev;
          for (std::size_t c = 0; c < n_codes; ++c) {
            const double* h = hist.data() + c * n_classes;
            double hn = 0.0;
            for (std::size_t k = 0; k < n_classes; ++k) hn += h[k];
            if (hn <= 0.0) continue;
            if (prev) {
              const double lo = d->values[*prev], hi = d->values[c];
              consider(f, lo + (hi - lo) / 2.0, nl);
            }
            for (std::size_t k = 0; k < n_classes; ++k) left[k] += h[k];
            nl += hn;
            prev = c;
          }
          continue;
        }
        buf.clear();
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t s = w.begin; s < w.end; ++s) {
          const double v = x(rows[s], f);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          buf.push_back({v, y[rows[s]], static_cast<double>(weights[rows[s]])});
        }
        if (lo == hi) continue;
        std::sort(buf.begin(), buf.end(), [](const Item& a, const Item& b) {
          return a.value < b.value || (a.value == b.value && a.label < b.label);
        });
        std::fill(left.begin(), left.end(), 0.0);
        double nl = 0.0;
        for (std::size_t i = 0; i + 1 < buf.size(); ++i) {
          left[static_cast<std::size_t>(buf[i].label)] += buf[i].weight;
          nl += buf[i].weight;
          if (buf[i].value == buf[i + 1].value) continue;
          consider(f, buf[i].value + (buf[i + 1].value - buf[i].value) / 2.0, nl);
        }
      }
      if (best_feature < 0) continue;

      const auto bf = static_cast<std::size_t>(best_feature);
      t.importance_[bf] += n / n_root * std::max(best_gain, 0.0);
      const auto mid = std::stable_partition(
          rows.begin() + static_cast<std::ptrdiff_t>(w.begin), rows.begin() + static_cast<std::ptrdiff_t>(w.end),
          [&](std::uint32_t r) { return x(r, bf) <= best_threshold; });
      const auto split = static_cast<std::size_t>(mid - rows.begin());
      const auto l = static_cast<std::uint32_t>(t.nodes_.size());
      for (std::size_t s = w.begin; s < w.end; ++s) node_of[rows[s]] = s < split ? l : l + 1;
      t.nodes_.emplace_back();
      t.nodes_.emplace_back();
      t.values_.resize(t.nodes_.size() * n_classes);
      auto& node = t.nodes_[w.node];
      node.feature = best_feature;
      node.threshold = best_threshold;
      node.left = l;
      node.right = l + 1;
      stack.push_back({l + 1, split, w.end, w.depth + 1});
      stack.push_back({l, w.begin, split, w.depth + 1});
    }
    return t;
  }

  static DecisionTree fit(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                          std::size_t n_classes) {
    model_detail::check_training_data(x, y, n_classes);
    const std::vector<std::uint32_t> weights(x.rows(), 1);
    const ColumnIndex index(x);
    Rng rng(spec.seed);
    return fit(x, y, n_classes, weights, {spec.max_depth, spec.min_samples_split, 0}, index, rng);
  }

  std::span<const double> leaf_proba(std::span<const double> row) const {
    std::uint32_t i = 0;
    while (nodes_[i].feature >= 0) {
      i = row[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left
                                                                                   : nodes_[i].right;
    }
    return {values_.data() + static_cast<std::size_t>(i) * n_classes_, n_classes_};
  }

  Matrix predict_proba(const Matrix& x) const {
    model_detail::check_width(x, width_);
    Matrix out(x.rows(), n_classes_);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto p = leaf_proba(x.row(i));
      std::copy(p.begin(), p.end(), out.row(i).begin());
    }
    return out;
  }

  // Unnormalized mean decrease in Gini impurity per feature.
  const std::vector<double>& importance() const noexcept { return importance_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  std::size_t depth() const {
    std::size_t best = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> st{{0, 0}};
    while (!st.empty()) {
      auto [i, d] = st.back();
      st.pop_back();
      best = std::max(best, d);
      if (nodes_[i].feature >= 0) {
        st.emplace_back(nodes_[i].left, d + 1);
        st.emplace_back(nodes_[i].right, d + 1);
      }
    }
    return best;
  }

 private:
  static double gini(std::span<const double> counts, double n) noexcept {
    double s = 0.0;
    for (const double c : counts) s += c * c;
    return 1.0 - s / (n * n);
  }

  std::size_t n_classes_ = 0;
  std::size_t width_ = 0;
  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> importance_;
};

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

/// Bagged Gini trees. Tree t draws its bootstrap sample and per-split feature
/// subsets from a generator seeded with seed + t, so fits are identical for
/// any thread count.
class RandomForest {
 public:
  static RandomForest fit(const ModelSpec& spec, const Matrix& x, std::span<const int> y,
                          std::size_t n_classes) {
    model_detail::check_training_data(x, y, n_classes);
    if (spec.n_trees < 1) throw UsageError("forest needs at least one tree");
    RandomForest f;
    f.n_classes_ = n_classes;
    f.width_ = x.cols();
    const std::size_t p = x.cols();
    std::size_t mtry = spec.max_features > 0.0
                           ? static_cast<std::size_t>(std::ceil(spec.max_features * static_cast<double>(p)))
                           : static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p))));
    mtry = std::clamp<std::size_t>(mtry, 1, p);
    const TreeParams params{spec.max_depth, spec.min_samples_split, mtry};
    const ColumnIndex index(x);
    f.trees_.resize(spec.n_trees);
    parallel_for(spec.n_trees, spec.threads, [&](std::size_t t) {
      Rng rng(spec.seed + t);
      std::vector<std::uint32_t> weights(x.rows(), 0);
      for (std::size_t i = 0; i < x.rows(); ++i) ++weights[rng.below(x.rows())];
      f.trees_[t] = DecisionTree::fit(x, y, n_classes, weights, params, index, rng);
    });
    return f;
  }

  Matrix predict_proba(const Matrix& x) const {
    model_detail::check_width(x, width_);
    Matrix out(x.rows(), n_classes_, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto o = out.row(i);
      for (const auto& t : trees_) {
        const auto p = t.leaf_proba(x.row(i));
        for (std::size_t k = 0; k < n_classes_; ++k) o[k] += p[k];
      }
      for (auto& v : o) v /= static_cast<double>(trees_.size());
    }
    return out;
  }

  // Impurity decrease summed over trees, normalized to sum to 1 (uniform if
  // no tree ever split).
  std::vector<double> feature_importance() const {
    std::vector<double> imp(width_, 0.0);
    for (const auto& t : trees_) {
      for (std::size_t j = 0; j < width_; ++j) imp[j] += t.importance()[j];
    }
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    for (auto& v : imp) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(width_);
    return imp;
  }

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  std::size_t n_classes_ = 0;
  std::size_t width_ = 0;
  std::vector<DecisionTree> trees_;
};

// ---------------------------------------------------------------------------
// Uniform model handle
// ---------------------------------------------------------------------------

class Model {
 public:
  using Impl = std::variant<LogisticRegression, BernoulliNB, DecisionTree, RandomForest>;

  Model(ModelSpec spec, Impl impl) : spec_(std::move(spec)), impl_(std::move(impl)) {}

  const ModelSpec& spec() const noexcept { return spec_; }
  ModelFamily family() const noexcept { return spec_.family; }
  const Impl& impl() const noexcept { return impl_; }

  Matrix predict_proba(const Matrix& x) const {
    return std::visit([&](const auto& m) { return m.predict_proba(x); }, impl_);
  }

 private:
  ModelSpec spec_;
  Impl impl_;
};

inline Model fit_model(const ModelSpec& spec, const Matrix& x, std::span<const int> y, std::size_t n_classes) {
  switch (spec.family) {
    case ModelFamily::logistic_regression:
      return {spec, LogisticRegression::fit(spec, x, y, n_classes)};
    case ModelFamily::bernoulli_nb: return {spec, BernoulliNB::fit(spec, x, y, n_classes)};
    case ModelFamily::decision_tree: return {spec, DecisionTree::fit(spec, x, y, n_classes)};
    case ModelFamily::random_forest: return {spec, RandomForest::fit(spec, x, y, n_classes)};
  }
  throw UsageError("unknown model family");
}

inline Matrix predict_proba(const Model& m, const Matrix& x) { return m.predict_proba(x); }

}  // namespace dirtyml
