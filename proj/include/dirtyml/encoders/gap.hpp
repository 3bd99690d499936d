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
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dirtyml/error.hpp"
#include "dirtyml/ngram.hpp"
#include "dirtyml/random.hpp"
#include "dirtyml/tabular.hpp"

// Gamma-Poisson encoding in its maximum-likelihood limit: nonnegative
// factorization F ~ X * L of a level-by-gram count matrix under the
// generalized Kullback-Leibler divergence, solved with multiplicative updates.

namespace dirtyml {

struct GapOptions {
  std::size_t n_topics = 30;
  std::size_t max_iters = 100;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  // Record the loss after every half-update instead of once per iteration.
  bool trace_half_steps = false;
};

/// Result of a factorization. `topics` is d x V with L1-normalized rows;
/// `activations` is levels x d.
struct GapFactors {
  Matrix topics;
  Matrix activations;
  std::vector<double> loss_trace;
  std::size_t iterations = 0;
};

namespace gap_detail {

inline constexpr double kTiny = 1e-300;

// Reconstruction X_i . L[:, j] with L stored transposed (V x d).
inline double reconstruct(std::span<const double> x, std::span<const double> lt_row) noexcept {
  double v = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) v += x[k] * lt_row[k];
  return v;
}

// Generalized KL divergence D(F || X L), touching only nonzeros of F plus
// the closed-form total mass of X L.
inline double kl_loss(const CsrMatrix& f, const Matrix& x, const Matrix& lt) {
  const std::size_t d = x.cols();
  double loss = 0.0;
  for (std::size_t i = 0; i < f.rows; ++i) {
    for (std::size_t p = f.row_begin(i); p < f.row_end(i); ++p) {
      const double v = std::max(reconstruct(x.row(i), lt.row(f.col_idx[p])), kTiny);
      const double fv = f.values[p];
      loss += fv * std::log(fv / v) - fv;
    }
  }
  std::vector<double> xsum(d, 0.0), lsum(d, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < d; ++k) xsum[k] += x(i, k);
  for (std::size_t j = 0; j < lt.rows(); ++j)
    for (std::size_t k = 0; k < d; ++k) lsum[k] += lt(j, k);
  for (std::size_t k = 0; k < d; ++k) loss += xsum[k] * lsum[k];
  return loss;
}

inline void update_activations(const CsrMatrix& f, Matrix& x, const Matrix& lt) {
  const std::size_t d = x.cols();
  std::vector<double> lsum(d, 0.0), num(d);
  for (std::size_t j = 0; j < lt.rows(); ++j)
    for (std::size_t k = 0; k < d; ++k) lsum[k] += lt(j, k);
  for (std::size_t i = 0; i < f.rows; ++i) {
    std::fill(num.begin(), num.end(), 0.0);
    auto xi = x.row(i);
    for (std::size_t p = f.row_begin(i); p < f.row_end(i); ++p) {
      const auto lj = lt.row(f.col_idx[p]);
      const double ratio = f.values[p] / std::max(reconstruct(xi, lj), kTiny);
      for (std::size_t k = 0; k < d; ++k) num[k] += ratio * lj[k];
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (lsum[k] > 0.0) xi[k] *= num[k] / lsum[k];
    }
  }
}

inline void update_topics(const CsrMatrix& f, const Matrix& x, Matrix& lt) {
  const std::size_t d = x.cols();
  std::vector<double> xsum(d, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < d; ++k) xsum[k] += x(i, k);
  Matrix num(lt.rows(), d, 0.0);
  for (std::size_t i = 0; i < f.rows; ++i) {
    const auto xi = x.row(i);
    for (std::size_t p = f.row_begin(i); p < f.row_end(i); ++p) {
      const std::size_t j = f.col_idx[p];
      const double ratio = f.values[p] / std::max(reconstruct(xi, lt.row(j)), kTiny);
      auto nj = num.row(j);
      for (std::size_t k = 0; k < d; ++k) nj[k] += ratio * xi[k];
    }
  }
  for (std::size_t j = 0; j < lt.rows(); ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      if (xsum[k] > 0.0) lt(j, k) *= num(j, k) / xsum[k];
    }
  }
}

}  // namespace gap_detail

inline double gap_kl_divergence(const CsrMatrix& f, const Matrix& activations, const Matrix& topics) {
  Matrix lt(topics.cols(), topics.rows());
  for (std::size_t k = 0; k < topics.rows(); ++k)
    for (std::size_t j = 0; j < topics.cols(); ++j) lt(j, k) = topics(k, j);
  return gap_detail::kl_loss(f, activations, lt);
}

/// Factorizes `counts`. Stops when the relative loss improvement of an outer
/// iteration drops below `tol`, or after `max_iters` iterations.
inline GapFactors gap_factorize(const CsrMatrix& counts, const GapOptions& opts) {
  const std::size_t d = opts.n_topics;
  if (d < 1) throw UsageError("GAP needs at least one topic");
  if (d > counts.cols) {
    throw DataError("GAP topics (" + std::to_string(d) + ") exceed vocabulary size (" +
                    std::to_string(counts.cols) + ")");
  }
  if (counts.sum() <= 0.0) throw DataError("GAP count matrix is all zero");
  for (const double v : counts.values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("GAP counts must be finite and nonnegative");
  }

  Rng rng(opts.seed);
  Matrix x(counts.rows, d), lt(counts.cols, d);
  for (auto& v : x.data()) v = rng.uniform_open_closed();
  for (auto& v : lt.data()) v = rng.uniform_open_closed();

  GapFactors out;
  double prev = gap_detail::kl_loss(counts, x, lt);
  out.loss_trace.push_back(prev);
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    gap_detail::update_activations(counts, x, lt);
    if (opts.trace_half_steps) out.loss_trace.push_back(gap_detail::kl_loss(counts, x, lt));
    gap_detail::update_topics(counts, x, lt);
    const double loss = gap_detail::kl_loss(counts, x, lt);
    out.loss_trace.push_back(loss);
    out.iterations = it + 1;
    const double improvement = (prev - loss) / std::max(std::abs(prev), gap_detail::kTiny);
    prev = loss;
    if (loss <= 0.0 || improvement < opts.tol) break;
  }

  // Normalize topic rows to unit L1 mass, moving the scale into activations.
  for (std::size_t k = 0; k < d; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < lt.rows(); ++j) s += lt(j, k);
    if (s <= 0.0) continue;
    for (std::size_t j = 0; j < lt.rows(); ++j) lt(j, k) /= s;
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, k) *= s;
  }
  out.topics = Matrix(d, counts.cols);
  for (std::size_t j = 0; j < lt.rows(); ++j)
    for (std::size_t k = 0; k < d; ++k) out.topics(k, j) = lt(j, k);
  out.activations = std::move(x);
  return out;
}

inline constexpr std::size_t kGapInnerIters = 50;

/// Nonnegative activations of one gram-count vector against fixed topics.
///
/// Starts from the uniform split of the vector's mass over topics and runs
/// at most `kGapInnerIters` multiplicative updates. A pure function of its
/// inputs: the encoder uses it for training and unseen levels alike.
inline std::vector<double> gap_solve_activations(
    std::span<const std::pair<std::uint32_t, double>> gram_counts, const Matrix& topics) {
  const std::size_t d = topics.rows();
  std::vector<double> x(d, 0.0);
  double mass = 0.0;
  for (const auto& e : gram_counts) mass += e.second;
  if (mass <= 0.0) return x;
  std::vector<double> lsum(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (const double v : topics.row(k)) lsum[k] += v;
  std::fill(x.begin(), x.end(), mass / static_cast<double>(d));
  std::vector<double> num(d), col(d);
  for (std::size_t it = 0; it < kGapInnerIters; ++it) {
    std::fill(num.begin(), num.end(), 0.0);
    for (const auto& [j, f] : gram_counts) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        col[k] = topics(k, j);
        v += x[k] * col[k];
      }
      const double ratio = f / std::max(v, gap_detail::kTiny);
      for (std::size_t k = 0; k < d; ++k) num[k] += ratio * col[k];
    }
    double change = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double next = lsum[k] > 0.0 ? x[k] * num[k] / lsum[k] : x[k];
      change = std::max(change, std::abs(next - x[k]));
      scale = std::max(scale, next);
      x[k] = next;
    }
    if (change <= 1e-12 * std::max(scale, 1.0)) break;
  }
  return x;
}

/// Fitted GAP model over a level-by-gram count matrix. `activations` holds
/// the encoding of every training level as produced by `gap_transform`, so
/// training and unseen levels are encoded by the same procedure.
struct GapModel {
  std::size_t n = 3;
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::uint32_t> vocab_index;
  Matrix topics;
  Matrix activations;
  std::vector<double> loss_trace;
  std::size_t iterations = 0;
};

inline std::vector<double> gap_transform(const GapModel& model, std::string_view level) {
  const auto counts = count_known_grams(level, model.n, model.vocab_index);
  return gap_solve_activations(counts, model.topics);
}

inline GapModel gap_fit(const CountMatrix& counts, const GapOptions& opts) {
  auto factors = gap_factorize(counts.counts, opts);
  GapModel m;
  m.n = counts.n;
  m.vocabulary = counts.vocabulary;
  m.vocab_index = counts.vocab_index;
  m.topics = std::move(factors.topics);
  m.loss_trace = std::move(factors.loss_trace);
  m.iterations = factors.iterations;
  m.activations = Matrix(counts.levels.size(), opts.n_topics);
  for (std::size_t i = 0; i < counts.levels.size(); ++i) {
    const auto row = gap_transform(m, counts.levels[i]);
    std::copy(row.begin(), row.end(), m.activations.row(i).begin());
  }
  return m;
}

/// Per topic, the k heaviest vocabulary grams, descending by weight with
/// lexicographic tie-break.
inline std::vector<std::vector<std::string>> gap_topic_terms(const Matrix& topics,
                                                             std::span<const std::string> vocabulary,
                                                             std::size_t k) {
  if (k < 1) throw UsageError("k must be >= 1");
  if (k > vocabulary.size()) throw UsageError("k exceeds vocabulary size");
  std::vector<std::vector<std::string>> out;
  std::vector<std::size_t> order(vocabulary.size());
  for (std::size_t t = 0; t < topics.rows(); ++t) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto w = topics.row(t);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (w[a] != w[b]) return w[a] > w[b];
                        return vocabulary[a] < vocabulary[b];
                      });
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < k; ++i) terms.push_back(vocabulary[order[i]]);
    out.push_back(std::move(terms));
  }
  return out;
}

}  // namespace dirtyml
