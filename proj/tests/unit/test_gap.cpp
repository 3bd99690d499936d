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

#include <gtest/gtest.h>

#include <set>

#include "dirtyml/encoders.hpp"
#include "test_util.hpp"

namespace dirtyml {
namespace {

CsrMatrix random_counts(Rng& rng, std::size_t rows, std::size_t cols, double density) {
  std::vector<double> dense(rows * cols, 0.0);
  for (auto& v : dense) {
    if (rng.uniform() < density) v = static_cast<double>(1 + rng.below(5));
  }
  return CsrMatrix::from_dense(rows, cols, dense);
}

TEST(GapFactorize, LossNonIncreasingAndNonnegative) {
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_counts(rng, 40, 60, 0.1);
    GapOptions o;
    o.n_topics = 5;
    o.max_iters = 60;
    o.tol = 0;  // run all iterations
    o.seed = static_cast<std::uint64_t>(trial);
    o.trace_half_steps = true;
    const auto g = gap_factorize(f, o);
    ASSERT_EQ(g.loss_trace.size(), 1 + 2 * o.max_iters);
    for (std::size_t i = 1; i < g.loss_trace.size(); ++i) {
      EXPECT_LE(g.loss_trace[i], g.loss_trace[i - 1] * (1 + 1e-9) + 1e-12) << i;
    }
    for (double v : g.topics.data()) EXPECT_GE(v, 0.0);
    for (double v : g.activations.data()) EXPECT_GE(v, 0.0);
    for (std::size_t k = 0; k < o.n_topics; ++k) {
      double s = 0;
      for (double v : g.topics.row(k)) s += v;
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
    // Normalization moves scale only: the loss of the returned factors is
    // the last traced value.
    EXPECT_NEAR(gap_kl_divergence(f, g.activations, g.topics), g.loss_trace.back(),
                1e-9 * std::abs(g.loss_trace.back()) + 1e-9);
  }
}

TEST(GapFactorize, RankOneRecovery) {
  Rng rng(2);
  const std::size_t rows = 30, cols = 20;
  std::vector<double> w(rows), h(cols), dense(rows * cols);
  for (auto& v : w) v = 1 + rng.below(9);
  for (auto& v : h) v = 1 + rng.below(9);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) dense[i * cols + j] = w[i] * h[j];
  const auto f = CsrMatrix::from_dense(rows, cols, dense);
  GapOptions o;
  o.n_topics = 1;
  o.max_iters = 50;
  o.tol = 1e-12;
  const auto g = gap_factorize(f, o);
  EXPECT_LT(gap_kl_divergence(f, g.activations, g.topics), 1e-6 * f.sum());
}

TEST(GapFactorize, Errors) {
  Rng rng(3);
  const auto f = random_counts(rng, 5, 4, 0.5);
  GapOptions o;
  o.n_topics = 5;
  EXPECT_THROW(gap_factorize(f, o), DataError);
  o.n_topics = 2;
  EXPECT_THROW(gap_factorize(CsrMatrix::from_dense(2, 2, std::vector<double>(4, 0.0)), o), DataError);
  EXPECT_THROW(gap_factorize(CsrMatrix::from_dense(1, 2, std::vector<double>{1.0, -1.0}), o), DataError);
}

TEST(GapFactorize, DeterministicGivenSeed) {
  Rng rng(4);
  const auto f = random_counts(rng, 20, 30, 0.2);
  GapOptions o;
  o.n_topics = 4;
  const auto a = gap_factorize(f, o), b = gap_factorize(f, o);
  EXPECT_EQ(a.topics, b.topics);
  o.seed = 9;
  EXPECT_NE(gap_factorize(f, o).topics, a.topics);
}

std::vector<std::string> two_pool_levels(Rng& rng, std::size_t count, std::vector<std::size_t>* pool) {
  const std::vector<std::string> pools{"london", "paris"};
  std::set<std::string> seen;
  std::vector<std::string> levels;
  while (levels.size() < count) {
    const std::size_t p = levels.size() % 2;
    auto s = testing::random_string(rng, 0, 2, "xyz") + pools[p] + testing::random_string(rng, 0, 2, "qvw");
    if (!seen.insert(s).second) continue;
    levels.push_back(s);
    if (pool) pool->push_back(p);
  }
  return levels;
}

TEST(GapModelTest, TransformConsistency) {
  Rng rng(5);
  const auto levels = two_pool_levels(rng, 40, nullptr);
  GapOptions o;
  o.n_topics = 4;
  const auto model = gap_fit(build_count_matrix(levels), o);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto v = gap_transform(model, levels[i]);
    ASSERT_EQ(v.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(v[k], model.activations(i, k), 1e-6);
  }
  EXPECT_EQ(gap_transform(model, "####"), std::vector<double>(4, 0.0));
  EXPECT_EQ(gap_transform(model, "lon").size(), 4u);
  EXPECT_EQ(gap_transform(model, "londonx"), gap_transform(model, "londonx"));
}

TEST(GapModelTest, TopicsSeparateTwoPools) {
  Rng rng(6);
  std::vector<std::size_t> pool;
  const auto levels = two_pool_levels(rng, 200, &pool);
  GapOptions o;
  o.n_topics = 2;
  o.max_iters = 200;
  o.tol = 1e-8;
  const auto model = gap_fit(build_count_matrix(levels), o);
  const auto terms = gap_topic_terms(model.topics, model.vocabulary, 5);
  const std::set<std::string> london{"lon", "ond", "ndo", "don"}, paris{"par", "ari", "ris"};
  auto side = [&](const std::vector<std::string>& t) {
    int l = 0, p = 0;
    for (const auto& g : t) {
      l += london.count(g) > 0;
      p += paris.count(g) > 0;
    }
    return std::pair{l, p};
  };
  const auto [l0, p0] = side(terms[0]);
  const auto [l1, p1] = side(terms[1]);
  // Each topic's top terms come from one pool, and the two topics differ.
  EXPECT_TRUE((l0 >= 3 && p0 == 0 && p1 >= 3 && l1 == 0) || (p0 >= 3 && l0 == 0 && l1 >= 3 && p1 == 0))
      << l0 << p0 << l1 << p1;
}

TEST(GapTopicTerms, SortAndErrors) {
  const Matrix topics(1, 2, std::vector<double>{0.1, 0.9});
  const std::vector<std::string> vocab{"xyz", "abc"};
  EXPECT_EQ(gap_topic_terms(topics, vocab, 2)[0], (std::vector<std::string>{"abc", "xyz"}));
  EXPECT_EQ(gap_topic_terms(topics, vocab, 1)[0], (std::vector<std::string>{"abc"}));
  const Matrix tie(1, 2, std::vector<double>{0.5, 0.5});
  EXPECT_EQ(gap_topic_terms(tie, vocab, 2)[0], (std::vector<std::string>{"abc", "xyz"}));
  EXPECT_THROW(gap_topic_terms(topics, vocab, 3), UsageError);
  EXPECT_THROW(gap_topic_terms(topics, vocab, 0), UsageError);
}

TEST(GapEncoder, WidthAndTopicTerms) {
  Rng rng(8);
  const auto levels = two_pool_levels(rng, 60, nullptr);
  const Column c("city", levels);
  const auto enc = fit(EncoderSpec::gap(5), c);
  EXPECT_EQ(enc.output_width(), 5u);
  EXPECT_EQ(gap_topic_terms(enc, 3).size(), 5u);
  for (double v : enc.transform(c).to_dense().data()) EXPECT_GE(v, 0.0);
  EXPECT_THROW(gap_topic_terms(fit(EncoderSpec::one_hot(), c), 1), UsageError);
  EXPECT_THROW(fit(EncoderSpec::gap(30), Column("c", {"ab", "cd"})), DataError);
}

}  // namespace
}  // namespace dirtyml
