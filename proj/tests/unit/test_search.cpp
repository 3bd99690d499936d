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

#include <algorithm>
#include <cmath>
#include <map>

#include "dirtyml/config.hpp"
#include "dirtyml/manifest.hpp"
#include "dirtyml/search.hpp"
#include "test_util.hpp"

namespace dirtyml {
namespace {

// Label fully determined by the category of "c"; "n" is an unrelated number.
Dataset separable(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> c, num, y;
  for (std::size_t i = 0; i < n; ++i) {
    const auto l = rng.below(8);
    c.push_back("cat_" + std::to_string(l));
    num.push_back(std::to_string(rng.uniform()));
    y.push_back(l % 2 ? "odd" : "even");
  }
  return Dataset({Column("c", c), Column("n", num), Column("y", y)}, "y");
}

Dataset coin_flips(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> c, y;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back("v" + std::to_string(rng.below(6)));
    y.push_back(rng.bernoulli(0.5) ? "h" : "t");
  }
  return Dataset({Column("c", c), Column("y", y)}, "y");
}

PipelineCandidate candidate(ModelFamily f) {
  PipelineCandidate c;
  c.model.family = f;
  return c;
}

TEST(SampleCandidate, Deterministic) {
  const SearchSpace space;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto a = sample_candidate(space, 9, i);
    EXPECT_EQ(a, sample_candidate(space, 9, i));
    EXPECT_EQ(a.index, i);
  }
  EXPECT_FALSE(sample_candidate(space, 9, 0) == sample_candidate(space, 10, 0) &&
               sample_candidate(space, 9, 1) == sample_candidate(space, 10, 1));
}

TEST(SampleCandidate, SingleOptionSpace) {
  SearchSpace s;
  s.families = {ModelFamily::bernoulli_nb};
  s.nb_alpha = {0.5};
  s.imputers = {Imputer::median};
  s.scalers = {Scaler::minmax};
  s.max_prototypes = {7};
  s.minhash_hashes = {8};
  s.gap_topics = {9};
  for (std::size_t i = 0; i < 20; ++i) {
    const auto c = sample_candidate(s, 3, i);
    EXPECT_EQ(c.model.family, ModelFamily::bernoulli_nb);
    EXPECT_EQ(c.model.alpha, 0.5);
    EXPECT_EQ(c.preproc, (PreprocSpec{Imputer::median, Scaler::minmax}));
    EXPECT_EQ(c.max_prototypes, 7u);
    EXPECT_EQ(c.minhash_hashes, 8u);
    EXPECT_EQ(c.gap_topics, 9u);
  }
}

TEST(SampleCandidate, FamilyFrequencies) {
  SearchSpace s;
  s.families = {ModelFamily::logistic_regression, ModelFamily::decision_tree, ModelFamily::random_forest};
  std::map<ModelFamily, int> counts;
  for (std::size_t i = 0; i < 1000; ++i) ++counts[sample_candidate(s, 21, i).model.family];
  ASSERT_EQ(counts.size(), 3u);
  for (const auto& [f, n] : counts) {
    EXPECT_GE(n / 1000.0, 0.25) << to_string(f);
    EXPECT_LE(n / 1000.0, 0.42) << to_string(f);
  }
}

TEST(SampleCandidate, SimpleSpaceDrawsSimpleEncoders) {
  const auto s = SearchSpace::simple_only();
  for (std::size_t i = 0; i < 30; ++i) {
    const auto c = sample_candidate(s, 2, i);
    EXPECT_EQ(c.mode, SelectionMode::simple_only);
    const auto k = c.simple_encoder.kind;
    EXPECT_TRUE(k == EncoderKind::one_hot || k == EncoderKind::ordinal || k == EncoderKind::hashing);
  }
}

TEST(SearchSpace, Validate) {
  SearchSpace s;
  s.families.clear();
  EXPECT_THROW(s.validate(), UsageError);
  s = SearchSpace{};
  s.gap_topics.clear();
  EXPECT_THROW(s.validate(), UsageError);
  EXPECT_NO_THROW(SearchSpace{}.validate());
}

TEST(Evaluate, SeparableIsPerfect) {
  const auto d = separable(400, 1);
  const auto r = evaluate_candidate(candidate(ModelFamily::decision_tree), d, make_holdout(400, 0.25, 1));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_LT(r.logloss, 1e-9);
  EXPECT_EQ(r.encoders, "similarity(p=100,n=3)");
}

TEST(Evaluate, CoinFlipsNearHalf) {
  const auto d = coin_flips(2000, 2);
  const auto r = evaluate_candidate(candidate(ModelFamily::bernoulli_nb), d, make_holdout(2000, 0.25, 2));
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_NEAR(r.accuracy, 0.5, 0.07);
}

TEST(Evaluate, KFoldMean) {
  const auto d = coin_flips(300, 3);
  const auto r = evaluate_candidate(candidate(ModelFamily::logistic_regression), d, make_kfold(300, 5, 3));
  ASSERT_TRUE(r.ok) << r.error;
  ASSERT_EQ(r.fold_accuracy.size(), 5u);
  ASSERT_EQ(r.fold_logloss.size(), 5u);
  double a = 0, l = 0;
  for (std::size_t f = 0; f < 5; ++f) a += r.fold_accuracy[f], l += r.fold_logloss[f];
  EXPECT_NEAR(r.accuracy, a / 5, 1e-15);
  EXPECT_NEAR(r.logloss, l / 5, 1e-15);
}

TEST(Evaluate, SingleClassTrainingFoldFails) {
  std::vector<std::string> c, y;
  for (int i = 0; i < 12; ++i) {
    c.push_back(i % 2 ? "p" : "q");
    y.push_back(i < 3 ? "rare" : "common");
  }
  const Dataset d({Column("c", c), Column("y", y)}, "y");
  SplitPlan split;
  split.kind = SplitKind::holdout;
  split.assignments.assign(12, 0);
  for (int i = 0; i < 3; ++i) split.assignments[i] = 1;
  const auto r = evaluate_candidate(candidate(ModelFamily::decision_tree), d, split);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.error_class, "DataError");
}

TEST(Evaluate, NoLeakageFromTestRows) {
  const auto d = separable(200, 4);
  const auto split = make_holdout(200, 0.25, 4);
  // Scramble every test-row cell, labels included.
  const auto test = split.test_indices(0);
  std::vector<Column> cols = d.columns();
  Rng rng(5);
  std::vector<std::size_t> perm = test;
  rng.shuffle(std::span<std::size_t>(perm));
  for (auto& col : cols) {
    const auto orig = col.cells;
    for (std::size_t i = 0; i < test.size(); ++i) col.cells[test[i]] = orig[perm[i]];
  }
  for (const auto i : test) cols[0].cells[i] = "never_seen_" + std::to_string(i);
  const Dataset scrambled(cols, "y");

  const auto cand = candidate(ModelFamily::random_forest);
  EvaluationContext a(d, split, {});
  EvaluationContext b(scrambled, split, {});
  const auto ea = a.encode(cand, 0);
  const auto eb = b.encode(cand, 0);
  EXPECT_EQ(ea->plan.to_json(), eb->plan.to_json());
  EXPECT_EQ(ea->train.to_dense().data(), eb->train.to_dense().data());
  EXPECT_EQ(ea->train.blocks().size(), eb->train.blocks().size());

  const auto fa = fit_candidate(cand, d.take_rows(split.train_indices(0)), {}, 2, a.labels().classes);
  const auto fb = fit_candidate(cand, scrambled.take_rows(split.train_indices(0)), {}, 2, b.labels().classes);
  EXPECT_EQ(fa.plan.to_json(), fb.plan.to_json());
}

TEST(Search, BudgetAndDeterminism) {
  const auto d = separable(200, 6);
  SearchOptions o;
  o.budget.max_candidates = 10;
  o.seed = 7;
  const auto split = make_holdout(200, 0.25, 7);
  const auto lb1 = search(SearchSpace{}, d, split, o);
  EXPECT_EQ(lb1.entries.size() + lb1.failed.size(), 10u);
  const auto lb2 = search(SearchSpace{}, d, split, o);
  EXPECT_EQ(leaderboard_csv(lb1), leaderboard_csv(lb2));
  o.threads = 3;
  const auto lb3 = search(SearchSpace{}, d, split, o);
  EXPECT_EQ(leaderboard_csv(lb1), leaderboard_csv(lb3));
  EXPECT_EQ(leaderboard_json(lb1), leaderboard_json(lb3));
  for (std::size_t i = 1; i < lb1.entries.size(); ++i) {
    EXPECT_FALSE(ranks_before(lb1.entries[i], lb1.entries[i - 1], Metric::accuracy));
  }
}

TEST(Search, BudgetErrors) {
  const auto d = separable(40, 8);
  SearchOptions o;
  EXPECT_THROW(search(SearchSpace{}, d, make_holdout(40, 0.25, 1), o), UsageError);
  o.budget.max_seconds = 0.001;
  const auto lb = search(SearchSpace{}, d, make_holdout(40, 0.25, 1), o);
  EXPECT_GE(lb.entries.size() + lb.failed.size(), 1u);
}

TEST(Search, StrongFamilyWins) {
  // XOR of two thresholds: trees separate it, linear and NB models cannot.
  Rng rng(9);
  std::vector<std::string> a, b, c, y;
  for (int i = 0; i < 400; ++i) {
    const double u = rng.uniform(), v = rng.uniform();
    a.push_back(std::to_string(u));
    b.push_back(std::to_string(v));
    c.push_back("k" + std::to_string(rng.below(3)));
    y.push_back((u > 0.5) != (v > 0.5) ? "x" : "o");
  }
  const Dataset d({Column("a", a), Column("b", b), Column("c", c), Column("y", y)}, "y");
  SearchOptions o;
  o.budget.max_candidates = 16;
  o.seed = 2;
  const auto lb = search(SearchSpace{}, d, make_holdout(400, 0.25, 3), o);
  ASSERT_FALSE(lb.entries.empty());
  EXPECT_TRUE(is_tree_based(lb.best().candidate.model.family));
  EXPECT_GE(top_family_run_length(lb, tree_based_families()), 1u);
  EXPECT_GT(lb.best().accuracy, 0.9);
}

CandidateResult scored(std::size_t index, ModelFamily f, double acc, double ll) {
  CandidateResult r;
  r.candidate = candidate(f);
  r.candidate.index = index;
  r.ok = true;
  r.accuracy = acc;
  r.logloss = ll;
  return r;
}

TEST(Leaderboard, OrderingAndIdempotence) {
  Leaderboard lb;
  lb.entries = {scored(0, ModelFamily::bernoulli_nb, 0.7, 0.5), scored(1, ModelFamily::decision_tree, 0.9, 0.4),
                scored(2, ModelFamily::random_forest, 0.9, 0.3), scored(3, ModelFamily::decision_tree, 0.9, 0.3)};
  sort_leaderboard(lb);
  std::vector<std::size_t> order;
  for (const auto& e : lb.entries) order.push_back(e.candidate.index);
  EXPECT_EQ(order, (std::vector<std::size_t>{2, 3, 1, 0}));
  const auto before = leaderboard_csv(lb);
  sort_leaderboard(lb);
  EXPECT_EQ(leaderboard_csv(lb), before);
  EXPECT_EQ(top_family_run_length(lb, tree_based_families()), 3u);
  EXPECT_EQ(top_family_run_length(lb, {ModelFamily::bernoulli_nb}), 0u);

  lb.metric = Metric::log_loss;
  sort_leaderboard(lb);
  EXPECT_EQ(lb.entries.back().candidate.index, 0u);
  EXPECT_EQ(lb.entries.front().candidate.index, 2u);
}

TEST(Leaderboard, CsvShape) {
  Leaderboard lb;
  lb.entries = {scored(0, ModelFamily::decision_tree, 0.5, 0.25)};
  CandidateResult bad = scored(1, ModelFamily::bernoulli_nb, 0, 0);
  bad.ok = false;
  bad.error_class = "DataError";
  lb.failed = {bad};
  const auto csv = leaderboard_csv(lb);
  const auto data = parse_csv(csv);
  ASSERT_EQ(data.n_rows(), 2u);
  EXPECT_EQ(data.column("rank").cells[0], "1");
  EXPECT_EQ(data.column("accuracy").cells[0], "0.5");
  EXPECT_EQ(data.column("seconds").cells[0], "");
  EXPECT_EQ(data.column("rank").cells[1], "");
  EXPECT_EQ(data.column("status").cells[1], "failed:DataError");
}

TEST(FamilySummary, Examples) {
  Leaderboard lb;
  for (int i = 0; i < 4; ++i) lb.entries.push_back(scored(i, ModelFamily::decision_tree, i + 1.0, 0));
  lb.entries.push_back(scored(4, ModelFamily::bernoulli_nb, 0.5, 0));
  sort_leaderboard(lb);
  const auto s = family_summary(lb);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].family, ModelFamily::bernoulli_nb);
  EXPECT_EQ(s[0].count, 1u);
  EXPECT_EQ(s[0].variance, 0.0);
  EXPECT_EQ(s[0].median, 0.5);
  const auto& t = s[1];
  EXPECT_EQ(t.count, 4u);
  EXPECT_EQ(t.min, 1.0);
  EXPECT_EQ(t.q1, 1.75);
  EXPECT_EQ(t.median, 2.5);
  EXPECT_EQ(t.q3, 3.25);
  EXPECT_EQ(t.max, 4.0);
  EXPECT_NEAR(t.variance, 5.0 / 3.0, 1e-15);
  const auto csv = parse_csv(family_summary_csv(s));
  EXPECT_EQ(csv.n_rows(), 2u);
  EXPECT_EQ(csv.column("q1").cells[1], "1.75");
}

TEST(FamilySummary, OracleProperty) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Leaderboard lb;
    std::map<ModelFamily, std::vector<double>> by;
    const auto n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      const auto f = kAllModelFamilies[rng.below(4)];
      const double v = rng.uniform();
      by[f].push_back(v);
      lb.entries.push_back(scored(i, f, v, 0));
    }
    sort_leaderboard(lb);
    const auto s = family_summary(lb);
    ASSERT_EQ(s.size(), by.size());
    for (const auto& st : s) {
      auto v = by.at(st.family);
      std::sort(v.begin(), v.end());
      EXPECT_EQ(st.count, v.size());
      EXPECT_EQ(st.min, v.front());
      EXPECT_EQ(st.max, v.back());
      EXPECT_LE(st.q1, st.median);
      EXPECT_LE(st.median, st.q3);
      double mean = 0;
      for (const double x : v) mean += x;
      mean /= v.size();
      double var = 0;
      for (const double x : v) var += (x - mean) * (x - mean);
      EXPECT_NEAR(st.variance, v.size() > 1 ? var / (v.size() - 1) : 0.0, 1e-12);
    }
  }
}

TEST(Export, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double v = rng.uniform() * std::pow(10.0, static_cast<int>(rng.below(20)) - 10);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Config, Parser) {
  const auto kv = parse_config_text("seed = 3\n# note\n[budget]\ncandidates = 12 \nseconds=\"2.5\"\n");
  EXPECT_EQ(kv.at("seed"), "3");
  EXPECT_EQ(kv.at("budget.candidates"), "12");
  EXPECT_EQ(kv.at("budget.seconds"), "2.5");
  EXPECT_THROW(parse_config_text("a = 1\na = 2\n"), UsageError);
  EXPECT_THROW(parse_config_text("no equals sign\n"), UsageError);
  EXPECT_THROW(parse_config_text("[open\n"), UsageError);

  RunConfig cfg;
  cfg.merge(kv);
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.budget_candidates, 12u);
  EXPECT_EQ(cfg.budget_seconds, 2.5);
  EXPECT_THROW(cfg.set("nonsense.key", "1"), UsageError);
  EXPECT_THROW(cfg.set("seed", "abc"), UsageError);
  cfg.set("search.families", "decision_tree, random_forest");
  EXPECT_EQ(cfg.search_space().families.size(), 2u);
  cfg.set("vectorizer.mode", "simple_only");
  EXPECT_EQ(cfg.search_space().modes, (std::vector<SelectionMode>{SelectionMode::simple_only}));
  cfg.set("split.kind", "kfold");
  cfg.set("split.kfold", "4");
  EXPECT_EQ(make_split(cfg, separable(40, 1)).n_folds(), 4u);
}

TEST(Manifest, Counts) {
  EXPECT_TRUE(matches_count(2000, "2k"));
  EXPECT_TRUE(matches_count(2400, "2k"));
  EXPECT_FALSE(matches_count(2600, "2k"));
  EXPECT_TRUE(matches_count(1'700'000, "1.7m"));
  EXPECT_TRUE(matches_count(331'000, "331k"));
  EXPECT_THROW(parse_abbreviated_count("lots"), FormatError);
  EXPECT_EQ(abbreviate_count(999), "999");
  EXPECT_EQ(abbreviate_count(2000), "2k");
  EXPECT_EQ(abbreviate_count(1'700'000), "1.7M");
  for (std::size_t n : {1500u, 12345u, 999999u, 2'500'000u}) EXPECT_TRUE(matches_count(n, abbreviate_count(n))) << n;
}

TEST(Manifest, ReferenceTable) {
  const auto& m = reference_manifest("Midwest");
  EXPECT_EQ(m.classes, 9u);
  EXPECT_EQ(m.features, 27u);
  EXPECT_EQ(m.categorical_features, 26u);
  EXPECT_EQ(reference_manifests().size(), 7u);
  EXPECT_THROW(reference_manifest("nope"), UsageError);
  EXPECT_EQ(DatasetManifest::from_json(m.to_json()), m);
}

TEST(Manifest, CheckAgainstData) {
  const auto d = separable(2000, 2);
  DatasetManifest expected{"toy", 2, "2k", 2, 1};
  EXPECT_TRUE(check_manifest(d, expected).ok);
  expected.categorical_features = 2;
  const auto chk = check_manifest(d, expected);
  EXPECT_FALSE(chk.ok);
  EXPECT_EQ(chk.mismatches.size(), 1u);
  EXPECT_EQ(describe_dataset(d, "toy").instances, "2k");
}

}  // namespace
}  // namespace dirtyml
