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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dirtyml.hpp"

using namespace dirtyml;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string random_string(Rng& rng, std::size_t lo, std::size_t hi, std::string_view alphabet) {
  std::string s(lo + rng.below(hi - lo + 1), ' ');
  for (auto& c : s) c = alphabet[rng.below(alphabet.size())];
  return s;
}

// Random edits of `s`, so that pairs cover the whole Jaccard range.
std::string mutate(Rng& rng, std::string s, std::size_t edits) {
  for (std::size_t e = 0; e < edits && !s.empty(); ++e) {
    const auto pos = rng.below(s.size());
    s[pos] = static_cast<char>('a' + rng.below(26));
  }
  return s;
}

Outcome minhash_fidelity() {
  Outcome o;
  Rng rng(1001);
  const std::size_t d = 1024;
  const auto family = MinHashFamily::draw(d, 7);
  int within = 0;
  for (int t = 0; t < 100; ++t) {
    const auto a = random_string(rng, 8, 30, "abcdefghij");
    const auto b = t % 4 == 3 ? random_string(rng, 8, 30, "abcdefghij") : mutate(rng, a, rng.below(6));
    const double j = jaccard(char_ngrams(a), char_ngrams(b));
    const auto sa = minhash_raw(a, family, 3), sb = minhash_raw(b, family, 3);
    const double est = minhash_jaccard_estimate<std::uint64_t>(sa, sb);
    within += std::abs(est - j) <= 3.0 * std::sqrt(j * (1.0 - j) / static_cast<double>(d)) + 1e-12;
  }
  o.require(within >= 95, std::to_string(within) + "/100 pairs within bound");
  if (o.ok) o.detail = std::to_string(within) + "/100 pairs within bound";
  return o;
}

Outcome gap_optimizer() {
  Outcome o;
  Rng rng(2002);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> dense(200 * 500, 0.0);
    for (auto& v : dense) {
      if (rng.uniform() < 0.03) v = static_cast<double>(1 + rng.below(4));
    }
    const auto f = CsrMatrix::from_dense(200, 500, dense);
    GapOptions opts;
    opts.n_topics = 10;
    opts.max_iters = 100;
    opts.tol = 0.0;
    opts.seed = static_cast<std::uint64_t>(trial);
    const auto g = gap_factorize(f, opts);
    for (std::size_t i = 1; i < g.loss_trace.size(); ++i) {
      const double rise = (g.loss_trace[i] - g.loss_trace[i - 1]) / g.loss_trace[i - 1];
      worst = std::max(worst, rise);
      o.require(rise <= 1e-9, "loss rose at trial " + std::to_string(trial) + " iteration " + std::to_string(i));
    }
  }
  // Rank one: F = w h^T with positive integer factors.
  std::vector<double> dense(40 * 30);
  std::vector<double> w(40), h(30);
  for (auto& v : w) v = static_cast<double>(1 + rng.below(9));
  for (auto& v : h) v = static_cast<double>(1 + rng.below(9));
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 30; ++j) dense[i * 30 + j] = w[i] * h[j];
  const auto f = CsrMatrix::from_dense(40, 30, dense);
  GapOptions opts;
  opts.n_topics = 1;
  opts.max_iters = 100;
  opts.tol = 0.0;
  const auto g = gap_factorize(f, opts);
  const double kl = gap_kl_divergence(f, g.activations, g.topics);
  o.require(kl < 1e-6 * f.sum(), "rank-1 KL " + format_double(kl));
  if (o.ok) o.detail = "max relative rise " + format_double(worst) + ", rank-1 KL " + format_double(kl);
  return o;
}

Outcome target_closed_form() {
  Outcome o;
  // Background rows fix the prior; level "L" gets n_i rows with k in class "y".
  for (const double m_s : {0.0, 1.0, 10.0, 100.0}) {
    for (std::size_t n_i = 0; n_i <= 20; ++n_i) {
      for (std::size_t k = 0; k <= n_i; ++k) {
        std::vector<std::string> cells, y;
        for (std::size_t r = 0; r < 20; ++r) {
          cells.push_back("B");
          y.push_back(r % 4 == 0 ? "y" : "n");
        }
        for (std::size_t r = 0; r < n_i; ++r) {
          cells.push_back("L");
          y.push_back(r < k ? "y" : "n");
        }
        const auto labels = make_labels(y);
        const auto enc = fit(EncoderSpec::target(m_s), Column("c", cells), labels);
        const double p0 = (5.0 + static_cast<double>(k)) / static_cast<double>(20 + n_i);
        o.require(enc.output_width() == 1, "binary width");
        const double got = enc.encode_level("L")[0];
        double want = p0;
        if (n_i > 0) {
          const double lambda = static_cast<double>(n_i) / (static_cast<double>(n_i) + m_s);
          want = lambda * static_cast<double>(k) / static_cast<double>(n_i) + (1.0 - lambda) * p0;
        }
        o.require(std::abs(got - want) <= 1e-12, "blend mismatch at n_i=" + std::to_string(n_i));
        o.require(std::abs(enc.encode_level("never")[0] - p0) <= 1e-12, "unseen is not the prior");
      }
    }
  }
  // Multi-class: one column per class, each blended separately.
  const std::vector<std::string> cells{"a", "a", "b", "b", "b", "c", "a", "c"};
  const std::vector<std::string> y{"u", "v", "w", "u", "u", "v", "w", "w"};
  const auto enc = fit(EncoderSpec::target(2.0), Column("c", cells), make_labels(y));
  o.require(enc.output_width() == 3, "multi-class width");
  const auto a = enc.encode_level("a");
  const double lambda = 3.0 / 5.0;
  const double prior[] = {3.0 / 8, 2.0 / 8, 3.0 / 8};
  for (std::size_t c = 0; c < 3; ++c) {
    o.require(std::abs(a[c] - (lambda / 3.0 + (1 - lambda) * prior[c])) <= 1e-12, "multi-class blend");
  }
  if (o.ok) o.detail = "all grid points within 1e-12";
  return o;
}

Outcome shape_laws() {
  Outcome o;
  Rng rng(4004);
  for (int t = 0; t < 200; ++t) {
    std::set<std::string> vocab;
    const auto n = 1 + rng.below(40);
    while (vocab.size() < n) vocab.insert(random_string(rng, 1, 8, "abcdefxyz"));
    std::vector<std::string> cells(vocab.begin(), vocab.end());
    const auto reps = cells.size();
    for (std::size_t r = 0; r < 2 * reps; ++r) cells.push_back(cells[rng.below(reps)]);
    const Column col("v", cells);
    const auto oh = fit(EncoderSpec::one_hot(), col);
    o.require(oh.output_width() == n, "one-hot width");
    const auto m = oh.transform(col).to_dense();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0;
      for (const double v : m.row(i)) s += v;
      o.require(s == 1.0, "one-hot row sum");
    }
    const auto ord = fit(EncoderSpec::ordinal(), col);
    o.require(ord.output_width() == 1, "ordinal width");
    std::set<double> codes;
    for (const auto& level : vocab) codes.insert(ord.encode_level(level)[0]);
    o.require(codes.size() == n, "ordinal codes not bijective");
  }
  if (o.ok) o.detail = "200 vocabularies";
  return o;
}

Outcome type_inference() {
  Outcome o;
  std::vector<std::string> mixed{"2", "3", "10.8", "7.2"}, three, empty(100, "NA");
  std::vector<std::string> mixed_pad;
  for (int i = 0; i < 100; ++i) three.push_back(i % 3 == 0 ? "red" : i % 3 == 1 ? "green" : "blue");
  const Dataset small({Column("f", mixed)});
  const Dataset big({Column("cat", three), Column("gone", empty)});
  const auto r1 = infer_types(resolve_missing(small, default_missing_tokens()));
  const auto r2 = infer_types(resolve_missing(big, default_missing_tokens()));
  o.require(r1.at("f").type == FeatureType::numeric, "mixed float column not numeric");
  o.require(r2.at("cat").type == FeatureType::categorical, "3-level column not categorical");
  o.require(r2.at("cat").cardinality == 3, "cardinality != 3");
  o.require(r2.at("gone").type == FeatureType::all_missing, "all-missing column not flagged");
  if (o.ok) o.detail = "numeric / categorical(3) / all_missing";
  return o;
}

Outcome selection_rule() {
  Outcome o;
  const VectorizerConfig cfg;
  for (std::size_t rows : {100u, 5000u, 10000u, 10001u, 200000u}) {
    for (std::size_t card = 1; card <= 80; ++card) {
      const auto kind = choose_encoder(card, rows, cfg).kind;
      const auto want = card < 40 ? EncoderKind::similarity : rows > 10000 ? EncoderKind::minhash : EncoderKind::gap;
      o.require(kind == want, "card " + std::to_string(card) + " rows " + std::to_string(rows));
    }
  }
  o.require(choose_encoder(39, 1000, cfg).kind == EncoderKind::similarity, "39");
  o.require(choose_encoder(40, 1000, cfg).kind == EncoderKind::gap, "40");
  if (o.ok) o.detail = "boundary at 40 holds for every row count";
  return o;
}

double mean_best_accuracy(const Dataset& data, const SearchSpace& space) {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SearchOptions opts;
    opts.budget.max_candidates = 50;
    opts.seed = seed;
    opts.evaluation.vectorizer.mode = SelectionMode::top_feature_only;
    opts.evaluation.vectorizer.seed = seed;
    opts.evaluation.vectorizer.importance.seed = seed;
    const auto lb = search(space, data, make_holdout(data.n_rows(), 0.25, seed), opts);
    total += lb.entries.empty() ? 0.0 : lb.best().accuracy;
  }
  return total / 5.0;
}

Outcome morphological_advantage() {
  Outcome o;
  SyntheticSpec s;
  s.n_rows = 5000;
  s.n_levels = 2000;
  s.typo_rate = 0.1;
  s.class_count = 2;
  s.seed = 42;
  const auto data = gen_synthetic(s);
  const double morph = mean_best_accuracy(data, SearchSpace{});
  const double simple = mean_best_accuracy(data, SearchSpace::simple_only());
  o.require(morph - simple >= 0.10, "gap below 0.10");
  char buf[128];
  std::snprintf(buf, sizeof buf, "morphological %.4f vs simple %.4f (gap %.4f)", morph, simple, morph - simple);
  o.detail = buf;
  return o;
}

Outcome search_semantics() {
  Outcome o;
  SyntheticSpec s;
  s.n_rows = 400;
  s.n_levels = 80;
  s.typo_rate = 0.1;
  s.seed = 8;
  const auto data = gen_synthetic(s);
  SearchOptions serial;
  serial.budget.max_candidates = 12;
  serial.seed = 5;
  auto parallel = serial;
  parallel.threads = 4;
  const auto split = make_holdout(data.n_rows(), 0.25, 5);
  const auto a = search(SearchSpace{}, data, split, serial);
  const auto b = search(SearchSpace{}, data, split, parallel);
  o.require(leaderboard_csv(a) == leaderboard_csv(b), "serial and parallel leaderboards differ");
  o.require(leaderboard_json(a).dump() == leaderboard_json(b).dump(), "leaderboard JSON differs");

  const auto kf = search(SearchSpace{}, data, make_kfold(data.n_rows(), 5, 5), serial);
  for (const auto& e : kf.entries) {
    double acc = 0, ll = 0;
    for (std::size_t f = 0; f < e.fold_accuracy.size(); ++f) acc += e.fold_accuracy[f], ll += e.fold_logloss[f];
    const double k = static_cast<double>(e.fold_accuracy.size());
    o.require(e.fold_accuracy.size() == 5, "fold count");
    o.require(std::abs(e.accuracy - acc / k) <= 1e-12 && std::abs(e.logloss - ll / k) <= 1e-12, "fold mean");
  }
  for (const auto& [n, test] : std::vector<std::pair<std::size_t, std::size_t>>{{4, 1}, {100, 25}, {101, 25}}) {
    const auto p = make_holdout(n, 0.25, 3);
    o.require(p.test_indices(0).size() == test && p.train_indices(0).size() == n - test,
              "holdout counts for N=" + std::to_string(n));
  }
  if (o.ok) o.detail = std::to_string(a.entries.size()) + " ranked candidates identical serial/parallel";
  return o;
}

Outcome leaderboard_analytics() {
  Outcome o;
  Rng rng(9009);
  for (int t = 0; t < 50; ++t) {
    Leaderboard lb;
    std::map<ModelFamily, std::vector<double>> by;
    const auto n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) {
      CandidateResult r;
      r.ok = true;
      r.candidate.index = i;
      r.candidate.model.family = kAllModelFamilies[rng.below(4)];
      r.accuracy = static_cast<double>(rng.below(1000)) / 1000.0;
      r.logloss = rng.uniform();
      by[r.candidate.model.family].push_back(r.accuracy);
      lb.entries.push_back(r);
    }
    sort_leaderboard(lb);
    for (const auto& st : family_summary(lb)) {
      auto v = by.at(st.family);
      std::sort(v.begin(), v.end());
      // Brute-force percentile: linear interpolation between closest ranks.
      auto pct = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
      };
      o.require(st.count == v.size(), "count");
      o.require(std::abs(st.min - v.front()) <= 1e-12 && std::abs(st.max - v.back()) <= 1e-12, "min/max");
      o.require(std::abs(st.q1 - pct(0.25)) <= 1e-12, "q1");
      o.require(std::abs(st.median - pct(0.5)) <= 1e-12, "median");
      o.require(std::abs(st.q3 - pct(0.75)) <= 1e-12, "q3");
    }
    const auto& group = tree_based_families();
    std::size_t scan = 0;
    for (const auto& e : lb.entries) {
      if (!group.contains(e.candidate.model.family)) break;
      ++scan;
    }
    o.require(top_family_run_length(lb, group) == scan, "run length");
  }
  if (o.ok) o.detail = "50 random leaderboards";
  return o;
}

Outcome persistence() {
  Outcome o;
  Rng rng(1010);
  const std::vector<std::string> stems{"london", "paris", "berlin", "madrid", "roma", "lisboa"};
  auto probe = [&](std::size_t n) {
    std::vector<std::string> cells;
    for (std::size_t i = 0; i < n; ++i) cells.push_back(stems[rng.below(stems.size())] + random_string(rng, 0, 3, "xyz"));
    return Column("city", cells);
  };
  const auto train = probe(500), test = probe(1000);
  std::vector<std::string> y;
  for (std::size_t i = 0; i < train.size(); ++i) y.push_back(train.cells[i][0] < 'm' ? "a" : "b");
  const auto labels = make_labels(y);
  for (const auto kind : kAllEncoderKinds) {
    EncoderSpec spec{kind};
    spec.n_topics = 5;
    spec.hashing_dims = 32;
    spec.seed = 11;
    const auto enc = fit(spec, train, labels);
    const auto text = encoder_to_string(enc);
    const auto back = encoder_from_string(text);
    o.require(back.transform(test) == enc.transform(test), std::string(to_string(kind)) + " transform differs");
    const auto m1 = back.transform(test).to_dense(), m2 = enc.transform(test).to_dense();
    o.require(std::memcmp(m1.data().data(), m2.data().data(), m1.data().size() * sizeof(double)) == 0,
              std::string(to_string(kind)) + " not bit-identical");
    // Flip one digit in the state; the checksum must catch it.
    auto bad = text;
    const auto state = bad.find("\"state\"");
    const auto digit = bad.find_first_of("0123456789", state);
    if (digit != std::string::npos) {
      bad[digit] = bad[digit] == '9' ? '8' : static_cast<char>(bad[digit] + 1);
      bool rejected = false;
      try {
        encoder_from_string(bad);
      } catch (const FormatError&) {
        rejected = true;
      }
      o.require(rejected, std::string(to_string(kind)) + " corruption accepted");
    }
  }
  if (o.ok) o.detail = "every kind bit-identical on 1000 rows; corruption rejected";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "min-hash fidelity", 5, minhash_fidelity},
      {2, "GAP optimizer", 30, gap_optimizer},
      {3, "target encoding closed form", 0, target_closed_form},
      {4, "shape laws", 0, shape_laws},
      {5, "type inference", 0, type_inference},
      {6, "encoder selection rule", 0, selection_rule},
      {7, "morphological vs simple encoders", 600, morphological_advantage},
      {8, "search determinism and split semantics", 0, search_semantics},
      {9, "leaderboard analytics", 0, leaderboard_analytics},
      {10, "persistence", 0, persistence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.ok = false;
      o.detail += " (over time limit)";
    }
    failures += o.ok ? 0 : 1;
    std::printf("%s criterion %d: %s [%.2fs] %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
