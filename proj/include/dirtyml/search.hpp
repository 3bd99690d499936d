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
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dirtyml/encoders.hpp"
#include "dirtyml/error.hpp"
#include "dirtyml/labels.hpp"
#include "dirtyml/models.hpp"
#include "dirtyml/parallel.hpp"
#include "dirtyml/random.hpp"
#include "dirtyml/tabular.hpp"
#include "dirtyml/type_inference.hpp"
#include "dirtyml/vectorizer.hpp"

namespace dirtyml {

enum class Metric { accuracy, log_loss };

inline std::string_view to_string(Metric m) noexcept {
  return m == Metric::accuracy ? "accuracy" : "log_loss";
}

inline Metric parse_metric(std::string_view s) {
  if (s == "accuracy") return Metric::accuracy;
  if (s == "log_loss" || s == "logloss") return Metric::log_loss;
  throw UsageError("unknown metric '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Search space and candidates
// ---------------------------------------------------------------------------

/// Discrete pipeline space: encoding mode and encoder hyperparameters,
/// preprocessing, and model families with their hyperparameter grids.
struct SearchSpace {
  std::vector<SelectionMode> modes{SelectionMode::top_feature_only};
  std::vector<EncoderKind> simple_kinds{EncoderKind::one_hot, EncoderKind::ordinal, EncoderKind::hashing};
  std::vector<std::size_t> hashing_dims{32, 128, 512};
  std::vector<std::size_t> max_prototypes{50, 100};
  std::vector<std::size_t> minhash_hashes{16, 30, 64};
  std::vector<std::size_t> gap_topics{10, 30};
  std::vector<Imputer> imputers{Imputer::mean, Imputer::median, Imputer::mode};
  std::vector<Scaler> scalers{Scaler::none, Scaler::standard, Scaler::minmax};
  std::vector<ModelFamily> families{std::begin(kAllModelFamilies), std::end(kAllModelFamilies)};
  std::vector<double> logreg_l2{1e-4, 1e-3, 1e-2};
  std::vector<double> nb_alpha{0.1, 1.0, 10.0};
  std::vector<std::size_t> tree_depth{3, 5, 10, 0};
  std::vector<std::size_t> forest_trees{10, 50, 100};
  std::vector<std::size_t> forest_depth{5, 10, 0};

  // Same space restricted to one-hot / ordinal / hashing encoders.
  static SearchSpace simple_only() {
    SearchSpace s;
    s.modes = {SelectionMode::simple_only};
    return s;
  }

  void validate() const {
    auto need = [](bool nonempty, const char* what) {
      if (!nonempty) throw UsageError(std::string("search space has no ") + what);
    };
    need(!modes.empty(), "encoding modes");
    need(!imputers.empty(), "imputers");
    need(!scalers.empty(), "scalers");
    need(!families.empty(), "model families");
    for (const auto m : modes) {
      if (m == SelectionMode::simple_only) {
        need(!simple_kinds.empty(), "simple encoder kinds");
        for (const auto k : simple_kinds) {
          if (k != EncoderKind::one_hot && k != EncoderKind::ordinal && k != EncoderKind::hashing) {
            throw UsageError("simple encoder kinds are one_hot, ordinal and hashing");
          }
        }
        need(!hashing_dims.empty(), "hashing dims");
      } else {
        need(!max_prototypes.empty(), "similarity prototype counts");
        need(!minhash_hashes.empty(), "min-hash sizes");
        need(!gap_topics.empty(), "GAP topic counts");
      }
    }
    for (const auto f : families) {
      switch (f) {
        case ModelFamily::logistic_regression: need(!logreg_l2.empty(), "logistic L2 values"); break;
        case ModelFamily::bernoulli_nb: need(!nb_alpha.empty(), "naive Bayes alphas"); break;
        case ModelFamily::decision_tree: need(!tree_depth.empty(), "tree depths"); break;
        case ModelFamily::random_forest:
          need(!forest_trees.empty() && !forest_depth.empty(), "forest settings");
          break;
      }
    }
  }
};

/// One point of the search space, replayable from (space, seed, index).
struct PipelineCandidate {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  SelectionMode mode = SelectionMode::top_feature_only;
  EncoderSpec simple_encoder = EncoderSpec::one_hot();
  std::size_t max_prototypes = 100;
  std::size_t minhash_hashes = 30;
  std::size_t gap_topics = 30;
  PreprocSpec preproc;
  ModelSpec model;

  // Vectorizer settings for this candidate on top of `base`.
  VectorizerConfig vectorizer(VectorizerConfig base) const {
    base.mode = mode;
    base.simple_encoder = simple_encoder;
    base.max_prototypes = max_prototypes;
    base.minhash_hashes = minhash_hashes;
    base.gap_topics = gap_topics;
    base.impute_numeric = false;
    return base;
  }

  std::string encoding_choice() const {
    if (mode == SelectionMode::simple_only) return simple_encoder.describe();
    return std::string(to_string(mode)) + "(p=" + std::to_string(max_prototypes) +
           ",h=" + std::to_string(minhash_hashes) + ",d=" + std::to_string(gap_topics) + ")";
  }

  nlohmann::json to_json() const {
    return {{"index", index},
            {"seed", seed},
            {"mode", std::string(to_string(mode))},
            {"encoding", encoding_choice()},
            {"imputer", std::string(to_string(preproc.imputer))},
            {"scaler", std::string(to_string(preproc.scaler))},
            {"family", std::string(to_string(model.family))},
            {"hyperparams", model.describe()}};
  }

  bool operator==(const PipelineCandidate& o) const { return to_json() == o.to_json(); }
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& options) {
  return options[static_cast<std::size_t>(rng.below(options.size()))];
}

/// Uniform independent draw of every dimension from a generator seeded by
/// (seed, index). Dimensions are always drawn in the same order.
inline PipelineCandidate sample_candidate(const SearchSpace& space, std::uint64_t seed, std::size_t index) {
  space.validate();
  const std::uint64_t stream = derive_seed(seed, index);
  Rng rng(stream);
  PipelineCandidate c;
  c.index = index;
  c.seed = seed;
  c.mode = pick(rng, space.modes);
  const bool simple = std::find(space.modes.begin(), space.modes.end(), SelectionMode::simple_only) != space.modes.end();
  if (simple) {
    const auto kind = pick(rng, space.simple_kinds);
    const auto dims = pick(rng, space.hashing_dims);
    c.simple_encoder = kind == EncoderKind::hashing ? EncoderSpec::hashing(dims) : EncoderSpec{kind};
  }
  if (!space.max_prototypes.empty()) c.max_prototypes = pick(rng, space.max_prototypes);
  if (!space.minhash_hashes.empty()) c.minhash_hashes = pick(rng, space.minhash_hashes);
  if (!space.gap_topics.empty()) c.gap_topics = pick(rng, space.gap_topics);
  c.preproc.imputer = pick(rng, space.imputers);
  c.preproc.scaler = pick(rng, space.scalers);
  c.model.family = pick(rng, space.families);
  c.model.seed = stream;
  switch (c.model.family) {
    case ModelFamily::logistic_regression: c.model.l2 = pick(rng, space.logreg_l2); break;
    case ModelFamily::bernoulli_nb: c.model.alpha = pick(rng, space.nb_alpha); break;
    case ModelFamily::decision_tree: c.model.max_depth = pick(rng, space.tree_depth); break;
    case ModelFamily::random_forest:
      c.model.n_trees = pick(rng, space.forest_trees);
      c.model.max_depth = pick(rng, space.forest_depth);
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct CandidateResult {
  PipelineCandidate candidate;
  bool ok = false;
  std::string error_class;
  std::string error;
  std::string encoders;
  std::vector<double> fold_accuracy;
  std::vector<double> fold_logloss;
  double accuracy = 0.0;
  double logloss = 0.0;
  double seconds = 0.0;
};

struct FoldData {
  Dataset train;
  Dataset test;
  Labels train_labels;
  Labels test_labels;
};

struct EncodedFold {
  EncodingPlan plan;
  DesignMatrix train;
  DesignMatrix test;
};

/// Thread-safe compute-once memo. Values (or the exception thrown while
/// computing them) are shared by every caller asking for the same key.
template <typename V>
class Memo {
 public:
  template <typename Fn>
  std::shared_ptr<const V> get(const std::string& key, Fn&& compute) {
    std::shared_future<std::shared_ptr<const V>> fut;
    std::promise<std::shared_ptr<const V>> promise;
    bool owner = false;
    {
      std::lock_guard lock(mu_);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        fut = promise.get_future().share();
        entries_.emplace(key, fut);
        owner = true;
      } else {
        fut = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const V>(compute()));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const V>>> entries_;
};

struct EvaluationOptions {
  Metric metric = Metric::accuracy;
  VectorizerConfig vectorizer;
};

/// Shared state for evaluating many candidates against one dataset and split.
/// Encoders are fit on training partitions only; encoded folds and the
/// top-feature choice per fold are memoized across candidates.
class EvaluationContext {
 public:
  EvaluationContext(const Dataset& raw, SplitPlan split, EvaluationOptions opts)
      : opts_(std::move(opts)), split_(std::move(split)) {
    if (!raw.target()) throw UsageError("search needs a target column");
    data_ = resolve_missing(raw, opts_.vectorizer.inference.missing_tokens);
    labels_ = target_labels(data_);
    if (labels_.n_classes() < 2) throw DataError("target has a single class");
    if (split_.n_rows() != data_.n_rows()) throw UsageError("split does not match dataset rows");
    for (std::size_t f = 0; f < split_.n_folds(); ++f) {
      const auto tr = split_.train_indices(f);
      const auto te = split_.test_indices(f);
      folds_.push_back({data_.take_rows(tr), data_.take_rows(te), labels_.take(tr), labels_.take(te)});
    }
  }

  const Dataset& data() const noexcept { return data_; }
  const Labels& labels() const noexcept { return labels_; }
  const SplitPlan& split() const noexcept { return split_; }
  const std::vector<FoldData>& folds() const noexcept { return folds_; }
  const EvaluationOptions& options() const noexcept { return opts_; }

  std::shared_ptr<const EncodedFold> encode(const PipelineCandidate& cand, std::size_t fold) {
    const auto& fd = folds_[fold];
    const auto cfg = cand.vectorizer(opts_.vectorizer);
    const auto report = infer_types(fd.train, cfg.inference);
    std::optional<std::string> selected;
    if (cfg.mode == SelectionMode::top_feature_only && !report.categorical_columns().empty()) {
      selected = *selections_.get("select/" + std::to_string(fold),
                                  [&] { return most_predictive_categorical(fd.train, cfg); });
    }
    auto plan = plan_encoding(fd.train, report, cfg, selected);
    const std::string key = std::to_string(fold) + "/" + plan.to_json().dump();
    return encodings_.get(key, [&] {
      const auto pipeline = fit_pipeline(fd.train, plan, cfg, fd.train_labels);
      return EncodedFold{plan, pipeline.transform(fd.train), pipeline.transform(fd.test)};
    });
  }

 private:
  EvaluationOptions opts_;
  SplitPlan split_;
  Dataset data_;
  Labels labels_;
  std::vector<FoldData> folds_;
  Memo<std::string> selections_;
  Memo<EncodedFold> encodings_;
};

namespace search_detail {

inline std::string error_class_of(const std::exception& e) {
  if (dynamic_cast<const DataError*>(&e)) return "DataError";
  if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
  if (dynamic_cast<const FormatError*>(&e)) return "FormatError";
  return "Error";
}

}  // namespace search_detail

/// Fitted pipeline of one candidate on one training partition.
struct FittedCandidate {
  EncodingPlan plan;
  FittedPreproc preproc;
  Model model;
};

/// Mean over the split's folds of the candidate's test metrics; every fit
/// (type inference, feature selection, encoders, preprocessing, model) sees
/// the training partition only. A failing fold marks the candidate failed.
inline CandidateResult evaluate_candidate(const PipelineCandidate& cand, EvaluationContext& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  CandidateResult r;
  r.candidate = cand;
  try {
    for (std::size_t f = 0; f < ctx.folds().size(); ++f) {
      const auto& fd = ctx.folds()[f];
      if (fd.train_labels.distinct_present() < 2) {
        throw DataError("training fold " + std::to_string(f) + " has a single class");
      }
      const auto enc = ctx.encode(cand, f);
      if (f == 0) r.encoders = enc->plan.encoder_summary();
      auto [pre, x_train] = preprocess_fit_transform(cand.preproc, enc->train.to_dense());
      const auto x_test = pre.apply(enc->test.to_dense());
      const auto model = fit_model(cand.model, x_train, fd.train_labels.y, ctx.labels().n_classes());
      const auto proba = model.predict_proba(x_test);
      r.fold_accuracy.push_back(accuracy(fd.test_labels.y, argmax_rows(proba)));
      r.fold_logloss.push_back(log_loss(fd.test_labels.y, proba));
    }
    const double k = static_cast<double>(r.fold_accuracy.size());
    r.accuracy = std::accumulate(r.fold_accuracy.begin(), r.fold_accuracy.end(), 0.0) / k;
    r.logloss = std::accumulate(r.fold_logloss.begin(), r.fold_logloss.end(), 0.0) / k;
    r.ok = true;
  } catch (const Error& e) {
    r.ok = false;
    r.error_class = search_detail::error_class_of(e);
    r.error = e.what();
    r.fold_accuracy.clear();
    r.fold_logloss.clear();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline CandidateResult evaluate_candidate(const PipelineCandidate& cand, const Dataset& data,
                                          const SplitPlan& split, const EvaluationOptions& opts = {}) {
  EvaluationContext ctx(data, split, opts);
  return evaluate_candidate(cand, ctx);
}

/// Fits a candidate on the given rows of `ctx`'s dataset only.
inline FittedCandidate fit_candidate(const PipelineCandidate& cand, const Dataset& train,
                                     const EvaluationOptions& opts, std::size_t n_classes,
                                     const std::vector<std::string>& classes) {
  const auto cfg = cand.vectorizer(opts.vectorizer);
  const Dataset data = resolve_missing(train, cfg.inference.missing_tokens);
  Labels labels = target_labels(data);
  // Re-index onto the full class list.
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < classes.size(); ++i) idx[classes[i]] = static_cast<int>(i);
  for (auto& v : labels.y) v = idx.at(labels.classes[static_cast<std::size_t>(v)]);
  labels.classes = classes;
  const auto report = infer_types(data, cfg.inference);
  auto plan = plan_encoding(data, report, cfg);
  const auto pipeline = fit_pipeline(data, plan, cfg, labels);
  auto [pre, x] = preprocess_fit_transform(cand.preproc, pipeline.transform(data).to_dense());
  auto model = fit_model(cand.model, x, labels.y, n_classes);
  return {std::move(plan), std::move(pre), std::move(model)};
}

// ---------------------------------------------------------------------------
// Leaderboard
// ---------------------------------------------------------------------------

struct Leaderboard {
  Metric metric = Metric::accuracy;
  std::vector<CandidateResult> entries;  // successful, ranked
  std::vector<CandidateResult> failed;   // by candidate index

  const CandidateResult& best() const {
    if (entries.empty()) throw DataError("leaderboard has no successful pipeline");
    return entries.front();
  }
};

// Strict total order: optimized metric first, the other metric second,
// candidate index last.
inline bool ranks_before(const CandidateResult& a, const CandidateResult& b, Metric metric) noexcept {
  if (metric == Metric::accuracy) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    if (a.logloss != b.logloss) return a.logloss < b.logloss;
  } else {
    if (a.logloss != b.logloss) return a.logloss < b.logloss;
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
  }
  return a.candidate.index < b.candidate.index;
}

inline void sort_leaderboard(Leaderboard& lb) {
  std::stable_sort(lb.entries.begin(), lb.entries.end(),
                   [&](const auto& a, const auto& b) { return ranks_before(a, b, lb.metric); });
  std::stable_sort(lb.failed.begin(), lb.failed.end(),
                   [](const auto& a, const auto& b) { return a.candidate.index < b.candidate.index; });
}

struct Budget {
  std::size_t max_candidates = 0;  // 0 = unbounded
  double max_seconds = 0.0;        // 0 = unbounded
};

struct SearchOptions {
  Budget budget;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  EvaluationOptions evaluation;
};

/// Random search: evaluates candidates 0, 1, ... until the budget is spent.
/// The wall-clock budget is checked between batches of `threads`
/// candidates only. With a candidate budget the leaderboard is identical for
/// any thread count (timings aside).
inline Leaderboard search(const SearchSpace& space, EvaluationContext& ctx, const SearchOptions& opts) {
  space.validate();
  if (opts.budget.max_candidates == 0 && !(opts.budget.max_seconds > 0.0)) {
    throw UsageError("search budget must be positive");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t threads = std::max<std::size_t>(1, opts.threads);
  Leaderboard lb;
  lb.metric = ctx.options().metric;
  std::size_t next = 0;
  while (true) {
    std::size_t batch = threads;
    if (opts.budget.max_candidates) batch = std::min(batch, opts.budget.max_candidates - next);
    if (batch == 0) break;
    if (opts.budget.max_seconds > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= opts.budget.max_seconds) {
      break;
    }
    std::vector<CandidateResult> results(batch);
    parallel_for(batch, threads, [&](std::size_t i) {
      results[i] = evaluate_candidate(sample_candidate(space, opts.seed, next + i), ctx);
    });
    for (auto& r : results) (r.ok ? lb.entries : lb.failed).push_back(std::move(r));
    next += batch;
  }
  sort_leaderboard(lb);
  return lb;
}

inline Leaderboard search(const SearchSpace& space, const Dataset& data, const SplitPlan& split,
                          const SearchOptions& opts) {
  EvaluationContext ctx(data, split, opts.evaluation);
  return search(space, ctx, opts);
}

// ---------------------------------------------------------------------------
// Leaderboard analytics
// ---------------------------------------------------------------------------

struct FamilyStats {
  ModelFamily family;
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double variance = 0;  // sample variance (n - 1); 0 for a single entry
};

// Quantile of sorted values by linear interpolation at position (n-1)*p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw UsageError("quantile of an empty set");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double metric_value(const CandidateResult& r, Metric m) noexcept {
  return m == Metric::accuracy ? r.accuracy : r.logloss;
}

/// Box-plot statistics of the optimized metric per model family present.
inline std::vector<FamilyStats> family_summary(const Leaderboard& lb) {
  std::map<ModelFamily, std::vector<double>> by_family;
  for (const auto& e : lb.entries) by_family[e.candidate.model.family].push_back(metric_value(e, lb.metric));
  std::vector<FamilyStats> out;
  for (auto& [family, v] : by_family) {
    std::sort(v.begin(), v.end());
    FamilyStats s{family, v.size()};
    s.min = v.front();
    s.max = v.back();
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    if (v.size() > 1) {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double ss = 0.0;
      for (const double x : v) ss += (x - mean) * (x - mean);
      s.variance = ss / static_cast<double>(v.size() - 1);
    }
    out.push_back(s);
  }
  return out;
}

/// Length of the longest leaderboard prefix whose entries all belong to
/// `group`.
inline std::size_t top_family_run_length(const Leaderboard& lb, const std::set<ModelFamily>& group) {
  std::size_t n = 0;
  while (n < lb.entries.size() && group.contains(lb.entries[n].candidate.model.family)) ++n;
  return n;
}

inline const std::set<ModelFamily>& tree_based_families() {
  static const std::set<ModelFamily> group{ModelFamily::decision_tree, ModelFamily::random_forest};
  return group;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

// Shortest text that round-trips the double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace search_detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace search_detail

struct ExportOptions {
  // Wall times differ between runs; without this the seconds column is left
  // empty so that exports are byte-reproducible.
  bool include_timing = false;
};

inline std::string leaderboard_csv(const Leaderboard& lb, const ExportOptions& opts = {}) {
  using search_detail::csv_field;
  std::ostringstream out;
  out << "rank,index,family,encoder_kinds,preproc,hyperparams,accuracy,logloss,seconds,status\n";
  auto row = [&](const CandidateResult& r, std::string rank) {
    const auto& c = r.candidate;
    out << rank << ',' << c.index << ',' << to_string(c.model.family) << ','
        << csv_field(r.ok ? r.encoders : c.encoding_choice()) << ',' << csv_field(c.preproc.describe()) << ','
        << csv_field(c.model.describe()) << ',' << (r.ok ? format_double(r.accuracy) : "") << ','
        << (r.ok ? format_double(r.logloss) : "") << ','
        << (opts.include_timing ? format_double(r.seconds) : "") << ','
        << csv_field(r.ok ? "ok" : "failed:" + r.error_class) << '\n';
  };
  for (std::size_t i = 0; i < lb.entries.size(); ++i) row(lb.entries[i], std::to_string(i + 1));
  for (const auto& f : lb.failed) row(f, "");
  return std::move(out).str();
}

inline nlohmann::json leaderboard_json(const Leaderboard& lb, const ExportOptions& opts = {}) {
  auto entry = [&](const CandidateResult& r, std::optional<std::size_t> rank) {
    nlohmann::json j = r.candidate.to_json();
    j["rank"] = rank ? nlohmann::json(*rank) : nlohmann::json(nullptr);
    j["encoder_kinds"] = r.ok ? r.encoders : r.candidate.encoding_choice();
    j["preproc"] = r.candidate.preproc.describe();
    j["status"] = r.ok ? "ok" : "failed:" + r.error_class;
    if (r.ok) {
      j["accuracy"] = r.accuracy;
      j["logloss"] = r.logloss;
      j["fold_accuracy"] = r.fold_accuracy;
      j["fold_logloss"] = r.fold_logloss;
    } else {
      j["error"] = r.error;
    }
    j["seconds"] = opts.include_timing ? nlohmann::json(r.seconds) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json entries = nlohmann::json::array(), failed = nlohmann::json::array();
  for (std::size_t i = 0; i < lb.entries.size(); ++i) entries.push_back(entry(lb.entries[i], i + 1));
  for (const auto& f : lb.failed) failed.push_back(entry(f, std::nullopt));
  return {{"metric", std::string(to_string(lb.metric))}, {"entries", entries}, {"failed", failed}};
}

inline std::string family_summary_csv(const std::vector<FamilyStats>& stats) {
  std::ostringstream out;
  out << "family,count,min,q1,median,q3,max,variance\n";
  for (const auto& s : stats) {
    out << to_string(s.family) << ',' << s.count << ',' << format_double(s.min) << ',' << format_double(s.q1)
        << ',' << format_double(s.median) << ',' << format_double(s.q3) << ',' << format_double(s.max) << ','
        << format_double(s.variance) << '\n';
  }
  return std::move(out).str();
}

}  // namespace dirtyml
