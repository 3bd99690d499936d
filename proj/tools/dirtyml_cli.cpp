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

// Command-line front end:
//   dirtyml infer-types | encode | select-feature | search | gen-synthetic
// Exit status: 0 success, 1 usage error, 2 data error, 3 failed run.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dirtyml.hpp"

namespace fs = std::filesystem;
using namespace dirtyml;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kFailed = 3 };

// Thrown when a run completes but produces nothing usable.
struct RunFailure : Error {
  using Error::Error;
};

std::mutex out_mu;

void emit(const std::string& text) {
  std::lock_guard lock(out_mu);
  std::cout << text << std::flush;
}

std::string file_checksum(const std::string& path) { return to_hex64(fnv1a64(read_file(path))); }

nlohmann::json provenance(const std::string& command, const nlohmann::json& config,
                          const std::optional<std::string>& input) {
  nlohmann::json p{{"tool", "dirtyml"}, {"version", std::string(kVersion)}, {"command", command}, {"config", config}};
  if (input) {
    p["input"] = *input;
    p["input_checksum"] = file_checksum(*input);
  }
  return p;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory '" + dir + "': " + ec.message());
}

// Config file first, explicit flags on top.
RunConfig base_config(const std::string& config_path) {
  RunConfig cfg;
  if (!config_path.empty()) {
    if (!fs::exists(config_path)) throw UsageError("config file '" + config_path + "' not found");
    cfg.merge(load_config_file(config_path));
  }
  return cfg;
}

Dataset load_input(const std::string& path, const std::optional<std::string>& target) {
  if (!fs::exists(path)) throw UsageError("input file '" + path + "' not found");
  Dataset d = load_csv(path);
  if (target) {
    if (!d.find(*target)) throw UsageError("target column '" + *target + "' not in input");
    d = d.with_target(*target);
  }
  return d;
}

std::string design_csv(const DesignMatrix& m, const std::vector<std::string>& comments) {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << '\n';
  const auto labels = m.column_labels();
  for (std::size_t j = 0; j < labels.size(); ++j) out << (j ? "," : "") << labels[j];
  out << '\n';
  const Matrix x = m.to_dense();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out << (c ? "," : "") << format_double(x(r, c));
    out << '\n';
  }
  return std::move(out).str();
}

// ---------------------------------------------------------------------------

struct InferArgs {
  std::string input, config, expect;
  std::optional<std::string> target;
  std::optional<double> threshold;
};

int run_infer(const InferArgs& a) {
  RunConfig cfg = base_config(a.config);
  if (a.threshold) cfg.vectorizer.inference.numeric_threshold = *a.threshold;
  cfg.validate();
  const Dataset raw = load_input(a.input, a.target);
  const auto& inf = cfg.vectorizer.inference;
  const auto report = infer_types(resolve_missing(raw, inf.missing_tokens), inf);
  nlohmann::json out{{"columns", to_json(report)}, {"provenance", provenance("infer-types", cfg.to_json(), a.input)}};
  if (!a.expect.empty()) {
    const auto check = check_manifest(raw, reference_manifest(a.expect), inf);
    out["manifest"] = {{"name", a.expect}, {"ok", check.ok}, {"mismatches", check.mismatches}};
    emit(out.dump(2) + "\n");
    if (!check.ok) throw DataError("input does not match manifest '" + a.expect + "'");
    return kOk;
  }
  emit(out.dump(2) + "\n");
  return kOk;
}

// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string input, column, encoder, out, encoder_out, config;
  std::optional<std::string> target;
  EncoderSpec spec;
};

int run_encode(EncodeArgs a) {
  RunConfig cfg = base_config(a.config);
  cfg.validate();
  a.spec.kind = parse_encoder_kind(a.encoder);
  a.spec.validate();
  const Dataset raw = load_input(a.input, a.target);
  if (!raw.find(a.column)) throw DataError("column '" + a.column + "' not in input");
  if (raw.is_target(a.column)) throw UsageError("cannot encode the target column '" + a.column + "'");
  const auto& inf = cfg.vectorizer.inference;
  const Dataset data = resolve_missing(raw, inf.missing_tokens);
  const auto prof = infer_types(data, inf).at(a.column);
  if (prof.type == FeatureType::numeric || prof.type == FeatureType::all_missing) {
    throw DataError("column '" + a.column + "' is " + std::string(to_string(prof.type)) + ", not categorical");
  }
  std::optional<Labels> labels;
  if (a.spec.kind == EncoderKind::target) {
    if (!a.target) throw UsageError("the target encoder needs --target");
    labels = target_labels(data);
  }
  const auto enc = fit(a.spec, data.column(a.column), labels);
  const auto matrix = enc.transform(data.column(a.column));

  const std::string enc_path = a.encoder_out.empty() ? a.out + ".encoder.json" : a.encoder_out;
  const auto prov = provenance("encode", cfg.to_json(), a.input);
  nlohmann::json run{{"column", a.column}, {"encoder", a.spec.to_json()}, {"encoder_file", enc_path}};
  if (const auto parent = fs::path(a.out).parent_path(); !parent.empty()) ensure_dir(parent.string());
  write_text_file(a.out, design_csv(matrix, {"dirtyml " + std::string(kVersion) + " encode",
                                             "input " + a.input + " checksum " + prov["input_checksum"].get<std::string>(),
                                             "run " + run.dump(), "config " + cfg.to_json().dump()}));
  if (const auto parent = fs::path(enc_path).parent_path(); !parent.empty()) ensure_dir(parent.string());
  save_encoder(enc, enc_path);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SelectArgs {
  std::string input, target, config;
  std::optional<std::uint64_t> seed;
};

int run_select(const SelectArgs& a) {
  RunConfig cfg = base_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const Dataset raw = load_input(a.input, a.target);
  auto vz = cfg.vectorizer;
  vz.importance.seed = cfg.seed;
  const Dataset data = resolve_missing(raw, vz.inference.missing_tokens);
  const auto report = infer_types(data, vz.inference);
  if (report.categorical_columns().empty()) throw DataError("input has no categorical feature column");
  const auto scores = feature_importance(data, vz);
  nlohmann::json js = nlohmann::json::array();
  for (const auto& s : scores) {
    js.push_back({{"column", s.name}, {"type", std::string(to_string(report.at(s.name).type))}, {"importance", s.importance}});
  }
  nlohmann::json out{{"selected", most_predictive_categorical(data, vz)},
                     {"importance", js},
                     {"provenance", provenance("select-feature", cfg.to_json(), a.input)}};
  emit(out.dump(2) + "\n");
  return kOk;
}

// ---------------------------------------------------------------------------

struct SearchArgs {
  std::string input, target, out, config, mode, metric;
  std::optional<std::size_t> budget_candidates, kfold, threads;
  std::optional<double> budget_seconds, holdout;
  std::optional<std::uint64_t> seed;
  bool stratify = false, timing = false;
};

int run_search(const SearchArgs& a) {
  RunConfig cfg = base_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.budget_candidates) cfg.budget_candidates = *a.budget_candidates;
  if (a.budget_seconds) cfg.budget_seconds = *a.budget_seconds;
  if (a.kfold) {
    cfg.split = SplitKind::kfold;
    cfg.kfold = *a.kfold;
  }
  if (a.holdout) {
    cfg.split = SplitKind::holdout;
    cfg.holdout = *a.holdout;
  }
  if (a.threads) cfg.threads = *a.threads;
  if (!a.mode.empty()) cfg.vectorizer.mode = parse_selection_mode(a.mode);
  if (!a.metric.empty()) cfg.metric = parse_metric(a.metric);
  if (a.stratify) cfg.stratify = true;
  if (a.timing) cfg.timing = true;
  if (!a.out.empty()) cfg.out_dir = a.out;
  if (cfg.out_dir.empty()) throw UsageError("search needs --out");
  if (cfg.budget_candidates == 0 && !(cfg.budget_seconds > 0.0)) {
    throw UsageError("search needs --budget-candidates or --budget-seconds");
  }
  cfg.validate();

  const Dataset raw = load_input(a.input, a.target);
  const SplitPlan split = make_split(cfg, raw);
  const auto lb = search(cfg.search_space(), raw, split, cfg.search_options());

  ensure_dir(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  const ExportOptions ex{cfg.timing};
  write_text_file((dir / "leaderboard.csv").string(), leaderboard_csv(lb, ex));
  auto js = leaderboard_json(lb, ex);
  js["provenance"] = provenance("search", cfg.to_json(), a.input);
  write_text_file((dir / "leaderboard.json").string(), js.dump(2) + "\n");
  write_text_file((dir / "family_summary.csv").string(), family_summary_csv(family_summary(lb)));
  write_text_file((dir / "run_config.json").string(), provenance("search", cfg.to_json(), a.input).dump(2) + "\n");

  if (lb.entries.empty()) throw RunFailure("no candidate pipeline completed");
  const auto& best = lb.best();
  std::ostringstream msg;
  msg << "evaluated " << lb.entries.size() + lb.failed.size() << " candidates (" << lb.failed.size()
      << " failed); best #" << best.candidate.index << " " << to_string(best.candidate.model.family) << " "
      << best.encoders << " accuracy=" << format_double(best.accuracy) << " logloss=" << format_double(best.logloss)
      << "\n";
  emit(msg.str());
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  SyntheticSpec spec;
};

int run_synthetic(const SynthArgs& a) {
  a.spec.validate();
  const Dataset d = gen_synthetic(a.spec);
  if (const auto parent = fs::path(a.out).parent_path(); !parent.empty()) ensure_dir(parent.string());
  write_text_file(a.out, to_csv(d));
  nlohmann::json prov{{"tool", "dirtyml"},
                      {"version", std::string(kVersion)},
                      {"command", "gen-synthetic"},
                      {"spec", a.spec.to_json()},
                      {"generator", "xoshiro256** seeded by splitmix64"},
                      {"output_checksum", file_checksum(a.out)}};
  write_text_file(a.out + ".provenance.json", prov.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoders and pipeline search for dirty categorical tables"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  InferArgs infer;
  auto* c_infer = app.add_subcommand("infer-types", "Print inferred column types as JSON");
  c_infer->add_option("--input", infer.input, "CSV file")->required();
  c_infer->add_option("--config", infer.config, "Config file");
  c_infer->add_option("--target", infer.target, "Target column");
  c_infer->add_option("--numeric-threshold", infer.threshold, "Share of parseable cells for numeric");
  c_infer->add_option("--expect", infer.expect, "Check against a named dataset manifest");

  EncodeArgs enc;
  auto* c_enc = app.add_subcommand("encode", "Fit one encoder to one column and write the encoded matrix");
  c_enc->add_option("--input", enc.input, "CSV file")->required();
  c_enc->add_option("--column", enc.column, "Column to encode")->required();
  c_enc->add_option("--encoder", enc.encoder,
                    "one_hot|ordinal|hashing|target|similarity|minhash|gap")->required();
  c_enc->add_option("--out", enc.out, "Output CSV")->required();
  c_enc->add_option("--encoder-out", enc.encoder_out, "Fitted encoder file (default <out>.encoder.json)");
  c_enc->add_option("--target", enc.target, "Target column (target encoder)");
  c_enc->add_option("--config", enc.config, "Config file");
  c_enc->add_option("--dims", enc.spec.hashing_dims, "Hashing dimension")->capture_default_str();
  c_enc->add_option("--smoothing", enc.spec.smoothing, "Target smoothing")->capture_default_str();
  c_enc->add_option("--prototypes", enc.spec.max_prototypes, "Similarity prototypes")->capture_default_str();
  c_enc->add_option("--hashes", enc.spec.n_hashes, "Min-hash functions")->capture_default_str();
  c_enc->add_option("--gram", enc.spec.gram, "Character n-gram size")->capture_default_str();
  c_enc->add_option("--topics", enc.spec.n_topics, "GAP topics")->capture_default_str();
  c_enc->add_option("--max-iters", enc.spec.max_iters, "GAP iterations")->capture_default_str();
  c_enc->add_option("--tol", enc.spec.tol, "GAP relative tolerance")->capture_default_str();
  c_enc->add_option("--seed", enc.spec.seed, "Seed")->capture_default_str();
  c_enc->add_flag("--fold-case", enc.spec.fold_case, "Lower-case ASCII before n-grams");

  SelectArgs sel;
  auto* c_sel = app.add_subcommand("select-feature", "Rank features by forest importance");
  c_sel->add_option("--input", sel.input, "CSV file")->required();
  c_sel->add_option("--target", sel.target, "Target column")->required();
  c_sel->add_option("--seed", sel.seed, "Seed");
  c_sel->add_option("--config", sel.config, "Config file");

  SearchArgs srch;
  auto* c_search = app.add_subcommand("search", "Random pipeline search");
  c_search->add_option("--input", srch.input, "CSV file")->required();
  c_search->add_option("--target", srch.target, "Target column")->required();
  c_search->add_option("--budget-candidates", srch.budget_candidates, "Number of candidates");
  c_search->add_option("--budget-seconds", srch.budget_seconds, "Wall-clock budget");
  c_search->add_option("--seed", srch.seed, "Seed");
  auto* kf = c_search->add_option("--kfold", srch.kfold, "K-fold cross-validation");
  auto* ho = c_search->add_option("--holdout", srch.holdout, "Holdout test fraction");
  kf->excludes(ho);
  c_search->add_option("--mode", srch.mode, "top_feature_only|all_categorical|simple_only");
  c_search->add_option("--metric", srch.metric, "accuracy|log_loss");
  c_search->add_option("--threads", srch.threads, "Worker threads");
  c_search->add_flag("--stratify", srch.stratify, "Stratified holdout");
  c_search->add_flag("--timing", srch.timing, "Record candidate wall times in exports");
  c_search->add_option("--out", srch.out, "Output directory");
  c_search->add_option("--config", srch.config, "Config file");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("gen-synthetic", "Write a dirty categorical dataset");
  c_syn->add_option("--rows", syn.spec.n_rows, "Rows")->required();
  c_syn->add_option("--levels", syn.spec.n_levels, "Distinct clean levels")->required();
  c_syn->add_option("--typo-rate", syn.spec.typo_rate, "Per-cell typo probability")->required();
  c_syn->add_option("--seed", syn.spec.seed, "Seed")->required();
  c_syn->add_option("--out", syn.out, "Output CSV")->required();
  c_syn->add_option("--classes", syn.spec.class_count, "Classes")->capture_default_str();
  c_syn->add_option("--topics", syn.spec.n_topics, "Substring pools (0 = one per class)")->capture_default_str();
  c_syn->add_option("--topic-length", syn.spec.topic_length, "Substring length")->capture_default_str();
  c_syn->add_option("--noise", syn.spec.n_noise_features, "Noise columns")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_infer) return run_infer(infer);
    if (*c_enc) return run_encode(enc);
    if (*c_sel) return run_select(sel);
    if (*c_search) return run_search(srch);
    if (*c_syn) return run_synthetic(syn);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const RunFailure& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
