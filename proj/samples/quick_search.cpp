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

// Generates a dirty synthetic table and runs a short random search over
// pipelines, printing the five best candidates.

#include <cstdio>

#include "dirtyml.hpp"

int main(int argc, char** argv) {
  using namespace dirtyml;
  SyntheticSpec spec;
  spec.n_rows = 1500;
  spec.n_levels = 400;
  spec.typo_rate = 0.1;
  spec.seed = 7;
  const auto data = gen_synthetic(spec);

  SearchOptions opts;
  opts.budget.max_candidates = argc > 1 ? std::stoul(argv[1]) : 20;
  opts.seed = 3;
  opts.evaluation.vectorizer.mode = SelectionMode::top_feature_only;
  const auto lb = search(SearchSpace{}, data, make_holdout(data.n_rows(), 0.25, 3), opts);

  for (std::size_t i = 0; i < lb.entries.size() && i < 5; ++i) {
    const auto& e = lb.entries[i];
    std::printf("%zu. %-20s %-28s acc=%.4f logloss=%.4f\n", i + 1,
                std::string(to_string(e.candidate.model.family)).c_str(), e.encoders.c_str(), e.accuracy,
                e.logloss);
  }
  std::printf("%zu failed\n", lb.failed.size());
}
