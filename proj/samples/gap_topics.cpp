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

// Fits a GAP encoder to a handful of misspelled city names and prints the
// top n-grams of each topic plus the activations of a few levels.

#include <cstdio>

#include "dirtyml.hpp"

int main() {
  using namespace dirtyml;
  const Column city("city", {"London", "london ", "Londres", "Londn", "Paris", "paris", "Pariss", "Parigi",
                             "Berlin", "berlin", "Berlim", "Brelin"});
  auto spec = EncoderSpec{EncoderKind::gap};
  spec.n_topics = 3;
  spec.fold_case = true;
  spec.seed = 1;
  const auto enc = fit(spec, city);

  const auto terms = gap_topic_terms(enc, 4);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    std::printf("topic %zu:", k);
    for (const auto& t : terms[k]) std::printf(" '%s'", t.c_str());
    std::printf("\n");
  }
  for (const char* level : {"London", "Pariis", "Berln"}) {
    std::printf("%-8s", level);
    for (const double v : enc.encode_level(level)) std::printf(" %6.2f", v);
    std::printf("\n");
  }
}
