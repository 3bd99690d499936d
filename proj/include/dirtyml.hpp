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

#include "dirtyml/config.hpp"
#include "dirtyml/encoders.hpp"
#include "dirtyml/encoders/serialize.hpp"
#include "dirtyml/error.hpp"
#include "dirtyml/hash.hpp"
#include "dirtyml/labels.hpp"
#include "dirtyml/manifest.hpp"
#include "dirtyml/models.hpp"
#include "dirtyml/ngram.hpp"
#include "dirtyml/random.hpp"
#include "dirtyml/search.hpp"
#include "dirtyml/synthetic.hpp"
#include "dirtyml/tabular.hpp"
#include "dirtyml/type_inference.hpp"
#include "dirtyml/vectorizer.hpp"

namespace dirtyml {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace dirtyml
