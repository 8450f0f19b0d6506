/*
 * Copyright 2026 The invclass Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "invclass/core.hpp"

#include <algorithm>
#include <cctype>

namespace invclass {

std::string to_string(BoundPolicy policy) {
  return policy == BoundPolicy::kHardline ? "hardline" : "elastic";
}

BoundPolicy parse_bound_policy(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "hardline" || lower == "hard-line") return BoundPolicy::kHardline;
  if (lower == "elastic") return BoundPolicy::kElastic;
  throw ArgumentError("unknown bound policy '" + name + "'");
}

void FeaturePartition::validate(Index p) const {
  if (direct.empty()) throw ArgumentError("partition: direct set D is empty");
  std::vector<int> seen(static_cast<size_t>(std::max<Index>(p, 0)), 0);
  for (const IndexList* set : {&unchangeable, &indirect, &direct}) {
    for (Index i : *set) {
      if (i < 0 || i >= p) {
        throw ArgumentError("partition: feature index " + std::to_string(i) +
                            " out of range");
      }
      if (seen[static_cast<size_t>(i)]++ != 0) {
        throw ArgumentError("partition: feature index " + std::to_string(i) +
                            " appears in more than one set");
      }
    }
  }
  if (width() != p) {
    throw ArgumentError("partition: U, I, D must cover all " +
                        std::to_string(p) + " features");
  }
}

}  // namespace invclass
