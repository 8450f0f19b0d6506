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

// Small synthetic populations shared by the harness tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "invclass/config.hpp"
#include "invclass/dataset.hpp"

namespace invclass::testing {

// Two Gaussian classes. Risk (y = +1) rises with d1 and d2, so lowering
// them is always the right move; i1 tracks d1, u1/u2 are noise.
inline Dataset two_gaussians(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  d.feature_names = {"d1", "d2", "i1", "u1", "u2"};
  d.X.resize(n, 5);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    const double c = pos ? 0.68 : 0.32;
    d.X(i, 0) = std::clamp(c + 0.15 * noise(rng), 0.0, 1.0);
    d.X(i, 1) = std::clamp(c + 0.15 * noise(rng), 0.0, 1.0);
    d.X(i, 2) = std::clamp(0.8 * d.X(i, 0) + 0.1 + 0.05 * noise(rng), 0.0, 1.0);
    d.X(i, 3) = std::clamp(0.5 + 0.2 * noise(rng), 0.0, 1.0);
    d.X(i, 4) = std::clamp(0.5 + 0.2 * noise(rng), 0.0, 1.0);
    d.y[i] = pos ? 1.0 : -1.0;
    d.ids.push_back(std::to_string(i));
  }
  return d;
}

inline ExperimentConfig two_gaussians_config() {
  ExperimentConfig c;
  c.direct = {"d1", "d2"};
  c.indirect = {"i1"};
  c.unchangeable = {"u1", "u2"};
  c.costs["d1"] = {0.0, 1.0};
  c.costs["d2"] = {0.0, 2.0};
  c.classifier = ClassifierKind::kLogistic;
  c.grid.box = {1.0};
  c.grid.sigma = {1.0};
  c.bandwidth_grid = {0.1, 0.3};
  c.budgets = {0.0, 0.5, 1.0, 2.0};
  c.seed = 4;
  return c;
}

}  // namespace invclass::testing
