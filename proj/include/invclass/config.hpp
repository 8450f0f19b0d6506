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

// Experiment / service configuration document.
//
//   {
//     "dataset":   {"path": "data.csv", "delimiter": ",", "label": "y",
//                   "id": "id", "positive": 1},
//     "partition": {"direct": [...], "indirect": [...], "unchangeable": [...]},
//     "costs":     {"<feature>": {"up": 2.0, "down": 0.0}, ...},
//     "bounds":    {"<feature>": {"lower": 0.0, "upper": 1.0}, ...},
//     "policy":    "hardline" | "elastic" |
//                  {"default": "hardline", "overrides": {"<feature>": "elastic"}},
//     "model":     {"type": "svm", "C": [...], "sigma": [...], "ridge": [...],
//                   "folds": 5, "bandwidth": [...]},
//     "optimizer": {"method": "pgd", "max_iter": 1000, "tol": 1e-6,
//                   "step": "auto" | <number> | "lipschitz"},
//     "budgets":   [0, 1, 2] | {"start": 0, "stop": 20, "step": 1},
//     "seed":      1
//   }
//
// Features are referenced by CSV column name. Features not named in the
// partition are unchangeable. Costs are budget units per unit of normalized
// feature change; bounds are in normalized units and default to [0, 1].

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invclass/core.hpp"
#include "invclass/models.hpp"
#include "invclass/optimizer.hpp"

namespace invclass {

struct FeatureCost {
  double up = 0.0;
  double down = 0.0;
};

struct FeatureBounds {
  double lower = 0.0;
  double upper = 1.0;
};

struct ExperimentConfig {
  std::string dataset_path;
  char delimiter = ',';
  std::string label_column = "y";
  std::string id_column;
  double positive_value = 1.0;

  std::vector<std::string> direct;
  std::vector<std::string> indirect;
  std::vector<std::string> unchangeable;

  std::map<std::string, FeatureCost> costs;
  std::map<std::string, FeatureBounds> bounds;
  BoundPolicy policy = BoundPolicy::kHardline;
  std::map<std::string, BoundPolicy> policy_overrides;

  ClassifierKind classifier = ClassifierKind::kSvm;
  ModelGrid grid;
  std::vector<double> bandwidth_grid;

  OptimizerKind optimizer = OptimizerKind::kPgd;
  OptimizerConfig optimizer_config;

  std::vector<double> budgets;
  std::uint64_t seed = 1;
  bool swap_roles = false;
  int support_k = 10;

  // Throws ConfigError.
  void validate() const;
};

// `base_dir` resolves a relative dataset path.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = "");
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

// Expands "0:20:1" or "0,1,2.5".
std::vector<double> parse_budget_list(const std::string& text);

struct ResolvedProblem {
  FeaturePartition partition;
  CostBudgetSpec<double> spec;  // over D in partition order; budget 0
};

// Maps names to column indices of `feature_names`.
ResolvedProblem resolve(const ExperimentConfig& config,
                        const std::vector<std::string>& feature_names);

}  // namespace invclass
