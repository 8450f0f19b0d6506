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

// Experiment pipeline: split in half, fit f and H on the training half, cut
// the test half into tenths, inverse-classify each tenth with f and score the
// result with f' (and H') fitted on the remaining nine tenths.

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "invclass/config.hpp"
#include "invclass/dataset.hpp"
#include "invclass/engine.hpp"

namespace invclass {

// Exchanges train and test and re-cuts the new test half into `folds`.
SplitPlan swap_roles(const SplitPlan& plan, std::uint64_t seed);

// Everything that does not depend on optimizer, policy or budget. Shared by
// all sweeps over one classifier.
struct PreparedExperiment {
  ExperimentConfig config;
  ClassifierKind classifier = ClassifierKind::kSvm;
  SplitPlan split;
  DatasetSchema schema;
  ResolvedProblem problem;
  MatrixXd train;  // normalized
  VectorXd train_labels;
  MatrixXd test;   // normalized, rows in split.test order
  VectorXd test_labels;
  std::vector<std::string> test_ids;
  std::shared_ptr<const ProbabilityModel> model;
  std::shared_ptr<const IndirectModel> indirect;
  // One validation classifier/estimator per fold, fitted without that fold.
  std::vector<std::shared_ptr<const ProbabilityModel>> validation_models;
  std::vector<std::shared_ptr<const IndirectModel>> validation_indirect;
  std::shared_ptr<const SupportIndex> support;
  double seconds = 0.0;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& config, const Dataset& data,
                                      ClassifierKind classifier);

struct BudgetRow {
  std::string classifier;
  std::string optimizer;
  std::string policy;
  double budget = 0.0;
  long instances = 0;
  long failures = 0;
  double mean_probability = 0.0;         // f' after
  double mean_probability_before = 0.0;  // f' before
  double mean_model_probability = 0.0;   // f after
  double mean_cost = 0.0;
  double mean_epsilon = 0.0;
  double mean_gamma = 0.0;
  double baseline_gamma = 0.0;
};

struct InstanceFailure {
  std::string instance_id;
  double budget = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<BudgetRow> rows;  // one per budget, in grid order
  std::vector<RecommendationReport> reports;
  std::vector<InstanceFailure> failures;
  double seconds = 0.0;
};

using ProgressFn = std::function<void(const std::string&)>;

SweepResult run_sweep(const PreparedExperiment& prepared, OptimizerKind optimizer,
                      BoundPolicy policy, const std::vector<double>& budgets,
                      const ProgressFn& progress = nullptr);

// Single configuration exactly as described by `config`.
SweepResult run_pipeline(const ExperimentConfig& config, const Dataset& data,
                         const ProgressFn& progress = nullptr);

struct GridResult {
  std::vector<BudgetRow> rows;
  std::vector<RecommendationReport> reports;
  std::vector<InstanceFailure> failures;
  double seconds = 0.0;
};

GridResult run_grid(const ExperimentConfig& config, const Dataset& data,
                    const std::vector<ClassifierKind>& classifiers,
                    const std::vector<OptimizerKind>& optimizers,
                    const std::vector<BoundPolicy>& policies,
                    const ProgressFn& progress = nullptr);

std::string budget_rows_csv(const std::vector<BudgetRow>& rows);
nlohmann::json to_json(const BudgetRow& row);

// Loads config.dataset_path into a Dataset.
Dataset load_dataset(const ExperimentConfig& config);

}  // namespace invclass
