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

// Ties the pieces together for a single instance: build the reduced
// objective, optimize, validate and package a RecommendationReport.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "invclass/config.hpp"
#include "invclass/dataset.hpp"
#include "invclass/indirect.hpp"
#include "invclass/metrics.hpp"
#include "invclass/models.hpp"
#include "invclass/optimizer.hpp"

namespace invclass {

struct FeatureChange {
  std::string feature;
  double delta = 0.0;      // normalized units
  double delta_raw = 0.0;  // raw units
  double before_raw = 0.0;
  double after_raw = 0.0;
  double effective_lower = 0.0;  // l', normalized delta units
  double effective_upper = 0.0;  // u'
};

struct TraceSummary {
  int iterations = 0;
  std::string termination;
  double initial_value = 0.0;
  double final_value = 0.0;
};

struct RecommendationReport {
  std::string instance_id;
  double budget = 0.0;
  std::string optimizer;
  std::string policy;
  std::vector<FeatureChange> changes;  // one per directly changeable feature
  double cost_spent = 0.0;
  // Scored by the validation model when one is supplied, else by f.
  double probability_before = 0.0;
  double probability_after = 0.0;
  // Always scored by f (the model that was optimized against).
  double model_probability_before = 0.0;
  double model_probability_after = 0.0;
  TraceSummary trace;
  std::optional<SupportReport> support;
};

nlohmann::json to_json(const RecommendationReport& report);
RecommendationReport report_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SupportReport& report);
nlohmann::json trace_to_json_lines(const OptimizationTrace& trace);

// Everything needed to recommend for one instance. Pointers may be null
// where noted.
struct RecommendContext {
  const ProbabilityModel* model = nullptr;
  const IndirectModel* indirect = nullptr;             // optional
  const ProbabilityModel* validation_model = nullptr;  // optional
  const IndirectModel* validation_indirect = nullptr;  // optional
  const DatasetSchema* schema = nullptr;
  const FeaturePartition* partition = nullptr;
  const SupportIndex* support = nullptr;  // optional
};

// `instance` is normalized. Failures inside the optimizer propagate as
// OptimizationError.
RecommendationReport recommend(const RecommendContext& context, const VectorXd& instance,
                               const CostBudgetSpec<double>& spec, OptimizerKind optimizer,
                               const OptimizerConfig& config, const std::string& instance_id,
                               OptimizationTrace* trace_out = nullptr);

// A trained classifier and indirect estimator together with the schema,
// partition and default costs, as served and exchanged on disk.
struct ModelBundle {
  DatasetSchema schema;
  FeaturePartition partition;
  CostBudgetSpec<double> base_spec;  // budget 0
  std::shared_ptr<const ProbabilityModel> classifier;
  std::shared_ptr<const IndirectModel> indirect;  // null when I is empty
  OptimizerKind optimizer = OptimizerKind::kPgd;
  OptimizerConfig optimizer_config;
  MatrixXd training;  // normalized rows used for support diagnostics
  int support_k = 10;
  std::shared_ptr<const SupportIndex> support;

  std::vector<std::string> direct_names() const;
  RecommendContext context() const;
  // Rebuilds `support` from `training`.
  void index_support();
};

// Fits schema, classifier and estimator on every row of `data`.
ModelBundle train_bundle(const ExperimentConfig& config, const Dataset& data);

nlohmann::json to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const nlohmann::json& doc);
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

nlohmann::json classifier_to_json(const ProbabilityModel& model);
std::unique_ptr<ProbabilityModel> classifier_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const IndirectModel& model);
IndirectModel indirect_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DatasetSchema& schema);
DatasetSchema schema_from_json(const nlohmann::json& doc);

struct FrequencyRow {
  std::string feature;
  long count = 0;     // reports with |delta| > 1e-6
  long eligible = 0;  // reports where the feature could move in a changed direction
  double share = 0.0; // count / eligible
};

// Ranked by count (ties by first appearance order of the feature).
std::vector<FrequencyRow> frequency_table(const std::vector<RecommendationReport>& reports,
                                          double budget);

}  // namespace invclass
