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

#include "invclass/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

namespace invclass {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

MatrixXd rows_of(const MatrixXd& m, const std::vector<Index>& rows) { return m(rows, Eigen::all); }

VectorXd rows_of(const VectorXd& v, const std::vector<Index>& rows) { return v(rows); }

}  // namespace

SplitPlan swap_roles(const SplitPlan& plan, std::uint64_t seed) {
  SplitPlan out;
  out.folds = plan.folds;
  out.train = plan.test;
  out.test = plan.train;
  out.test_fold = kfold_assignment(static_cast<Index>(out.test.size()), plan.folds, seed);
  return out;
}

Dataset load_dataset(const ExperimentConfig& config) {
  CsvOptions options;
  options.delimiter = config.delimiter;
  options.required_columns.push_back(config.label_column);
  if (!config.id_column.empty()) options.required_columns.push_back(config.id_column);
  const RawTable table = load_csv(config.dataset_path, options);
  return make_dataset(table, config.label_column, config.id_column, config.positive_value);
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config, const Dataset& data,
                                      ClassifierKind classifier) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  PreparedExperiment p;
  p.config = config;
  p.classifier = classifier;
  p.problem = resolve(config, data.feature_names);

  p.split = make_split(data.rows(), config.seed);
  if (config.swap_roles) p.split = swap_roles(p.split, config.seed + 1);

  // Step 1: scaling statistics come from the training half only.
  p.schema = fit_preprocess(rows_of(data.X, p.split.train), data.feature_names);
  p.schema.label_column = config.label_column;
  p.schema.id_column = config.id_column;
  p.train = apply_preprocess(rows_of(data.X, p.split.train), p.schema);
  p.train_labels = rows_of(data.y, p.split.train);
  p.test = apply_preprocess(rows_of(data.X, p.split.test), p.schema);
  p.test_labels = rows_of(data.y, p.split.test);
  for (Index r : p.split.test) {
    p.test_ids.push_back(data.ids.empty() ? std::to_string(r) : data.ids[static_cast<size_t>(r)]);
  }

  // Step 2(a).
  const auto& bw = config.bandwidth_grid.empty() ? default_bandwidth_grid() : config.bandwidth_grid;
  const bool has_indirect = !p.problem.partition.indirect.empty();
  p.model = train_classifier(classifier, p.train, p.train_labels, config.grid, config.seed);
  if (has_indirect) {
    p.indirect = std::make_shared<const IndirectModel>(
        fit_indirect(p.train, p.problem.partition, bw, config.grid.folds, config.seed));
  }

  // Step 3(b): f' and H' never see the fold they validate.
  const std::vector<Index> all_test = [&] {
    std::vector<Index> v(p.split.test.size());
    std::iota(v.begin(), v.end(), Index{0});
    return v;
  }();
  for (int k = 0; k < p.split.folds; ++k) {
    std::vector<Index> rest;
    for (Index i : all_test) {
      if (p.split.test_fold[static_cast<size_t>(i)] != k) rest.push_back(i);
    }
    const MatrixXd X = rows_of(p.test, rest);
    const VectorXd y = rows_of(p.test_labels, rest);
    p.validation_models.push_back(train_classifier(classifier, X, y, config.grid, config.seed + 1 + k));
    p.validation_indirect.push_back(
        has_indirect ? std::make_shared<const IndirectModel>(fit_indirect(
                           X, p.problem.partition, bw, config.grid.folds, config.seed + 1 + k))
                     : nullptr);
  }

  if (p.train.rows() > config.support_k) {
    p.support = std::make_shared<const SupportIndex>(p.train, *p.model, config.support_k);
  }
  p.seconds = elapsed_since(start);
  return p;
}

SweepResult run_sweep(const PreparedExperiment& p, OptimizerKind optimizer, BoundPolicy policy,
                      const std::vector<double>& budgets, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  CostBudgetSpec<double> spec = p.problem.spec;
  if (policy != spec.bound_policy) {
    // A policy sweep overrides the configured default and any per-feature overrides.
    spec.bound_policy = policy;
    spec.feature_policy.clear();
  }
  OptimizerConfig oc = p.config.optimizer_config;
  oc.record_iterates = false;

  SweepResult out;
  for (double budget : budgets) {
    spec.budget = budget;
    BudgetRow row;
    row.classifier = to_string(p.classifier);
    row.optimizer = to_string(optimizer);
    row.policy = to_string(policy);
    row.budget = budget;
    if (p.support) row.baseline_gamma = p.support->baseline_gamma();
    for (Index i = 0; i < p.test.rows(); ++i) {
      const int fold = p.split.test_fold[static_cast<size_t>(i)];
      RecommendContext ctx;
      ctx.model = p.model.get();
      ctx.indirect = p.indirect.get();
      ctx.validation_model = p.validation_models[static_cast<size_t>(fold)].get();
      ctx.validation_indirect = p.validation_indirect[static_cast<size_t>(fold)].get();
      ctx.schema = &p.schema;
      ctx.partition = &p.problem.partition;
      ctx.support = p.support.get();
      const std::string& id = p.test_ids[static_cast<size_t>(i)];
      try {
        RecommendationReport r = recommend(ctx, p.test.row(i).transpose(), spec, optimizer, oc, id);
        ++row.instances;
        row.mean_probability += r.probability_after;
        row.mean_probability_before += r.probability_before;
        row.mean_model_probability += r.model_probability_after;
        row.mean_cost += r.cost_spent;
        if (r.support) {
          row.mean_epsilon += r.support->epsilon;
          row.mean_gamma += static_cast<double>(r.support->gamma);
        }
        out.reports.push_back(std::move(r));
      } catch (const OptimizationError& e) {
        ++row.failures;
        out.failures.push_back({id, budget, e.what()});
      }
    }
    if (row.instances > 0) {
      const auto n = static_cast<double>(row.instances);
      row.mean_probability /= n;
      row.mean_probability_before /= n;
      row.mean_model_probability /= n;
      row.mean_cost /= n;
      row.mean_epsilon /= n;
      row.mean_gamma /= n;
    }
    if (progress) {
      char line[160];
      std::snprintf(line, sizeof line, "%s/%s/%s budget %g: mean p' %.4f (%ld ok, %ld failed)",
                    row.classifier.c_str(), row.optimizer.c_str(), row.policy.c_str(), budget,
                    row.mean_probability, row.instances, row.failures);
      progress(line);
    }
    out.rows.push_back(row);
  }
  out.seconds = elapsed_since(start);
  return out;
}

SweepResult run_pipeline(const ExperimentConfig& config, const Dataset& data,
                         const ProgressFn& progress) {
  const PreparedExperiment p = prepare_experiment(config, data, config.classifier);
  SweepResult r = run_sweep(p, config.optimizer, config.policy, config.budgets, progress);
  r.seconds += p.seconds;
  return r;
}

GridResult run_grid(const ExperimentConfig& config, const Dataset& data,
                    const std::vector<ClassifierKind>& classifiers,
                    const std::vector<OptimizerKind>& optimizers,
                    const std::vector<BoundPolicy>& policies, const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  GridResult out;
  for (ClassifierKind c : classifiers) {
    const PreparedExperiment p = prepare_experiment(config, data, c);
    for (OptimizerKind o : optimizers) {
      for (BoundPolicy b : policies) {
        SweepResult r = run_sweep(p, o, b, config.budgets, progress);
        out.rows.insert(out.rows.end(), r.rows.begin(), r.rows.end());
        std::move(r.reports.begin(), r.reports.end(), std::back_inserter(out.reports));
        out.failures.insert(out.failures.end(), r.failures.begin(), r.failures.end());
      }
    }
  }
  out.seconds = elapsed_since(start);
  return out;
}

std::string budget_rows_csv(const std::vector<BudgetRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "classifier,optimizer,policy,budget,instances,failures,mean_probability,"
         "mean_probability_before,mean_model_probability,mean_cost,mean_epsilon,mean_gamma,"
         "baseline_gamma\n";
  for (const auto& r : rows) {
    out << r.classifier << ',' << r.optimizer << ',' << r.policy << ',' << r.budget << ','
        << r.instances << ',' << r.failures << ',' << r.mean_probability << ','
        << r.mean_probability_before << ',' << r.mean_model_probability << ',' << r.mean_cost
        << ',' << r.mean_epsilon << ',' << r.mean_gamma << ',' << r.baseline_gamma << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const BudgetRow& r) {
  return {{"classifier", r.classifier},
          {"optimizer", r.optimizer},
          {"policy", r.policy},
          {"budget", r.budget},
          {"instances", r.instances},
          {"failures", r.failures},
          {"mean_probability", r.mean_probability},
          {"mean_probability_before", r.mean_probability_before},
          {"mean_model_probability", r.mean_model_probability},
          {"mean_cost", r.mean_cost},
          {"mean_epsilon", r.mean_epsilon},
          {"mean_gamma", r.mean_gamma},
          {"baseline_gamma", r.baseline_gamma}};
}

}  // namespace invclass
