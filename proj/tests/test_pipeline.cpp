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

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "fixtures.hpp"
#include "invclass/pipeline.hpp"

namespace invclass {
namespace {

TEST(Split, SwapRolesExchangesHalves) {
  const auto plan = make_split(101, 3);
  const auto swapped = swap_roles(plan, 4);
  EXPECT_EQ(swapped.train, plan.test);
  EXPECT_EQ(swapped.test, plan.train);
  ASSERT_EQ(swapped.test_fold.size(), swapped.test.size());
  std::map<int, int> sizes;
  for (int f : swapped.test_fold) ++sizes[f];
  EXPECT_EQ(sizes.size(), 10u);
  for (const auto& [fold, size] : sizes) EXPECT_TRUE(size == 5 || size == 6) << fold;
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new Dataset(testing::two_gaussians(240, 11));
    prepared_ = new PreparedExperiment(
        prepare_experiment(testing::two_gaussians_config(), *data_, ClassifierKind::kLogistic));
  }
  static void TearDownTestSuite() {
    delete prepared_;
    delete data_;
  }
  static Dataset* data_;
  static PreparedExperiment* prepared_;
};

Dataset* PipelineTest::data_ = nullptr;
PreparedExperiment* PipelineTest::prepared_ = nullptr;

TEST_F(PipelineTest, ZeroBudgetScoresUnchangedInstanceWithHeldOutModels) {
  const auto& p = *prepared_;
  const auto result = run_sweep(p, OptimizerKind::kPgd, BoundPolicy::kHardline, {0.0});
  ASSERT_EQ(result.reports.size(), p.test_ids.size());
  EXPECT_TRUE(result.failures.empty());
  std::map<std::string, size_t> row_of;
  for (size_t i = 0; i < p.test_ids.size(); ++i) row_of[p.test_ids[i]] = i;

  const auto& part = p.problem.partition;
  for (const auto& r : result.reports) {
    for (const auto& c : r.changes) EXPECT_EQ(c.delta, 0.0);
    EXPECT_EQ(r.probability_after, r.probability_before);
    const size_t i = row_of.at(r.instance_id);
    const auto fold = static_cast<size_t>(p.split.test_fold[i]);
    VectorXd x = p.test.row(static_cast<Index>(i)).transpose();
    const VectorXd imputed = p.validation_indirect[fold]
                                 ->estimate(gather(x, part.direct), gather(x, part.unchangeable))
                                 .value;
    scatter(x, part.indirect, imputed);
    EXPECT_NEAR(r.probability_before, p.validation_models[fold]->probability(x), 1e-12);
  }
}

TEST_F(PipelineTest, RiskFallsWithBudget) {
  const auto result =
      run_sweep(*prepared_, OptimizerKind::kPgd, BoundPolicy::kHardline, {0.0, 1.0, 3.0});
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_GE(result.rows[0].mean_probability - result.rows[2].mean_probability, 0.2);
  EXPECT_LE(result.rows[1].mean_probability, result.rows[0].mean_probability);
  EXPECT_LE(result.rows[2].mean_probability, result.rows[1].mean_probability);
  for (const auto& row : result.rows) {
    EXPECT_LE(row.mean_cost, row.budget + 1e-9);
    EXPECT_EQ(row.instances, static_cast<long>(prepared_->test_ids.size()));
  }
}

TEST_F(PipelineTest, ValidationModelsNeverSeeTheirFold) {
  const int k = 3;
  Dataset perturbed = *data_;
  for (Index row : prepared_->split.fold_rows(k)) {
    perturbed.X.row(row).setConstant(0.99);
    perturbed.y[row] = -perturbed.y[row];
  }
  const auto again = prepare_experiment(testing::two_gaussians_config(), perturbed,
                                        ClassifierKind::kLogistic);
  const auto& part = prepared_->problem.partition;
  bool other_fold_moved = false;
  for (Index i = 0; i < prepared_->test.rows(); ++i) {
    const VectorXd x = prepared_->test.row(i).transpose();
    const VectorXd xd = gather(x, part.direct);
    const VectorXd xu = gather(x, part.unchangeable);
    EXPECT_EQ(again.validation_models[k]->probability(x),
              prepared_->validation_models[k]->probability(x));
    EXPECT_EQ(again.validation_indirect[k]->estimate(xd, xu).value,
              prepared_->validation_indirect[k]->estimate(xd, xu).value);
    EXPECT_EQ(again.model->probability(x), prepared_->model->probability(x));
    other_fold_moved |= again.validation_models[0]->probability(x) !=
                        prepared_->validation_models[0]->probability(x);
  }
  EXPECT_TRUE(other_fold_moved);
}

TEST_F(PipelineTest, SweepIsDeterministic) {
  const auto a = run_sweep(*prepared_, OptimizerKind::kSensitivity, BoundPolicy::kElastic, {1.0});
  const auto b = run_sweep(*prepared_, OptimizerKind::kSensitivity, BoundPolicy::kElastic, {1.0});
  EXPECT_EQ(budget_rows_csv(a.rows), budget_rows_csv(b.rows));
}

TEST(Pipeline, SwapRolesFlagUsesTheOtherHalf) {
  auto config = testing::two_gaussians_config();
  const auto data = testing::two_gaussians(120, 2);
  const auto base = prepare_experiment(config, data, ClassifierKind::kLogistic);
  config.swap_roles = true;
  const auto swapped = prepare_experiment(config, data, ClassifierKind::kLogistic);
  EXPECT_EQ(swapped.split.train, base.split.test);
  EXPECT_EQ(swapped.split.test, base.split.train);
  const std::set<std::string> ids(swapped.test_ids.begin(), swapped.test_ids.end());
  for (const auto& id : base.test_ids) EXPECT_EQ(ids.count(id), 0u);
}

TEST(Pipeline, GridCoversEveryCombination) {
  auto config = testing::two_gaussians_config();
  config.budgets = {0.0, 1.0};
  const auto grid = run_grid(config, testing::two_gaussians(100, 5), {ClassifierKind::kLogistic},
                             {OptimizerKind::kPgd, OptimizerKind::kSensitivity},
                             {BoundPolicy::kHardline, BoundPolicy::kElastic});
  EXPECT_EQ(grid.rows.size(), 8u);
  EXPECT_EQ(grid.reports.size(), 8u * 50u);
}

}  // namespace
}  // namespace invclass
