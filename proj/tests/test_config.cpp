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

#include "invclass/config.hpp"

namespace invclass {
namespace {

using nlohmann::json;

json sample() {
  return json::parse(R"({
    "dataset": {"path": "data.csv", "label": "y", "id": "id"},
    "partition": {"direct": ["a", "b"], "indirect": ["c"]},
    "costs": {"a": {"up": 2, "down": 0}, "b": {"down": 1.5}},
    "bounds": {"a": {"lower": 0.1, "upper": 0.9}},
    "policy": {"default": "elastic", "overrides": {"b": "hardline"}},
    "model": {"type": "logistic", "ridge": [0.001, 0.01], "folds": 4},
    "optimizer": {"method": "sensitivity", "max_iter": 50, "tol": 1e-5, "step": 0.5},
    "budgets": {"start": 0, "stop": 2, "step": 0.5},
    "seed": 9
  })");
}

const std::vector<std::string> kNames{"a", "b", "c", "d"};

TEST(Config, ParsesEverySection) {
  const auto c = parse_config(sample(), "/base");
  EXPECT_EQ(c.dataset_path, "/base/data.csv");
  EXPECT_EQ(c.id_column, "id");
  EXPECT_EQ(c.policy, BoundPolicy::kElastic);
  EXPECT_EQ(c.policy_overrides.at("b"), BoundPolicy::kHardline);
  EXPECT_EQ(c.classifier, ClassifierKind::kLogistic);
  EXPECT_EQ(c.grid.ridge.size(), 2u);
  EXPECT_EQ(c.grid.folds, 4);
  EXPECT_EQ(c.optimizer, OptimizerKind::kSensitivity);
  EXPECT_EQ(c.optimizer_config.step_rule, StepRule::kFixed);
  EXPECT_EQ(c.budgets, (std::vector<double>{0, 0.5, 1, 1.5, 2}));
  EXPECT_EQ(c.seed, 9u);
}

TEST(Config, ResolveFillsUnchangeableAndCosts) {
  const auto r = resolve(parse_config(sample()), kNames);
  EXPECT_EQ(r.partition.direct, (IndexList{0, 1}));
  EXPECT_EQ(r.partition.indirect, (IndexList{2}));
  EXPECT_EQ(r.partition.unchangeable, (IndexList{3}));
  EXPECT_EQ(r.spec.cost_up[0], 2.0);
  EXPECT_EQ(r.spec.cost_down[1], 1.5);
  EXPECT_EQ(r.spec.raw_lower[0], 0.1);
  EXPECT_EQ(r.spec.raw_upper[1], 1.0);
  EXPECT_EQ(r.spec.policy_for(0), BoundPolicy::kElastic);
  EXPECT_EQ(r.spec.policy_for(1), BoundPolicy::kHardline);
}

TEST(Config, RoundTripsThroughJson) {
  const auto c = parse_config(sample());
  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(c), to_json(again));
}

TEST(Config, Errors) {
  auto doc = sample();
  doc["partition"]["direct"] = json::array({"a", "zzz"});
  EXPECT_THROW(resolve(parse_config(doc), kNames), ConfigError);

  doc = sample();
  doc["costs"]["c"] = {{"up", 1}};
  EXPECT_THROW(resolve(parse_config(doc), kNames), ConfigError);

  doc = sample();
  doc["policy"]["overrides"] = {{"d", "elastic"}};
  EXPECT_THROW(resolve(parse_config(doc), kNames), ConfigError);

  doc = sample();
  doc["budgets"] = json::array({0, 2, 1});
  EXPECT_THROW(parse_config(doc).validate(), ConfigError);

  doc = sample();
  doc["budgets"] = json::array({-1, 0});
  EXPECT_THROW(parse_config(doc).validate(), ConfigError);

  doc = sample();
  doc["costs"]["a"]["up"] = -1;
  EXPECT_THROW(parse_config(doc).validate(), ConfigError);

  doc = sample();
  doc["policy"] = "wobbly";
  EXPECT_THROW(parse_config(doc), ConfigError);

  EXPECT_THROW(parse_config(json::array()), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, BudgetLists) {
  EXPECT_EQ(parse_budget_list("0:20:1").size(), 21u);
  EXPECT_EQ(parse_budget_list("0,1,2.5"), (std::vector<double>{0, 1, 2.5}));
  EXPECT_THROW(parse_budget_list("0:x"), ConfigError);
  EXPECT_THROW(parse_budget_list(""), ConfigError);
}

}  // namespace
}  // namespace invclass
