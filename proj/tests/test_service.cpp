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

#include <limits>

#include "fixtures.hpp"
#include "invclass/service.hpp"

namespace invclass {
namespace {

using nlohmann::json;

// Finite probability, broken gradient: the optimizer must give up.
class BrokenGradient final : public ProbabilityModel {
 public:
  explicit BrokenGradient(Index d) : d_(d) {}
  std::string kind() const override { return "broken"; }
  Index dimension() const override { return d_; }
  double probability(const Eigen::Ref<const VectorXd>&) const override { return 0.5; }
  VectorXd gradient(const Eigen::Ref<const VectorXd>&) const override {
    return VectorXd::Constant(d_, std::numeric_limits<double>::quiet_NaN());
  }
  std::unique_ptr<ProbabilityModel> clone() const override {
    return std::make_unique<BrokenGradient>(*this);
  }

 private:
  Index d_;
};

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    service_ = new RecommendationService(
        train_bundle(testing::two_gaussians_config(), testing::two_gaussians(200, 3)));
  }
  static void TearDownTestSuite() { delete service_; }

  static json post(const std::string& path, const json& body, int expected = 200) {
    const auto r = service_->handle("POST", path, body.dump());
    EXPECT_EQ(r.status, expected) << r.body;
    return json::parse(r.body);
  }

  static json instance() {
    return {{"d1", 0.7}, {"d2", 0.65}, {"i1", 0.6}, {"u1", 0.5}, {"u2", 0.4}};
  }

  static RecommendationService* service_;
};

RecommendationService* ServiceTest::service_ = nullptr;

TEST_F(ServiceTest, HealthAndSchema) {
  const auto h = service_->handle("GET", "/health", "");
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(json::parse(h.body)["status"], "ok");
  const auto s = json::parse(service_->handle("GET", "/schema", "").body);
  EXPECT_EQ(s["features"].size(), 5u);
}

TEST_F(ServiceTest, ZeroBudgetChangesNothing) {
  const auto r = post("/recommend", {{"instance", instance()}, {"budget", 0}});
  for (const auto& c : r["changes"]) EXPECT_EQ(c["delta"].get<double>(), 0.0);
  EXPECT_EQ(r["probability_after"], r["probability_before"]);
}

TEST_F(ServiceTest, PositiveBudgetLowersRisk) {
  const auto r = post("/recommend", {{"instance", instance()}, {"budget", 1.0}});
  EXPECT_LT(r["probability_after"].get<double>(), r["probability_before"].get<double>());
  EXPECT_LE(r["cost_spent"].get<double>(), 1.0 + 1e-9);
}

TEST_F(ServiceTest, ArrayAndObjectInstancesAgree) {
  const auto by_name = post("/recommend", {{"instance", instance()}, {"budget", 0.5}});
  const auto by_position =
      post("/recommend", {{"instance", {0.7, 0.65, 0.6, 0.5, 0.4}}, {"budget", 0.5}});
  EXPECT_EQ(by_name.dump(), by_position.dump());
}

TEST_F(ServiceTest, SweepReturnsOneReportPerBudgetInOrder) {
  json budgets = json::array();
  for (int b = 0; b <= 20; ++b) budgets.push_back(0.1 * b);
  const auto r = post("/sweep", {{"instance", instance()}, {"budgets", budgets}});
  ASSERT_EQ(r["reports"].size(), 21u);
  double previous = 2.0;
  for (size_t k = 0; k < 21; ++k) {
    EXPECT_DOUBLE_EQ(r["reports"][k]["budget"].get<double>(), budgets[k].get<double>());
    const double p = r["reports"][k]["model_probability_after"].get<double>();
    EXPECT_LE(p, previous + 1e-9);
    previous = p;
  }
}

TEST_F(ServiceTest, RepeatedRequestsAreByteIdentical) {
  const json body = {{"instance", instance()}, {"budget", 1.3}, {"optimizer", "sensitivity"}};
  const auto a = service_->handle("POST", "/recommend", body.dump());
  const auto b = service_->handle("POST", "/recommend", body.dump());
  EXPECT_EQ(a.body, b.body);
}

TEST_F(ServiceTest, Overrides) {
  // Making d1 free to lower lets the optimizer move it further.
  const json base = {{"instance", instance()}, {"budget", 0.2}};
  json cheap = base;
  cheap["costs"] = {{"d1", {{"down", 0.01}}}};
  const auto a = post("/recommend", base);
  const auto b = post("/recommend", cheap);
  EXPECT_LT(b["probability_after"].get<double>(), a["probability_after"].get<double>());
  json elastic = base;
  elastic["policy"] = "elastic";
  EXPECT_EQ(post("/recommend", elastic)["policy"], "elastic");
}

TEST_F(ServiceTest, MalformedRequestsNameTheField) {
  EXPECT_EQ(post("/recommend", {{"instance", instance()}}, 400)["field"], "budget");
  EXPECT_EQ(post("/recommend", {{"budget", 1}}, 400)["field"], "instance");
  EXPECT_EQ(post("/recommend", {{"instance", instance()}, {"budget", -1}}, 400)["field"],
            "budget");
  EXPECT_EQ(post("/recommend", {{"instance", {1, 2}}, {"budget", 1}}, 400)["field"], "instance");
  EXPECT_EQ(post("/recommend", {{"instance", {{"nope", 1}}}, {"budget", 1}}, 400)["field"],
            "instance.nope");
  EXPECT_EQ(
      post("/recommend", {{"instance", instance()}, {"budget", 1}, {"optimizer", "x"}}, 400)["field"],
      "optimizer");
  EXPECT_EQ(post("/sweep", {{"instance", instance()}, {"budgets", "3"}}, 400)["field"],
            "budgets");
  EXPECT_EQ(service_->handle("POST", "/recommend", "{not json").status, 400);
}

TEST_F(ServiceTest, RoutingErrors) {
  EXPECT_EQ(service_->handle("GET", "/nowhere", "").status, 404);
  EXPECT_EQ(service_->handle("GET", "/recommend", "").status, 405);
  EXPECT_EQ(service_->handle("POST", "/health", "{}").status, 405);
}

TEST(Service, OptimizerFailureIs422WithTrace) {
  auto bundle = train_bundle(testing::two_gaussians_config(), testing::two_gaussians(100, 4));
  bundle.classifier = std::make_shared<BrokenGradient>(5);
  const RecommendationService service(std::move(bundle));
  const json body = {{"instance", {0.5, 0.5, 0.5, 0.5, 0.5}}, {"budget", 1.0}};
  const auto r = service.handle("POST", "/recommend", body.dump());
  EXPECT_EQ(r.status, 422);
  const auto doc = json::parse(r.body);
  EXPECT_TRUE(doc.contains("error"));
  EXPECT_FALSE(doc["trace_tail"].empty());
}

}  // namespace
}  // namespace invclass
