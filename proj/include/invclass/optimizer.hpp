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

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "invclass/core.hpp"
#include "invclass/indirect.hpp"
#include "invclass/models.hpp"
#include "invclass/projection.hpp"

namespace invclass {

using Eigen::VectorXd;

// g(z) and its gradient over the direct-feature change vector z.
struct Objective {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
};

// The reduced problem for one instance: x_D moves by z, x_I follows H and
// x_U stays fixed. Holds references to the models, which must outlive it.
class ReducedProblem {
 public:
  // `indirect` may be null, in which case x_I keeps the instance's values.
  ReducedProblem(const ProbabilityModel& model, const IndirectModel* indirect,
                 VectorXd instance, FeaturePartition partition);

  Index direct_dim() const { return static_cast<Index>(partition_.direct.size()); }
  const VectorXd& instance() const { return instance_; }
  const FeaturePartition& partition() const { return partition_; }
  VectorXd direct_values() const { return gather(instance_, partition_.direct); }

  // Full feature vector after applying z (with x_I re-estimated).
  VectorXd instance_at(const VectorXd& z) const;
  double value(const VectorXd& z) const;
  VectorXd gradient(const VectorXd& z) const;

  Objective objective() const;

 private:
  void check(const VectorXd& z) const;

  const ProbabilityModel* model_;
  const IndirectModel* indirect_;
  VectorXd instance_;
  FeaturePartition partition_;
  VectorXd unchangeable_;
};

ReducedProblem build_objective(const ProbabilityModel& model, const IndirectModel* indirect,
                               const VectorXd& instance, const FeaturePartition& partition);

enum class StepRule {
  kBacktracking,  // Armijo backtracking from initial_step
  kFixed,         // constant fixed_step
  kLipschitz,     // constant 1 / L-hat, L-hat sampled over feasible pairs
};

struct OptimizerConfig {
  StepRule step_rule = StepRule::kBacktracking;
  double initial_step = 1.0;
  double fixed_step = 1.0;
  int max_iterations = 1000;
  double tolerance = 1e-6;  // on ||z(t+1) - z(t)||
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int lipschitz_samples = 100;
  std::uint64_t seed = 0;
  bool record_iterates = true;

  void validate() const;
};

enum class Termination { kTolerance, kMaxIterations, kZeroStep, kNoImprovement };
std::string to_string(Termination reason);

struct IterationRecord {
  int t = 0;
  VectorXd z;
  double value = 0.0;
  double cost = 0.0;
  double step = 0.0;
};

struct OptimizationTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::kTolerance;
  int iterations = 0;
  double final_step = 0.0;
  double initial_value = 0.0;
  double final_value = 0.0;
};

struct OptimizationResult {
  VectorXd z;
  OptimizationTrace trace;
};

// Thrown on non-finite objective values or gradients; carries the last
// finite iterate.
class OptimizationFailure : public OptimizationError {
 public:
  OptimizationFailure(const std::string& what, VectorXd last, OptimizationTrace trace)
      : OptimizationError(what), last_(std::move(last)), trace_(std::move(trace)) {}
  const VectorXd& last_iterate() const { return last_; }
  const OptimizationTrace& trace() const { return trace_; }

 private:
  VectorXd last_;
  OptimizationTrace trace_;
};

// Projected gradient descent from z = 0.
OptimizationResult pgd(const Objective& objective, const FeasibleSetSpec<double>& spec,
                       const OptimizerConfig& config = {});

// ||z - Proj(z - eta grad g(z))||
double stationarity_residual(const Objective& objective, const FeasibleSetSpec<double>& spec,
                             const VectorXd& z, double eta);

// max ||grad(a) - grad(b)|| / ||a - b|| over random feasible pairs.
double estimate_lipschitz(const Objective& objective, const FeasibleSetSpec<double>& spec,
                          int samples, std::uint64_t seed);

// Greedy bound-seeking baseline: each round moves one more feature as far
// toward a bound as the remaining budget allows, keeping the best move.
OptimizationResult sensitivity_search(const Objective& objective,
                                      const FeasibleSetSpec<double>& spec);

enum class OptimizerKind { kPgd, kSensitivity };
std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& name);

OptimizationResult optimize(OptimizerKind kind, const Objective& objective,
                            const FeasibleSetSpec<double>& spec,
                            const OptimizerConfig& config = {});

}  // namespace invclass
