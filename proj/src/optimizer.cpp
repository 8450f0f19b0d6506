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

#include "invclass/optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace invclass {

ReducedProblem::ReducedProblem(const ProbabilityModel& model, const IndirectModel* indirect,
                               VectorXd instance, FeaturePartition partition)
    : model_(&model),
      indirect_(indirect),
      instance_(std::move(instance)),
      partition_(std::move(partition)) {
  partition_.validate(instance_.size());
  if (model.dimension() != instance_.size()) {
    throw ArgumentError("build_objective: model and instance widths differ");
  }
  if (indirect_ != nullptr && !partition_.indirect.empty()) {
    if (indirect_->direct_dim() != direct_dim() ||
        indirect_->output_dim() != static_cast<Index>(partition_.indirect.size()) ||
        indirect_->unchangeable_dim() != static_cast<Index>(partition_.unchangeable.size())) {
      throw ArgumentError("build_objective: indirect model does not match the partition");
    }
  }
  unchangeable_ = gather(instance_, partition_.unchangeable);
}

void ReducedProblem::check(const VectorXd& z) const {
  if (z.size() != direct_dim()) throw ArgumentError("objective: z must have |D| entries");
}

VectorXd ReducedProblem::instance_at(const VectorXd& z) const {
  check(z);
  VectorXd x = instance_;
  const VectorXd direct = gather(instance_, partition_.direct) + z;
  scatter(x, partition_.direct, direct);
  if (indirect_ != nullptr && !partition_.indirect.empty()) {
    scatter(x, partition_.indirect, indirect_->estimate(direct, unchangeable_).value);
  }
  return x;
}

double ReducedProblem::value(const VectorXd& z) const {
  return model_->probability(instance_at(z));
}

VectorXd ReducedProblem::gradient(const VectorXd& z) const {
  const VectorXd x = instance_at(z);
  const VectorXd full = model_->gradient(x);
  VectorXd g = gather(full, partition_.direct);
  if (indirect_ != nullptr && !partition_.indirect.empty()) {
    const VectorXd direct = gather(x, partition_.direct);
    g += indirect_->jacobian(direct, unchangeable_).transpose() *
         gather(full, partition_.indirect);
  }
  return g;
}

Objective ReducedProblem::objective() const {
  return {[self = *this](const VectorXd& z) { return self.value(z); },
          [self = *this](const VectorXd& z) { return self.gradient(z); }};
}

ReducedProblem build_objective(const ProbabilityModel& model, const IndirectModel* indirect,
                               const VectorXd& instance, const FeaturePartition& partition) {
  return ReducedProblem(model, indirect, instance, partition);
}

void OptimizerConfig::validate() const {
  if (max_iterations < 1) throw ArgumentError("optimizer: max_iterations must be >= 1");
  if (!(tolerance > 0)) throw ArgumentError("optimizer: tolerance must be > 0");
  if (step_rule == StepRule::kFixed && !(fixed_step > 0)) {
    throw ArgumentError("optimizer: fixed step must be > 0");
  }
  if (!(initial_step > 0)) throw ArgumentError("optimizer: initial step must be > 0");
  if (!(shrink > 0 && shrink < 1)) throw ArgumentError("optimizer: shrink must be in (0,1)");
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::kTolerance: return "tolerance";
    case Termination::kMaxIterations: return "max_iter";
    case Termination::kZeroStep: return "zero_step";
    case Termination::kNoImprovement: return "no_improvement";
  }
  return "unknown";
}

double stationarity_residual(const Objective& objective, const FeasibleSetSpec<double>& spec,
                             const VectorXd& z, double eta) {
  const VectorXd moved = z - eta * objective.gradient(z);
  return (z - project(moved, spec)).norm();
}

double estimate_lipschitz(const Objective& objective, const FeasibleSetSpec<double>& spec,
                          int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_feasible = [&] {
    VectorXd w(spec.size());
    for (Index i = 0; i < w.size(); ++i) {
      w[i] = spec.lower[i] + unit(rng) * (spec.upper[i] - spec.lower[i]);
    }
    return project(w, spec);
  };
  double best = 0;
  for (int s = 0; s < samples; ++s) {
    const VectorXd a = random_feasible();
    const VectorXd b = random_feasible();
    const double dist = (a - b).norm();
    if (dist < 1e-12) continue;
    best = std::max(best, (objective.gradient(a) - objective.gradient(b)).norm() / dist);
  }
  return best;
}

namespace {

void require_finite(double value, const VectorXd& last, const OptimizationTrace& trace) {
  if (!std::isfinite(value)) {
    throw OptimizationFailure("objective returned a non-finite value", last, trace);
  }
}

}  // namespace

OptimizationResult pgd(const Objective& objective, const FeasibleSetSpec<double>& spec,
                       const OptimizerConfig& config) {
  config.validate();
  spec.validate();
  const Index d = spec.size();

  OptimizationResult out{VectorXd::Zero(d), {}};
  OptimizationTrace& trace = out.trace;
  VectorXd& z = out.z;

  double g = objective.value(z);
  require_finite(g, z, trace);
  trace.initial_value = g;
  trace.records.push_back({0, z, g, 0.0, 0.0});

  double eta = config.step_rule == StepRule::kFixed ? config.fixed_step : config.initial_step;
  if (config.step_rule == StepRule::kLipschitz) {
    const double lipschitz =
        estimate_lipschitz(objective, spec, config.lipschitz_samples, config.seed);
    eta = lipschitz > 0 ? 1.0 / lipschitz : config.initial_step;
  }

  trace.termination = Termination::kMaxIterations;
  for (int t = 1; t <= config.max_iterations; ++t) {
    const VectorXd grad = objective.gradient(z);
    if (!grad.allFinite()) {
      throw OptimizationFailure("objective gradient is not finite", z, trace);
    }

    VectorXd candidate;
    double candidate_value = 0;
    if (config.step_rule == StepRule::kBacktracking) {
      eta = config.initial_step;
      bool accepted = false;
      while (eta >= 1e-14) {
        candidate = project(VectorXd(z - eta * grad), spec);
        candidate_value = objective.value(candidate);
        if (std::isfinite(candidate_value) &&
            candidate_value <= g + config.sufficient_decrease * grad.dot(candidate - z)) {
          accepted = true;
          break;
        }
        eta *= config.shrink;
      }
      if (!accepted) {
        trace.termination = Termination::kZeroStep;
        trace.iterations = t - 1;
        break;
      }
    } else {
      candidate = project(VectorXd(z - eta * grad), spec);
      candidate_value = objective.value(candidate);
      require_finite(candidate_value, z, trace);
    }

    const double moved = (candidate - z).norm();
    z = std::move(candidate);
    g = candidate_value;
    trace.iterations = t;
    if (config.record_iterates) {
      trace.records.push_back({t, z, g, change_cost(z, spec.cost_up, spec.cost_down), eta});
    }
    if (moved <= config.tolerance) {
      trace.termination = Termination::kTolerance;
      break;
    }
  }
  if (!config.record_iterates && trace.iterations > 0) {
    trace.records.push_back({trace.iterations, z, g,
                             change_cost(z, spec.cost_up, spec.cost_down), eta});
  }
  trace.final_step = eta;
  trace.final_value = g;
  return out;
}

OptimizationResult sensitivity_search(const Objective& objective,
                                      const FeasibleSetSpec<double>& spec) {
  spec.validate();
  const Index d = spec.size();
  OptimizationResult out{VectorXd::Zero(d), {}};
  OptimizationTrace& trace = out.trace;
  VectorXd& z = out.z;

  double g = objective.value(z);
  require_finite(g, z, trace);
  trace.initial_value = g;
  trace.records.push_back({0, z, g, 0.0, 0.0});
  trace.termination = Termination::kNoImprovement;

  std::vector<bool> used(static_cast<size_t>(d), false);
  for (int round = 1; round <= d; ++round) {
    const double remaining =
        std::max(0.0, spec.budget - change_cost(z, spec.cost_up, spec.cost_down));
    Index best_feature = -1;
    double best_move = 0;
    double best_value = g;
    for (Index i = 0; i < d; ++i) {
      if (used[static_cast<size_t>(i)]) continue;
      // Upward first, then downward; strict improvement keeps the earliest.
      for (int direction : {+1, -1}) {
        const double bound = direction > 0 ? spec.upper[i] : spec.lower[i];
        const double cost = direction > 0 ? spec.cost_up[i] : spec.cost_down[i];
        double magnitude = std::abs(bound);
        if (cost > 0) magnitude = std::min(magnitude, remaining / cost);
        if (!(magnitude > 0)) continue;
        VectorXd candidate = z;
        candidate[i] = direction * magnitude;
        const double value = objective.value(candidate);
        require_finite(value, z, trace);
        if (value < best_value) {
          best_value = value;
          best_feature = i;
          best_move = candidate[i];
        }
      }
    }
    if (best_feature < 0) break;
    z[best_feature] = best_move;
    used[static_cast<size_t>(best_feature)] = true;
    g = best_value;
    trace.iterations = round;
    trace.records.push_back({round, z, g, change_cost(z, spec.cost_up, spec.cost_down), 0.0});
  }
  trace.final_value = g;
  return out;
}

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kPgd ? "pgd" : "sensitivity";
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "pgd") return OptimizerKind::kPgd;
  if (name == "sensitivity" || name == "sens") return OptimizerKind::kSensitivity;
  throw ArgumentError("unknown optimizer '" + name + "'");
}

OptimizationResult optimize(OptimizerKind kind, const Objective& objective,
                            const FeasibleSetSpec<double>& spec, const OptimizerConfig& config) {
  return kind == OptimizerKind::kPgd ? pgd(objective, spec, config)
                                     : sensitivity_search(objective, spec);
}

}  // namespace invclass
