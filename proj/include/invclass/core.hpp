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

// Domain types shared by every stage: feature partitions, cost/budget
// specifications, the change-cost functional and the bound-setting policies.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <vector>

#include "invclass/errors.hpp"

namespace invclass {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;
using IndexList = std::vector<Index>;

// Slack allowed on the budget constraint for floating-point round-off.
inline constexpr double kBudgetTolerance = 1e-8;

enum class BoundPolicy { kHardline, kElastic };

std::string to_string(BoundPolicy policy);
BoundPolicy parse_bound_policy(const std::string& name);

struct FeaturePartition {
  IndexList unchangeable;
  IndexList indirect;
  IndexList direct;

  Index width() const {
    return static_cast<Index>(unchangeable.size() + indirect.size() +
                              direct.size());
  }

  // Throws ArgumentError unless U, I, D are disjoint, cover {0..p-1} and D
  // is nonempty.
  void validate(Index p) const;
};

template <typename Scalar>
struct CostBudgetSpec {
  Vector<Scalar> cost_up;
  Vector<Scalar> cost_down;
  Scalar budget{0};
  Vector<Scalar> raw_lower;
  Vector<Scalar> raw_upper;
  BoundPolicy bound_policy = BoundPolicy::kHardline;
  // Optional per-feature override of bound_policy; empty means "use default".
  std::vector<BoundPolicy> feature_policy;

  Index size() const { return cost_up.size(); }

  BoundPolicy policy_for(Index i) const {
    return feature_policy.empty() ? bound_policy
                                  : feature_policy[static_cast<size_t>(i)];
  }

  void validate() const {
    const Index d = size();
    if (cost_down.size() != d || raw_lower.size() != d ||
        raw_upper.size() != d) {
      throw ArgumentError("cost/bound vectors must all have |D| entries");
    }
    if (!feature_policy.empty() &&
        static_cast<Index>(feature_policy.size()) != d) {
      throw ArgumentError("feature_policy must be empty or have |D| entries");
    }
    if (!(budget >= Scalar(0))) throw ArgumentError("budget must be >= 0");
    for (Index i = 0; i < d; ++i) {
      if (!(cost_up[i] >= Scalar(0)) || !(cost_down[i] >= Scalar(0))) {
        throw ArgumentError("costs must be nonnegative");
      }
      if (!(raw_lower[i] <= raw_upper[i])) {
        throw ArgumentError("raw_lower must not exceed raw_upper");
      }
    }
  }
};

template <typename Scalar>
struct EffectiveBounds {
  Vector<Scalar> lower;  // l' = l - x_D
  Vector<Scalar> upper;  // u' = u - x_D
};

template <typename Scalar>
struct ChangePlan {
  Vector<Scalar> delta;
  Vector<Scalar> effective_lower;
  Vector<Scalar> effective_upper;
};

// sum_i c+_i (z_i)_+ + c-_i (z_i)_-
template <typename DerivedZ, typename DerivedUp, typename DerivedDown>
typename DerivedZ::Scalar change_cost(const Eigen::MatrixBase<DerivedZ>& z,
                                      const Eigen::MatrixBase<DerivedUp>& up,
                                      const Eigen::MatrixBase<DerivedDown>& down) {
  using Scalar = typename DerivedZ::Scalar;
  if (z.size() != up.size() || z.size() != down.size()) {
    throw ArgumentError("change_cost: dimension mismatch");
  }
  Scalar total(0);
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i] > Scalar(0)) {
      total += up[i] * z[i];
    } else if (z[i] < Scalar(0)) {
      total -= down[i] * z[i];
    }
  }
  return total;
}

template <typename DerivedZ, typename Scalar>
Scalar change_cost(const Eigen::MatrixBase<DerivedZ>& z,
                   const CostBudgetSpec<Scalar>& spec) {
  return change_cost(z, spec.cost_up, spec.cost_down);
}

// Applies the Hardline/Elastic rule to the zero-cost side of each feature and
// shifts the result into delta units. The returned interval always contains
// zero, so the unmodified instance is feasible even if x_D lies outside the
// raw bounds.
template <typename DerivedX, typename Scalar>
EffectiveBounds<Scalar> effective_bounds(const Eigen::MatrixBase<DerivedX>& x_direct,
                                         const CostBudgetSpec<Scalar>& spec) {
  const Index d = spec.size();
  if (x_direct.size() != d) {
    throw ArgumentError("effective_bounds: x_D must have |D| entries");
  }
  EffectiveBounds<Scalar> out{Vector<Scalar>(d), Vector<Scalar>(d)};
  for (Index i = 0; i < d; ++i) {
    const Scalar x = x_direct[i];
    Scalar lo = spec.raw_lower[i];
    Scalar hi = spec.raw_upper[i];
    const bool hard = spec.policy_for(i) == BoundPolicy::kHardline;
    if (spec.cost_up[i] == Scalar(0)) hi = hard ? x : std::max(Scalar(1), x);
    if (spec.cost_down[i] == Scalar(0)) lo = hard ? x : std::min(Scalar(0), x);
    out.lower[i] = std::min(lo - x, Scalar(0));
    out.upper[i] = std::max(hi - x, Scalar(0));
  }
  return out;
}

// Gathers x[indices] into a dense vector.
template <typename Derived>
Vector<typename Derived::Scalar> gather(const Eigen::MatrixBase<Derived>& x,
                                        const IndexList& indices) {
  Vector<typename Derived::Scalar> out(static_cast<Index>(indices.size()));
  for (size_t k = 0; k < indices.size(); ++k) out[static_cast<Index>(k)] = x[indices[k]];
  return out;
}

template <typename DerivedOut, typename DerivedIn>
void scatter(Eigen::MatrixBase<DerivedOut>& x, const IndexList& indices,
             const Eigen::MatrixBase<DerivedIn>& values) {
  for (size_t k = 0; k < indices.size(); ++k) x[indices[k]] = values[static_cast<Index>(k)];
}

}  // namespace invclass
