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

// Exact Euclidean projection onto the budgeted box
//
//   Delta = { z : sum_i c+_i (z_i)_+ + c-_i (z_i)_- <= B,  l'_i <= z_i <= u'_i }
//
// Coordinates whose box lies entirely on one side of w are pinned to the
// nearer bound; the rest follow the soft-threshold map h(w, lambda) clipped to
// the box, with lambda found by bisection so the remaining budget is spent.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "invclass/core.hpp"

namespace invclass {

template <typename Scalar>
struct FeasibleSetSpec {
  Vector<Scalar> cost_up;
  Vector<Scalar> cost_down;
  Scalar budget{0};
  Vector<Scalar> lower;  // l', delta units, <= 0
  Vector<Scalar> upper;  // u', delta units, >= 0

  Index size() const { return cost_up.size(); }

  static FeasibleSetSpec from(const CostBudgetSpec<Scalar>& spec,
                              const EffectiveBounds<Scalar>& bounds) {
    return {spec.cost_up, spec.cost_down, spec.budget, bounds.lower,
            bounds.upper};
  }

  void validate() const {
    const Index d = size();
    if (cost_down.size() != d || lower.size() != d || upper.size() != d) {
      throw ArgumentError("FeasibleSetSpec: vectors must have equal length");
    }
    if (!(budget >= Scalar(0))) throw ArgumentError("FeasibleSetSpec: budget < 0");
    for (Index i = 0; i < d; ++i) {
      if (!(cost_up[i] >= Scalar(0) && cost_down[i] >= Scalar(0))) {
        throw ArgumentError("FeasibleSetSpec: negative cost");
      }
      if (!(lower[i] <= Scalar(0) && Scalar(0) <= upper[i])) {
        throw ArgumentError("FeasibleSetSpec: bounds must bracket zero");
      }
    }
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& z,
                Scalar budget_tol = Scalar(kBudgetTolerance)) const {
    for (Index i = 0; i < size(); ++i) {
      if (z[i] < lower[i] || z[i] > upper[i]) return false;
    }
    return change_cost(z, cost_up, cost_down) <= budget + budget_tol;
  }
};

// Soft-threshold step for one coordinate. A zero cost on the active side
// means an infinite threshold: the coordinate never shrinks.
template <typename Scalar>
Scalar h_shrink(Scalar w, Scalar lambda, Scalar cost_up, Scalar cost_down) {
  if (lambda < Scalar(0)) throw ArgumentError("h_shrink: lambda must be >= 0");
  if (w > Scalar(0)) {
    if (cost_up == Scalar(0)) return w;
    return lambda * cost_up <= w ? w - lambda * cost_up : Scalar(0);
  }
  if (w < Scalar(0)) {
    if (cost_down == Scalar(0)) return w;
    return lambda * cost_down <= -w ? w + lambda * cost_down : Scalar(0);
  }
  return Scalar(0);
}

template <typename Scalar>
struct Projection {
  Vector<Scalar> z;
  Scalar multiplier{0};  // lambda of the budget constraint
  int bisection_steps = 0;
};

template <typename Derived, typename Scalar>
Projection<Scalar> project_with_multiplier(const Eigen::MatrixBase<Derived>& w,
                                           const FeasibleSetSpec<Scalar>& spec) {
  const Index d = spec.size();
  if (w.size() != d) throw ArgumentError("project: w must have |D| entries");

  Projection<Scalar> out{Vector<Scalar>::Zero(d), Scalar(0), 0};
  std::vector<Index> free;
  free.reserve(static_cast<size_t>(d));
  Scalar pinned_cost(0);
  for (Index i = 0; i < d; ++i) {
    const Scalar wi = w[i];
    if (spec.upper[i] <= std::min(Scalar(0), wi)) {
      out.z[i] = spec.upper[i];
    } else if (std::max(Scalar(0), wi) <= spec.lower[i]) {
      out.z[i] = spec.lower[i];
    } else {
      free.push_back(i);
      continue;
    }
    pinned_cost += out.z[i] > Scalar(0) ? spec.cost_up[i] * out.z[i]
                                        : -spec.cost_down[i] * out.z[i];
  }
  const Scalar remaining = std::max(Scalar(0), spec.budget - pinned_cost);

  auto fill = [&](Scalar lambda) {
    Scalar cost(0);
    for (Index i : free) {
      const Scalar zi = std::clamp(
          h_shrink(Scalar(w[i]), lambda, spec.cost_up[i], spec.cost_down[i]),
          spec.lower[i], spec.upper[i]);
      out.z[i] = zi;
      cost += zi > Scalar(0) ? spec.cost_up[i] * zi : -spec.cost_down[i] * zi;
    }
    return cost;
  };

  if (fill(Scalar(0)) <= remaining) return out;

  // At lambda_hi every costed coordinate has shrunk to zero, so the cost is 0.
  Scalar hi(1);
  for (Index i : free) {
    const Scalar c = w[i] > Scalar(0) ? spec.cost_up[i] : spec.cost_down[i];
    if (c > Scalar(0)) hi = std::max(hi, Scalar(std::abs(w[i])) / c + Scalar(1));
  }
  int doublings = 0;
  while (fill(hi) > remaining) {
    if (++doublings > 200) {
      throw OptimizationError("project: failed to bracket the budget multiplier");
    }
    hi *= Scalar(2);
  }
  Scalar lo(0);
  Scalar hi_cost = fill(hi);
  while (hi - lo > Scalar(1e-12) && remaining - hi_cost > Scalar(1e-10) &&
         out.bisection_steps < 200) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    const Scalar cost = fill(mid);
    if (cost > remaining) {
      lo = mid;
    } else {
      hi = mid;
      hi_cost = cost;
    }
    ++out.bisection_steps;
  }
  // The upper end of the bracket is always budget-feasible.
  fill(hi);
  out.multiplier = hi;
  return out;
}

template <typename Derived, typename Scalar>
Vector<Scalar> project(const Eigen::MatrixBase<Derived>& w,
                       const FeasibleSetSpec<Scalar>& spec) {
  return project_with_multiplier(w, spec).z;
}

}  // namespace invclass
