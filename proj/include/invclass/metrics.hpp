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

// Representativeness and support diagnostics for inverse classifications.

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "invclass/core.hpp"
#include "invclass/models.hpp"

namespace invclass {

// ||mean(a) - mean(b)||, rows are observations.
double discrepancy(const MatrixXd& sample_a, const MatrixXd& sample_b);
double discrepancy(const MatrixXd& sample, const VectorXd& population_mean);

struct SupportReport {
  double epsilon = 0.0;  // population variance of f over the k nearest neighbors
  long gamma = 0;        // training rows within `radius`
  int k = 0;
  double radius = 0.0;   // mean over training rows of the distance to their k-th neighbor
  double baseline_gamma = 0.0;  // mean gamma of the training rows themselves
};

// Precomputes the training-set radius and baseline once; queries are
// read-only.
class SupportIndex {
 public:
  SupportIndex(MatrixXd training, const ProbabilityModel& model, int k = 10);

  SupportReport support(const Eigen::Ref<const VectorXd>& x) const;

  // Indices of the k nearest training rows, ties broken by lower index.
  // `exclude` (if >= 0) is skipped.
  std::vector<Index> nearest(const Eigen::Ref<const VectorXd>& x, int k,
                             Index exclude = -1) const;

  double radius() const { return radius_; }
  double baseline_gamma() const { return baseline_gamma_; }
  int k() const { return k_; }
  const VectorXd& probabilities() const { return probabilities_; }

 private:
  MatrixXd training_;
  VectorXd probabilities_;
  int k_;
  double radius_ = 0.0;
  double baseline_gamma_ = 0.0;
};

SupportReport support(const Eigen::Ref<const VectorXd>& x, const MatrixXd& training,
                      const ProbabilityModel& model, int k = 10);

}  // namespace invclass
