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

#include "invclass/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

namespace invclass {

double discrepancy(const MatrixXd& sample_a, const MatrixXd& sample_b) {
  if (sample_a.rows() == 0 || sample_b.rows() == 0) {
    throw ArgumentError("discrepancy: empty sample");
  }
  if (sample_a.cols() != sample_b.cols()) {
    throw ArgumentError("discrepancy: feature dimensions differ");
  }
  return (sample_a.colwise().mean() - sample_b.colwise().mean()).norm();
}

double discrepancy(const MatrixXd& sample, const VectorXd& population_mean) {
  if (sample.rows() == 0) throw ArgumentError("discrepancy: empty sample");
  if (sample.cols() != population_mean.size()) {
    throw ArgumentError("discrepancy: feature dimensions differ");
  }
  return (sample.colwise().mean().transpose() - population_mean).norm();
}

SupportIndex::SupportIndex(MatrixXd training, const ProbabilityModel& model, int k)
    : training_(std::move(training)), k_(k) {
  const Index n = training_.rows();
  if (k_ < 1) throw ArgumentError("support: k must be >= 1");
  if (k_ > n) throw ArgumentError("support: k exceeds the number of training rows");
  probabilities_.resize(n);
  for (Index i = 0; i < n; ++i) probabilities_[i] = model.probability(training_.row(i).transpose());

  // Each row's k nearest other rows; with a single row there are none.
  const int k_self = static_cast<int>(std::min<Index>(k_, n - 1));
  double total = 0;
  for (Index i = 0; i < n && k_self > 0; ++i) {
    const auto nn = nearest(training_.row(i).transpose(), k_self, i);
    total += (training_.row(nn.back()) - training_.row(i)).norm();
  }
  radius_ = n > 0 ? total / static_cast<double>(n) : 0.0;

  long count = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j != i && (training_.row(j) - training_.row(i)).norm() <= radius_) ++count;
    }
  }
  baseline_gamma_ = n > 0 ? static_cast<double>(count) / static_cast<double>(n) : 0.0;
}

std::vector<Index> SupportIndex::nearest(const Eigen::Ref<const VectorXd>& x, int k,
                                         Index exclude) const {
  if (x.size() != training_.cols()) throw ArgumentError("support: dimension mismatch");
  std::vector<std::pair<double, Index>> order;
  order.reserve(static_cast<size_t>(training_.rows()));
  for (Index j = 0; j < training_.rows(); ++j) {
    if (j == exclude) continue;
    order.emplace_back((training_.row(j).transpose() - x).squaredNorm(), j);
  }
  const auto take = std::min<size_t>(static_cast<size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                    order.end());
  std::vector<Index> out(take);
  for (size_t m = 0; m < take; ++m) out[m] = order[m].second;
  return out;
}

SupportReport SupportIndex::support(const Eigen::Ref<const VectorXd>& x) const {
  SupportReport report;
  report.k = k_;
  report.radius = radius_;
  report.baseline_gamma = baseline_gamma_;

  const auto nn = nearest(x, k_);
  double mean = 0;
  for (Index j : nn) mean += probabilities_[j];
  mean /= static_cast<double>(nn.size());
  double var = 0;
  for (Index j : nn) var += (probabilities_[j] - mean) * (probabilities_[j] - mean);
  report.epsilon = var / static_cast<double>(nn.size());

  for (Index j = 0; j < training_.rows(); ++j) {
    if ((training_.row(j).transpose() - x).norm() <= radius_) ++report.gamma;
  }
  return report;
}

SupportReport support(const Eigen::Ref<const VectorXd>& x, const MatrixXd& training,
                      const ProbabilityModel& model, int k) {
  return SupportIndex(training, model, k).support(x);
}

}  // namespace invclass
