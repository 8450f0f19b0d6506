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

// Nadaraya-Watson estimate of the indirectly changeable features from the
// direct and unchangeable ones, with an analytic Jacobian in x_D.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "invclass/core.hpp"

namespace invclass {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class IndirectModel {
 public:
  IndirectModel() = default;

  // `inputs` rows are [x_D, x_U] of the stored training instances, `targets`
  // rows the matching x_I. The first `direct_dim` input columns are x_D.
  IndirectModel(MatrixXd inputs, MatrixXd targets, Index direct_dim, double bandwidth);

  Index rows() const { return inputs_.rows(); }
  Index direct_dim() const { return direct_dim_; }
  Index unchangeable_dim() const { return inputs_.cols() - direct_dim_; }
  Index output_dim() const { return targets_.cols(); }
  double bandwidth() const { return bandwidth_; }
  const MatrixXd& inputs() const { return inputs_; }
  const MatrixXd& targets() const { return targets_; }

  struct Estimate {
    VectorXd value;
    // Set when every kernel weight was unusable and the plain mean was used.
    bool fallback = false;
  };

  Estimate estimate(const Eigen::Ref<const VectorXd>& x_direct,
                    const Eigen::Ref<const VectorXd>& x_unchangeable) const;

  // |I| x |D| derivative of the estimate with respect to x_D.
  MatrixXd jacobian(const Eigen::Ref<const VectorXd>& x_direct,
                    const Eigen::Ref<const VectorXd>& x_unchangeable) const;

 private:
  // Normalized weights (sum to one); returns false on fallback.
  bool weights(const Eigen::Ref<const VectorXd>& x_direct,
               const Eigen::Ref<const VectorXd>& x_unchangeable, VectorXd& out) const;

  MatrixXd inputs_;
  MatrixXd targets_;
  Index direct_dim_ = 0;
  double bandwidth_ = 1.0;
};

VectorXd estimate_indirect(const IndirectModel& model,
                           const Eigen::Ref<const VectorXd>& x_direct,
                           const Eigen::Ref<const VectorXd>& x_unchangeable);

MatrixXd jacobian_indirect(const IndirectModel& model,
                           const Eigen::Ref<const VectorXd>& x_direct,
                           const Eigen::Ref<const VectorXd>& x_unchangeable);

// Builds the stored rows from normalized instances (one per row of X).
IndirectModel make_indirect_model(const MatrixXd& X, const FeaturePartition& partition,
                                  double bandwidth);

// Chooses the bandwidth by k-fold cross-validated mean squared error.
IndirectModel fit_indirect(const MatrixXd& X, const FeaturePartition& partition,
                           const std::vector<double>& bandwidth_grid, int folds,
                           std::uint64_t seed);

std::vector<double> default_bandwidth_grid();

struct ProbeRow {
  Index indirect_size = 0;
  double seconds = 0.0;  // total wall time over all repetitions
  double checksum = 0.0;
};

// Times estimate_indirect on synthetic fixtures of increasing |I| with the
// number of stored rows and input width held fixed.
std::vector<ProbeRow> complexity_probe(const std::vector<Index>& indirect_sizes,
                                       Index rows = 2000, Index input_dim = 20,
                                       int repetitions = 10, int queries = 50,
                                       std::uint64_t seed = 7);

}  // namespace invclass
