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

#include "invclass/indirect.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "invclass/models.hpp"

namespace invclass {

IndirectModel::IndirectModel(MatrixXd inputs, MatrixXd targets, Index direct_dim,
                             double bandwidth)
    : inputs_(std::move(inputs)),
      targets_(std::move(targets)),
      direct_dim_(direct_dim),
      bandwidth_(bandwidth) {
  if (inputs_.rows() == 0) throw ArgumentError("IndirectModel: no stored rows");
  if (inputs_.rows() != targets_.rows()) {
    throw ArgumentError("IndirectModel: inputs and targets row counts differ");
  }
  if (direct_dim_ < 0 || direct_dim_ > inputs_.cols()) {
    throw ArgumentError("IndirectModel: direct_dim out of range");
  }
  if (!(bandwidth_ > 0)) throw ArgumentError("IndirectModel: bandwidth must be > 0");
}

bool IndirectModel::weights(const Eigen::Ref<const VectorXd>& x_direct,
                            const Eigen::Ref<const VectorXd>& x_unchangeable,
                            VectorXd& out) const {
  if (inputs_.rows() == 0) throw StateError("IndirectModel is empty");
  if (x_direct.size() != direct_dim_ || x_unchangeable.size() != unchangeable_dim()) {
    throw ArgumentError("IndirectModel: query dimension mismatch");
  }
  VectorXd query(inputs_.cols());
  query << x_direct, x_unchangeable;
  const double scale = -1.0 / (2.0 * bandwidth_ * bandwidth_);
  out = (inputs_.rowwise() - query.transpose()).rowwise().squaredNorm() * scale;
  // Shift by the largest exponent so the nearest row always gets weight 1.
  const double top = out.maxCoeff();
  if (std::isfinite(top)) {
    out = (out.array() - top).exp();
    const double total = out.sum();
    if (std::isfinite(total) && total > 0) {
      out /= total;
      return true;
    }
  }
  out = VectorXd::Constant(inputs_.rows(), 1.0 / static_cast<double>(inputs_.rows()));
  return false;
}

IndirectModel::Estimate IndirectModel::estimate(
    const Eigen::Ref<const VectorXd>& x_direct,
    const Eigen::Ref<const VectorXd>& x_unchangeable) const {
  if (output_dim() == 0) return {VectorXd(0), false};
  VectorXd w;
  const bool ok = weights(x_direct, x_unchangeable, w);
  return {targets_.transpose() * w, !ok};
}

MatrixXd IndirectModel::jacobian(const Eigen::Ref<const VectorXd>& x_direct,
                                 const Eigen::Ref<const VectorXd>& x_unchangeable) const {
  if (output_dim() == 0) return MatrixXd(0, x_direct.size());
  VectorXd w;
  if (!weights(x_direct, x_unchangeable, w)) {
    return MatrixXd::Zero(output_dim(), direct_dim_);
  }
  const VectorXd value = targets_.transpose() * w;
  // dH_a/dq_j = sum_i w_i (s_ij - q_j) (t_ia - H_a) / sigma^2, w normalized.
  const MatrixXd centered_targets = targets_.rowwise() - value.transpose();
  const MatrixXd offsets = inputs_.leftCols(direct_dim_).rowwise() - x_direct.transpose();
  return centered_targets.transpose() * w.asDiagonal() * offsets /
         (bandwidth_ * bandwidth_);
}

VectorXd estimate_indirect(const IndirectModel& model,
                           const Eigen::Ref<const VectorXd>& x_direct,
                           const Eigen::Ref<const VectorXd>& x_unchangeable) {
  return model.estimate(x_direct, x_unchangeable).value;
}

MatrixXd jacobian_indirect(const IndirectModel& model,
                           const Eigen::Ref<const VectorXd>& x_direct,
                           const Eigen::Ref<const VectorXd>& x_unchangeable) {
  return model.jacobian(x_direct, x_unchangeable);
}

namespace {

MatrixXd gather_columns(const MatrixXd& X, const IndexList& columns) {
  MatrixXd out(X.rows(), static_cast<Index>(columns.size()));
  for (size_t k = 0; k < columns.size(); ++k) out.col(static_cast<Index>(k)) = X.col(columns[k]);
  return out;
}

}  // namespace

IndirectModel make_indirect_model(const MatrixXd& X, const FeaturePartition& partition,
                                  double bandwidth) {
  partition.validate(X.cols());
  MatrixXd inputs(X.rows(), static_cast<Index>(partition.direct.size() +
                                               partition.unchangeable.size()));
  inputs << gather_columns(X, partition.direct), gather_columns(X, partition.unchangeable);
  return IndirectModel(std::move(inputs), gather_columns(X, partition.indirect),
                       static_cast<Index>(partition.direct.size()), bandwidth);
}

std::vector<double> default_bandwidth_grid() {
  return {0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 2.0};
}

IndirectModel fit_indirect(const MatrixXd& X, const FeaturePartition& partition,
                           const std::vector<double>& bandwidth_grid, int folds,
                           std::uint64_t seed) {
  if (bandwidth_grid.empty()) throw ConfigError("bandwidth grid is empty");
  const IndirectModel all = make_indirect_model(X, partition, bandwidth_grid.front());
  if (all.output_dim() == 0 || bandwidth_grid.size() == 1 || X.rows() < folds) return all;

  const auto fold = kfold_assignment(X.rows(), folds, seed);
  const Index d = all.direct_dim();
  double best = std::numeric_limits<double>::infinity();
  double best_bandwidth = bandwidth_grid.front();
  for (double bandwidth : bandwidth_grid) {
    double sse = 0;
    for (int k = 0; k < folds; ++k) {
      std::vector<Index> train_rows;
      std::vector<Index> test_rows;
      for (Index i = 0; i < X.rows(); ++i) {
        (fold[static_cast<size_t>(i)] == k ? test_rows : train_rows).push_back(i);
      }
      if (train_rows.empty()) continue;
      const IndirectModel part(all.inputs()(train_rows, Eigen::all),
                               all.targets()(train_rows, Eigen::all), d, bandwidth);
      for (Index i : test_rows) {
        const VectorXd q = all.inputs().row(i).transpose();
        const VectorXd est = part.estimate(q.head(d), q.tail(q.size() - d)).value;
        sse += (est - all.targets().row(i).transpose()).squaredNorm();
      }
    }
    if (sse < best) {
      best = sse;
      best_bandwidth = bandwidth;
    }
  }
  return IndirectModel(all.inputs(), all.targets(), d, best_bandwidth);
}

std::vector<ProbeRow> complexity_probe(const std::vector<Index>& indirect_sizes, Index rows,
                                       Index input_dim, int repetitions, int queries,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_matrix = [&](Index r, Index c) {
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < r; ++i) m(i, j) = unit(rng);
    }
    return m;
  };
  const MatrixXd inputs = random_matrix(rows, input_dim);
  const MatrixXd query_set = random_matrix(queries, input_dim);
  const Index direct = input_dim / 2;

  std::vector<ProbeRow> table;
  for (Index size : indirect_sizes) {
    ProbeRow row;
    row.indirect_size = size;
    if (size == 0) {
      table.push_back(row);
      continue;
    }
    const IndirectModel model(inputs, random_matrix(rows, size), direct, 0.5);
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < repetitions; ++r) {
      for (Index q = 0; q < queries; ++q) {
        const VectorXd x = query_set.row(q).transpose();
        row.checksum += estimate_indirect(model, x.head(direct), x.tail(input_dim - direct)).sum();
      }
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    table.push_back(row);
  }
  return table;
}

}  // namespace invclass
