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

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "invclass/core.hpp"

namespace invclass {

using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename Scalar>
Scalar sigmoid(Scalar s) {
  if (s >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-s));
  const Scalar e = std::exp(s);
  return e / (Scalar(1) + e);
}

// exp(-||a - b||^2 / (2 sigma^2))
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar gaussian_kernel(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedB>& b,
                                          typename DerivedA::Scalar sigma) {
  using Scalar = typename DerivedA::Scalar;
  if (!(sigma > Scalar(0))) throw ArgumentError("gaussian_kernel: sigma must be > 0");
  if (a.size() != b.size()) throw ArgumentError("gaussian_kernel: dimension mismatch");
  return std::exp(-(a - b).squaredNorm() / (Scalar(2) * sigma * sigma));
}

// A trained classifier exposing P(y = +1 | x) and its gradient in x.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;

  virtual std::string kind() const = 0;
  virtual Index dimension() const = 0;
  virtual double probability(const Eigen::Ref<const VectorXd>& x) const = 0;
  virtual VectorXd gradient(const Eigen::Ref<const VectorXd>& x) const = 0;
  virtual std::unique_ptr<ProbabilityModel> clone() const = 0;
};

double predict_prob(const ProbabilityModel& model, const Eigen::Ref<const VectorXd>& x);
VectorXd grad_prob(const ProbabilityModel& model, const Eigen::Ref<const VectorXd>& x);

// ---------------------------------------------------------------------------
// Logistic regression

class LogisticModel final : public ProbabilityModel {
 public:
  LogisticModel() = default;
  LogisticModel(VectorXd weights, double intercept);

  std::string kind() const override { return "logistic"; }
  Index dimension() const override { return weights_.size(); }
  double probability(const Eigen::Ref<const VectorXd>& x) const override;
  VectorXd gradient(const Eigen::Ref<const VectorXd>& x) const override;
  std::unique_ptr<ProbabilityModel> clone() const override {
    return std::make_unique<LogisticModel>(*this);
  }

  bool trained() const { return trained_; }
  const VectorXd& weights() const { return weights_; }
  double intercept() const { return intercept_; }

 private:
  void require_trained() const;

  VectorXd weights_;
  double intercept_ = 0.0;
  bool trained_ = false;
};

struct LogisticConfig {
  double ridge = 1e-4;  // L2 penalty on the weights, not the intercept
  double gradient_tolerance = 1e-6;
  int max_iterations = 500;
};

struct LogisticFit {
  LogisticModel model;
  double loss = 0.0;  // penalized negative log-likelihood
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Labels are +1/-1. Damped Newton on the penalized negative log-likelihood.
LogisticFit fit_logistic(const MatrixXd& X, const VectorXd& y,
                         const LogisticConfig& config = {});
LogisticModel train_logistic(const MatrixXd& X, const VectorXd& y,
                             const LogisticConfig& config = {});

// Penalized negative log-likelihood and its gradient (weights then intercept).
double logistic_loss(const MatrixXd& X, const VectorXd& y, const VectorXd& weights,
                     double intercept, double ridge, VectorXd* gradient = nullptr);

// ---------------------------------------------------------------------------
// Gaussian-kernel SVM with Platt calibration

struct PlattParams {
  double slope = 0.0;      // A
  double intercept = 0.0;  // B'
  // P(y = +1 | s) = 1 / (1 + exp(A s + B'))
  double operator()(double score) const { return sigmoid(-(slope * score + intercept)); }
};

PlattParams platt_fit(const VectorXd& scores, const VectorXd& labels);

class SvmModel final : public ProbabilityModel {
 public:
  SvmModel() = default;
  SvmModel(MatrixXd support_vectors, VectorXd dual_coefs, double sigma,
           double box, double offset, PlattParams platt);

  std::string kind() const override { return "svm"; }
  Index dimension() const override { return support_vectors_.cols(); }
  double probability(const Eigen::Ref<const VectorXd>& x) const override;
  VectorXd gradient(const Eigen::Ref<const VectorXd>& x) const override;
  std::unique_ptr<ProbabilityModel> clone() const override {
    return std::make_unique<SvmModel>(*this);
  }

  // s(x) = sum_i alpha_i y_i k(x_i, x) + b
  double score(const Eigen::Ref<const VectorXd>& x) const;
  VectorXd score_gradient(const Eigen::Ref<const VectorXd>& x) const;

  bool trained() const { return trained_; }
  const MatrixXd& support_vectors() const { return support_vectors_; }
  const VectorXd& dual_coefs() const { return dual_coefs_; }
  double sigma() const { return sigma_; }
  double box() const { return box_; }
  double offset() const { return offset_; }
  const PlattParams& platt() const { return platt_; }
  void set_platt(PlattParams platt) { platt_ = platt; }

 private:
  void require_trained() const;

  MatrixXd support_vectors_;  // one row per support vector
  VectorXd dual_coefs_;       // alpha_i * y_i
  double sigma_ = 1.0;
  double box_ = 1.0;
  double offset_ = 0.0;
  PlattParams platt_;
  bool trained_ = false;
};

struct SvmConfig {
  double box = 1.0;  // C
  double sigma = 1.0;
  double tolerance = 1e-3;  // maximal KKT violation at convergence
  long max_iterations = 100000;
};

struct SvmFit {
  SvmModel model;       // Platt parameters left at identity-free defaults
  VectorXd alpha;       // one multiplier per training row
  double dual_objective = 0.0;
  double max_violation = 0.0;
  long iterations = 0;
};

// Thrown when SMO hits the iteration cap; carries the last iterate.
class SvmTrainingError : public TrainingError {
 public:
  SvmTrainingError(const std::string& what, SvmFit best)
      : TrainingError(what), best_(std::move(best)) {}
  const SvmFit& best() const { return best_; }

 private:
  SvmFit best_;
};

// Sequential minimal optimization over the kernel dual with maximal-violating
// pair selection. Does not calibrate.
SvmFit fit_svm_dual(const MatrixXd& X, const VectorXd& y, const SvmConfig& config);

// Dual objective sum(alpha) - 1/2 alpha' Q alpha.
double svm_dual_objective(const MatrixXd& X, const VectorXd& y,
                          const VectorXd& alpha, double sigma);

// Fits the dual on all rows and Platt parameters on `calibration_folds`-fold
// cross-validated scores.
SvmModel train_svm(const MatrixXd& X, const VectorXd& y, double box, double sigma,
                   int calibration_folds = 3, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Hyperparameter selection

struct ModelGrid {
  std::vector<double> ridge{1e-4};
  std::vector<double> box{0.1, 1.0, 10.0};
  std::vector<double> sigma{0.5, 1.0, 2.0, 4.0, 8.0};
  int folds = 5;
};

enum class ClassifierKind { kLogistic, kSvm };
std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& name);

// Picks hyperparameters by k-fold cross validation (log-loss for logistic,
// accuracy for SVM), then refits on all rows.
std::unique_ptr<ProbabilityModel> train_classifier(ClassifierKind kind,
                                                   const MatrixXd& X,
                                                   const VectorXd& y,
                                                   const ModelGrid& grid,
                                                   std::uint64_t seed);

// Deterministic shuffled k-fold assignment: fold id per row.
std::vector<int> kfold_assignment(Index n, int folds, std::uint64_t seed);

}  // namespace invclass
