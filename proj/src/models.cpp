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

#include "invclass/models.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace invclass {

double predict_prob(const ProbabilityModel& model, const Eigen::Ref<const VectorXd>& x) {
  return model.probability(x);
}

VectorXd grad_prob(const ProbabilityModel& model, const Eigen::Ref<const VectorXd>& x) {
  return model.gradient(x);
}

// ---------------------------------------------------------------------------
// Logistic

LogisticModel::LogisticModel(VectorXd weights, double intercept)
    : weights_(std::move(weights)), intercept_(intercept), trained_(true) {
  if (!weights_.allFinite() || !std::isfinite(intercept_)) {
    throw ArgumentError("LogisticModel: non-finite coefficients");
  }
}

void LogisticModel::require_trained() const {
  if (!trained_) throw StateError("logistic model is not trained");
}

double LogisticModel::probability(const Eigen::Ref<const VectorXd>& x) const {
  require_trained();
  if (x.size() != weights_.size()) throw ArgumentError("logistic: dimension mismatch");
  return sigmoid(intercept_ + weights_.dot(x));
}

VectorXd LogisticModel::gradient(const Eigen::Ref<const VectorXd>& x) const {
  const double f = probability(x);
  return f * (1.0 - f) * weights_;
}

namespace {

// log(1 + exp(s)) without overflow.
double softplus(double s) {
  return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

void check_labels(const VectorXd& y) {
  bool pos = false;
  bool neg = false;
  for (Index i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      pos = true;
    } else if (y[i] == -1.0) {
      neg = true;
    } else {
      throw ArgumentError("labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw TrainingError("training data must contain both classes");
}

}  // namespace

double logistic_loss(const MatrixXd& X, const VectorXd& y, const VectorXd& weights,
                     double intercept, double ridge, VectorXd* gradient) {
  const VectorXd s = (X * weights).array() + intercept;
  double loss = 0.5 * ridge * weights.squaredNorm();
  VectorXd residual(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    const double t = y[i] > 0 ? 1.0 : 0.0;
    loss += softplus(s[i]) - t * s[i];
    residual[i] = sigmoid(s[i]) - t;
  }
  if (gradient != nullptr) {
    gradient->resize(weights.size() + 1);
    gradient->head(weights.size()) = X.transpose() * residual + ridge * weights;
    (*gradient)[weights.size()] = residual.sum();
  }
  return loss;
}

LogisticFit fit_logistic(const MatrixXd& X, const VectorXd& y,
                         const LogisticConfig& config) {
  if (X.rows() != y.size()) throw ArgumentError("fit_logistic: row count mismatch");
  if (X.rows() < 2) throw TrainingError("fit_logistic: need at least 2 rows");
  if (config.ridge < 0) throw ArgumentError("fit_logistic: ridge must be >= 0");
  check_labels(y);

  const Index p = X.cols();
  const Index n = X.rows();
  MatrixXd design(n, p + 1);
  design.leftCols(p) = X;
  design.col(p).setOnes();

  VectorXd theta = VectorXd::Zero(p + 1);
  VectorXd grad;
  double loss = logistic_loss(X, y, theta.head(p), theta[p], config.ridge, &grad);
  int iter = 0;
  for (; iter < config.max_iterations && grad.norm() > config.gradient_tolerance; ++iter) {
    const VectorXd s = design * theta;
    VectorXd weight(n);
    for (Index i = 0; i < n; ++i) {
      const double f = sigmoid(s[i]);
      weight[i] = std::max(f * (1.0 - f), 1e-12);
    }
    MatrixXd hessian = design.transpose() * weight.asDiagonal() * design;
    hessian.diagonal().head(p).array() += config.ridge;
    // Keeps the system solvable for constant columns with no ridge.
    hessian.diagonal().array() += 1e-12;
    const VectorXd step = hessian.ldlt().solve(-grad);

    double t = 1.0;
    VectorXd next_grad;
    double next_loss = 0;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const VectorXd candidate = theta + t * step;
      next_loss = logistic_loss(X, y, candidate.head(p), candidate[p], config.ridge, &next_grad);
      if (next_loss <= loss + 1e-4 * t * grad.dot(step)) break;
    }
    theta += t * step;
    loss = next_loss;
    grad = next_grad;
    if (!theta.allFinite()) throw TrainingError("fit_logistic: diverged");
  }
  LogisticFit fit;
  fit.model = LogisticModel(theta.head(p), theta[p]);
  fit.loss = loss;
  fit.gradient_norm = grad.norm();
  fit.iterations = iter;
  return fit;
}

LogisticModel train_logistic(const MatrixXd& X, const VectorXd& y,
                             const LogisticConfig& config) {
  return fit_logistic(X, y, config).model;
}

// ---------------------------------------------------------------------------
// Platt

PlattParams platt_fit(const VectorXd& scores, const VectorXd& labels) {
  if (scores.size() != labels.size() || scores.size() == 0) {
    throw ArgumentError("platt_fit: scores and labels must be nonempty and aligned");
  }
  const Index n = scores.size();
  double prior1 = 0;
  double prior0 = 0;
  for (Index i = 0; i < n; ++i) (labels[i] > 0 ? prior1 : prior0) += 1;

  const double hi_target = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo_target = 1.0 / (prior0 + 2.0);
  VectorXd t(n);
  for (Index i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi_target : lo_target;

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double aa, double bb) {
    double f = 0;
    for (Index i = 0; i < n; ++i) {
      const double fapb = scores[i] * aa + bb;
      f += fapb >= 0 ? t[i] * fapb + std::log1p(std::exp(-fapb))
                     : (t[i] - 1) * fapb + std::log1p(std::exp(fapb));
    }
    return f;
  };
  double fval = objective(a, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0, g1 = 0, g2 = 0;
    for (Index i = 0; i < n; ++i) {
      const double fapb = scores[i] * a + b;
      double p, q;
      if (fapb >= 0) {
        p = std::exp(-fapb) / (1.0 + std::exp(-fapb));
        q = 1.0 / (1.0 + std::exp(-fapb));
      } else {
        p = 1.0 / (1.0 + std::exp(fapb));
        q = std::exp(fapb) / (1.0 + std::exp(fapb));
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

// ---------------------------------------------------------------------------
// SVM

SvmModel::SvmModel(MatrixXd support_vectors, VectorXd dual_coefs, double sigma,
                   double box, double offset, PlattParams platt)
    : support_vectors_(std::move(support_vectors)),
      dual_coefs_(std::move(dual_coefs)),
      sigma_(sigma),
      box_(box),
      offset_(offset),
      platt_(platt),
      trained_(true) {
  if (support_vectors_.rows() != dual_coefs_.size()) {
    throw ArgumentError("SvmModel: one dual coefficient per support vector required");
  }
  if (!(sigma_ > 0) || !(box_ > 0)) throw ArgumentError("SvmModel: sigma and C must be > 0");
}

void SvmModel::require_trained() const {
  if (!trained_) throw StateError("svm model is not trained");
}

double SvmModel::score(const Eigen::Ref<const VectorXd>& x) const {
  require_trained();
  if (x.size() != support_vectors_.cols()) throw ArgumentError("svm: dimension mismatch");
  const double scale = -1.0 / (2.0 * sigma_ * sigma_);
  const VectorXd sq = (support_vectors_.rowwise() - x.transpose()).rowwise().squaredNorm();
  return dual_coefs_.dot((sq * scale).array().exp().matrix()) + offset_;
}

VectorXd SvmModel::score_gradient(const Eigen::Ref<const VectorXd>& x) const {
  require_trained();
  if (x.size() != support_vectors_.cols()) throw ArgumentError("svm: dimension mismatch");
  const double inv = 1.0 / (sigma_ * sigma_);
  const MatrixXd diff = support_vectors_.rowwise() - x.transpose();
  const VectorXd k = (diff.rowwise().squaredNorm() * (-0.5 * inv)).array().exp();
  // d/dx k(x_i, x) = k(x_i, x) (x_i - x) / sigma^2
  return diff.transpose() * (dual_coefs_.cwiseProduct(k) * inv);
}

double SvmModel::probability(const Eigen::Ref<const VectorXd>& x) const {
  return platt_(score(x));
}

VectorXd SvmModel::gradient(const Eigen::Ref<const VectorXd>& x) const {
  const double p = probability(x);
  return (-platt_.slope * p * (1.0 - p)) * score_gradient(x);
}

namespace {

MatrixXd gaussian_gram(const MatrixXd& X, double sigma) {
  const Index n = X.rows();
  const VectorXd sq = X.rowwise().squaredNorm();
  MatrixXd K = -2.0 * (X * X.transpose());
  K.colwise() += sq;
  K.rowwise() += sq.transpose();
  const double scale = -1.0 / (2.0 * sigma * sigma);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) K(i, j) = std::exp(std::max(K(i, j), 0.0) * scale);
    K(j, j) = 1.0;
  }
  return K;
}

}  // namespace

double svm_dual_objective(const MatrixXd& X, const VectorXd& y, const VectorXd& alpha,
                          double sigma) {
  const MatrixXd K = gaussian_gram(X, sigma);
  const VectorXd ay = alpha.cwiseProduct(y);
  return alpha.sum() - 0.5 * ay.dot(K * ay);
}

SvmFit fit_svm_dual(const MatrixXd& X, const VectorXd& y, const SvmConfig& config) {
  if (X.rows() != y.size()) throw ArgumentError("fit_svm_dual: row count mismatch");
  if (!(config.box > 0) || !(config.sigma > 0)) {
    throw ArgumentError("fit_svm_dual: C and sigma must be > 0");
  }
  check_labels(y);

  const Index n = X.rows();
  const double C = config.box;
  const MatrixXd K = gaussian_gram(X, config.sigma);
  auto Q = [&](Index i, Index j) { return y[i] * y[j] * K(i, j); };

  VectorXd alpha = VectorXd::Zero(n);
  VectorXd G = VectorXd::Constant(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  constexpr double kTau = 1e-12;

  auto in_up = [&](Index t) { return y[t] > 0 ? alpha[t] < C : alpha[t] > 0; };
  auto in_low = [&](Index t) { return y[t] > 0 ? alpha[t] > 0 : alpha[t] < C; };

  long iter = 0;
  double violation = 0;
  bool converged = false;
  while (true) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    Index i = -1;
    Index j = -1;
    for (Index t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(t) && v > gmax) {
        gmax = v;
        i = t;
      }
      if (in_low(t) && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    violation = (i < 0 || j < 0) ? 0.0 : gmax - gmin;
    if (violation < config.tolerance) {
      converged = true;
      break;
    }
    if (iter >= config.max_iterations) break;
    ++iter;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q(i, i) + Q(j, j) + 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (Index t = 0; t < n; ++t) G[t] += Q(t, i) * di + Q(t, j) * dj;
  }

  // Offset: average over free multipliers, midpoint of the feasible range
  // otherwise.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0;
  int free_count = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / free_count : (ub + lb) / 2.0;

  std::vector<Index> support;
  for (Index t = 0; t < n; ++t) {
    if (alpha[t] > 0) support.push_back(t);
  }
  MatrixXd sv(static_cast<Index>(support.size()), X.cols());
  VectorXd coef(static_cast<Index>(support.size()));
  for (size_t k = 0; k < support.size(); ++k) {
    sv.row(static_cast<Index>(k)) = X.row(support[k]);
    coef[static_cast<Index>(k)] = alpha[support[k]] * y[support[k]];
  }

  SvmFit fit;
  fit.model = SvmModel(std::move(sv), std::move(coef), config.sigma, C,
                       std::isfinite(rho) ? -rho : 0.0, PlattParams{-1.0, 0.0});
  fit.dual_objective = -0.5 * alpha.dot(G - VectorXd::Ones(n));
  fit.alpha = std::move(alpha);
  fit.max_violation = violation;
  fit.iterations = iter;
  if (!converged) {
    throw SvmTrainingError("fit_svm_dual: iteration cap reached with KKT violation " +
                               std::to_string(violation),
                           std::move(fit));
  }
  return fit;
}

std::vector<int> kfold_assignment(Index n, int folds, std::uint64_t seed) {
  if (folds < 2) throw ArgumentError("kfold_assignment: need at least 2 folds");
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(static_cast<size_t>(n));
  for (size_t k = 0; k < order.size(); ++k) {
    fold[static_cast<size_t>(order[k])] = static_cast<int>(k % static_cast<size_t>(folds));
  }
  return fold;
}

namespace {

struct FoldData {
  MatrixXd X_train, X_test;
  VectorXd y_train, y_test;
};

FoldData split_fold(const MatrixXd& X, const VectorXd& y, const std::vector<int>& fold,
                    int k) {
  const Index n_test = std::count(fold.begin(), fold.end(), k);
  FoldData out{MatrixXd(X.rows() - n_test, X.cols()), MatrixXd(n_test, X.cols()),
               VectorXd(X.rows() - n_test), VectorXd(n_test)};
  Index a = 0;
  Index b = 0;
  for (Index i = 0; i < X.rows(); ++i) {
    if (fold[static_cast<size_t>(i)] == k) {
      out.X_test.row(b) = X.row(i);
      out.y_test[b++] = y[i];
    } else {
      out.X_train.row(a) = X.row(i);
      out.y_train[a++] = y[i];
    }
  }
  return out;
}

bool has_both_classes(const VectorXd& y) {
  return (y.array() > 0).any() && (y.array() < 0).any();
}

SvmModel fit_svm_best_effort(const MatrixXd& X, const VectorXd& y, const SvmConfig& config) {
  try {
    return fit_svm_dual(X, y, config).model;
  } catch (const SvmTrainingError& e) {
    return e.best().model;
  }
}

}  // namespace

SvmModel train_svm(const MatrixXd& X, const VectorXd& y, double box, double sigma,
                   int calibration_folds, std::uint64_t seed) {
  SvmConfig config;
  config.box = box;
  config.sigma = sigma;
  SvmModel model = fit_svm_dual(X, y, config).model;

  VectorXd scores(X.rows());
  bool cross_validated = calibration_folds >= 2 && X.rows() >= 2 * calibration_folds;
  if (cross_validated) {
    const auto fold = kfold_assignment(X.rows(), calibration_folds, seed);
    for (int k = 0; k < calibration_folds && cross_validated; ++k) {
      FoldData data = split_fold(X, y, fold, k);
      if (!has_both_classes(data.y_train)) {
        cross_validated = false;
        break;
      }
      const SvmModel part = fit_svm_best_effort(data.X_train, data.y_train, config);
      Index b = 0;
      for (Index i = 0; i < X.rows(); ++i) {
        if (fold[static_cast<size_t>(i)] == k) scores[i] = part.score(data.X_test.row(b++).transpose());
      }
    }
  }
  if (!cross_validated) {
    for (Index i = 0; i < X.rows(); ++i) scores[i] = model.score(X.row(i).transpose());
  }
  model.set_platt(platt_fit(scores, y));
  return model;
}

std::string to_string(ClassifierKind kind) {
  return kind == ClassifierKind::kLogistic ? "logistic" : "svm";
}

ClassifierKind parse_classifier_kind(const std::string& name) {
  if (name == "logistic") return ClassifierKind::kLogistic;
  if (name == "svm") return ClassifierKind::kSvm;
  throw ArgumentError("unknown classifier '" + name + "'");
}

std::unique_ptr<ProbabilityModel> train_classifier(ClassifierKind kind, const MatrixXd& X,
                                                   const VectorXd& y, const ModelGrid& grid,
                                                   std::uint64_t seed) {
  check_labels(y);
  const auto fold = kfold_assignment(X.rows(), grid.folds, seed);

  if (kind == ClassifierKind::kLogistic) {
    if (grid.ridge.empty()) throw ConfigError("ridge grid is empty");
    double best_ridge = grid.ridge.front();
    if (grid.ridge.size() > 1) {
      double best_loss = std::numeric_limits<double>::infinity();
      for (double ridge : grid.ridge) {
        double total = 0;
        for (int k = 0; k < grid.folds; ++k) {
          FoldData data = split_fold(X, y, fold, k);
          if (!has_both_classes(data.y_train) || data.y_test.size() == 0) continue;
          const LogisticModel m = train_logistic(data.X_train, data.y_train, {ridge});
          total += logistic_loss(data.X_test, data.y_test, m.weights(), m.intercept(), 0.0);
        }
        if (total < best_loss) {
          best_loss = total;
          best_ridge = ridge;
        }
      }
    }
    return std::make_unique<LogisticModel>(train_logistic(X, y, {best_ridge}));
  }

  if (grid.box.empty() || grid.sigma.empty()) throw ConfigError("SVM grid is empty");
  double best_box = grid.box.front();
  double best_sigma = grid.sigma.front();
  if (grid.box.size() * grid.sigma.size() > 1) {
    // Held-out log-loss of the calibrated probability: the quantity the
    // optimizer works on. Accuracy is too coarse to separate kernel widths.
    double best_loss = std::numeric_limits<double>::infinity();
    for (double box : grid.box) {
      for (double sigma : grid.sigma) {
        double loss = 0;
        for (int k = 0; k < grid.folds; ++k) {
          FoldData data = split_fold(X, y, fold, k);
          if (!has_both_classes(data.y_train)) continue;
          const SvmModel m = train_svm(data.X_train, data.y_train, box, sigma, 3, seed);
          for (Index i = 0; i < data.X_test.rows(); ++i) {
            const double p = std::clamp(m.probability(data.X_test.row(i).transpose()), 1e-12,
                                        1.0 - 1e-12);
            loss -= std::log(data.y_test[i] > 0 ? p : 1.0 - p);
          }
        }
        if (loss < best_loss) {
          best_loss = loss;
          best_box = box;
          best_sigma = sigma;
        }
      }
    }
  }
  return std::make_unique<SvmModel>(train_svm(X, y, best_box, best_sigma, 3, seed));
}

}  // namespace invclass
