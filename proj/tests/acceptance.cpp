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

// Acceptance report: one PASS/FAIL line per criterion at its stated
// tolerance. Criteria that need the UCI Student Performance file print
// NOT RUN when it is absent (set ICX_STUDENT_POR or place it at
// data/student-por.csv); INFO lines describe the synthetic stand-in and are
// never counted. Exit: 0 all run criteria pass, 1 any failure, 77 nothing
// failed but some criteria could not run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "invclass/engine.hpp"
#include "invclass/indirect.hpp"
#include "invclass/metrics.hpp"
#include "invclass/optimizer.hpp"
#include "invclass/pipeline.hpp"
#include "invclass/student.hpp"
#include "oracles.hpp"

namespace invclass {
namespace {

using Clock = std::chrono::steady_clock;
using testing::brute_force_project;
using testing::finite_difference;
using testing::kkt_residual;
using testing::random_spec;
using testing::relative_error;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

class Report {
 public:
  void check(const std::string& name, bool ok, const std::string& detail) {
    line(ok ? "PASS" : "FAIL", name, detail);
    failed_ |= !ok;
  }
  void not_run(const std::string& name, const std::string& why) {
    line("NOT RUN", name, why);
    skipped_ = true;
  }
  void info(const std::string& name, const std::string& detail) { line("INFO", name, detail); }

  int exit_code() const { return failed_ ? 1 : skipped_ ? 77 : 0; }

 private:
  static void line(const char* status, const std::string& name, const std::string& detail) {
    std::printf("%-8s %-34s %s\n", status, name.c_str(), detail.c_str());
    std::fflush(stdout);
  }
  bool failed_ = false;
  bool skipped_ = false;
};

// ---------------------------------------------------------------------------
// Projection

void projection_checks(Report& report) {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> wide(-2.0, 2.0);
  double worst = 0;
  double worst_kkt = 0;
  for (int k = 0; k < 200; ++k) {
    const Index d = 1 + k % 4;
    const auto spec = random_spec(d, rng);
    const VectorXd w = VectorXd::NullaryExpr(d, [&] { return wide(rng); });
    const auto p = project_with_multiplier(w, spec);
    worst = std::max(worst, (p.z - brute_force_project(w, spec, 1e-3)).lpNorm<Eigen::Infinity>());
    worst_kkt = std::max(worst_kkt, kkt_residual(w, p.z, p.multiplier, spec).max());
  }

  const FeasibleSetSpec<double> one{VectorXd::Ones(1), VectorXd::Ones(1), 0.5, -VectorXd::Ones(1),
                                    VectorXd::Ones(1)};
  const double hand1 = std::abs(project(VectorXd::Constant(1, 0.9), one)[0] - 0.5);
  const FeasibleSetSpec<double> two{Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 1), 0.6,
                                    Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
  const VectorXd z2 = project(Eigen::Vector2d(0.6, 0.6), two);
  const double hand2 = (z2 - Eigen::Vector2d(0.36, 0.12)).lpNorm<Eigen::Infinity>();
  const double elapsed = seconds_since(start);

  report.check("projection_vs_oracle", worst <= 2e-3 && elapsed < 60,
               fmt("200 specs |D| 1..4: max |err| %.2e (<= 2e-3), %.1f s (< 60 s)", worst, elapsed));
  report.check("projection_hand_cases", hand1 <= 1e-6 && hand2 <= 1e-6,
               fmt("1-D err %.1e, 2-D err %.1e (<= 1e-6)", hand1, hand2));

  // KKT on a larger sample, including wider dimensions.
  for (int k = 0; k < 1000; ++k) {
    const Index d = 1 + k % 12;
    const auto spec = random_spec(d, rng);
    const VectorXd w = VectorXd::NullaryExpr(d, [&] { return wide(rng); });
    const auto p = project_with_multiplier(w, spec);
    worst_kkt = std::max(worst_kkt, kkt_residual(w, p.z, p.multiplier, spec).max());
  }
  report.check("projection_kkt_certificate", worst_kkt <= 1e-6,
               fmt("1200 projections: max KKT residual %.2e (<= 1e-6)", worst_kkt));
}

// ---------------------------------------------------------------------------
// Objective gradients

struct Fixture {
  MatrixXd X;
  VectorXd y;
  FeaturePartition partition;
  std::unique_ptr<ProbabilityModel> logistic;
  std::unique_ptr<ProbabilityModel> svm;
  std::unique_ptr<IndirectModel> indirect;
};

// Six features: D = {0,1,2}, I = {3,4}, U = {5}. Risk rises with D; I
// depends smoothly on D and U.
Fixture make_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.12);
  const int n = 160;
  Fixture f;
  f.X.resize(n, 6);
  f.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    for (int j = 0; j < 3; ++j) f.X(i, j) = std::clamp((pos ? 0.65 : 0.35) + noise(rng), 0.0, 1.0);
    f.X(i, 5) = std::clamp(0.5 + 2 * noise(rng), 0.0, 1.0);
    f.X(i, 3) = std::clamp(0.5 * f.X(i, 0) + 0.3 * f.X(i, 5) + 0.5 * noise(rng), 0.0, 1.0);
    f.X(i, 4) = std::clamp(0.6 * f.X(i, 1) + 0.2 + 0.5 * noise(rng), 0.0, 1.0);
    f.y[i] = pos ? 1.0 : -1.0;
  }
  f.partition.direct = {0, 1, 2};
  f.partition.indirect = {3, 4};
  f.partition.unchangeable = {5};
  f.logistic = std::make_unique<LogisticModel>(train_logistic(f.X, f.y, LogisticConfig{1e-3}));
  f.svm = std::make_unique<SvmModel>(train_svm(f.X, f.y, 1.0, 0.8));
  MatrixXd inputs(n, 4);
  inputs << f.X(Eigen::all, std::vector<Index>{0, 1, 2}), f.X.col(5);
  f.indirect = std::make_unique<IndirectModel>(
      inputs, f.X(Eigen::all, std::vector<Index>{3, 4}), 3, 0.25);
  return f;
}

void gradient_checks(Report& report, const Fixture& f) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> step(-0.3, 0.3);
  for (const auto* model : {f.logistic.get(), f.svm.get()}) {
    for (const bool with_h : {false, true}) {
      int checked = 0;
      int tries = 0;
      double worst = 0;
      while (checked < 60 && tries < 5000) {
        ++tries;
        const VectorXd x = VectorXd::NullaryExpr(6, [&] { return u(rng); });
        const ReducedProblem problem(*model, with_h ? f.indirect.get() : nullptr, x, f.partition);
        const VectorXd z = VectorXd::NullaryExpr(3, [&] { return step(rng); });
        // Saturated probabilities have gradients at rounding level.
        if (std::abs(problem.value(z) - 0.5) > 0.49) continue;
        const VectorXd fd = finite_difference([&](const VectorXd& v) { return problem.value(v); }, z);
        worst = std::max(worst, relative_error(problem.gradient(z), fd));
        ++checked;
      }
      const std::string name = "gradient_" + model->kind() + (with_h ? "_with_h" : "_direct_only");
      report.check(name, checked >= 50 && worst <= 1e-4,
                   fmt("%.0f fixtures: max relative error %.2e (<= 1e-4)", checked, worst));
    }
  }
}

// ---------------------------------------------------------------------------
// Optimizers

CostBudgetSpec<double> random_costs(std::mt19937_64& rng, double budget, BoundPolicy policy) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CostBudgetSpec<double> spec;
  spec.cost_up.resize(3);
  spec.cost_down.resize(3);
  spec.raw_lower.resize(3);
  spec.raw_upper.resize(3);
  for (Index i = 0; i < 3; ++i) {
    spec.cost_up[i] = u(rng) < 0.3 ? 0.0 : 0.5 + 2 * u(rng);
    spec.cost_down[i] = u(rng) < 0.3 ? 0.0 : 0.5 + 2 * u(rng);
    spec.raw_lower[i] = 0.3 * u(rng);
    spec.raw_upper[i] = 1.0 - 0.3 * u(rng);
  }
  spec.budget = budget;
  spec.bound_policy = policy;
  return spec;
}

bool non_increasing(const OptimizationTrace& trace) {
  for (size_t k = 1; k < trace.records.size(); ++k) {
    if (trace.records[k].value > trace.records[k - 1].value) return false;
  }
  return true;
}

void optimizer_checks(Report& report, const Fixture& f) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> budgets{0.0, 0.25, 1.0, 3.0};

  long runs = 0;
  long monotone = 0;
  long feasible_runs = 0;
  long iterates = 0;
  long infeasible_iterates = 0;
  double worst_stationarity = 0;
  double worst_budget_excess = 0;
  std::map<std::string, long> terminations;
  std::vector<std::pair<Objective, FeasibleSetSpec<double>>> capped;
  for (int inst = 0; inst < 60; ++inst) {
    const VectorXd x = VectorXd::NullaryExpr(6, [&] { return u(rng); });
    for (const auto* model : {f.logistic.get(), f.svm.get()}) {
      const ReducedProblem problem(*model, f.indirect.get(), x, f.partition);
      const Objective objective = problem.objective();
      for (const auto policy : {BoundPolicy::kHardline, BoundPolicy::kElastic}) {
        for (const double budget : budgets) {
          const auto costs = random_costs(rng, budget, policy);
          const auto spec =
              FeasibleSetSpec<double>::from(costs, effective_bounds(problem.direct_values(), costs));
          for (const auto kind : {OptimizerKind::kPgd, OptimizerKind::kSensitivity}) {
            const auto result = optimize(kind, objective, spec, {});
            ++runs;
            bool ok = spec.contains(result.z, 1e-8);
            for (const auto& rec : result.trace.records) {
              ++iterates;
              if (!spec.contains(rec.z, 1e-8)) {
                ++infeasible_iterates;
                ok = false;
              }
            }
            worst_budget_excess = std::max(
                worst_budget_excess,
                change_cost(result.z, spec.cost_up, spec.cost_down) - spec.budget);
            feasible_runs += ok;
            if (kind == OptimizerKind::kPgd) {
              monotone += non_increasing(result.trace);
              ++terminations[to_string(result.trace.termination)];
              if (result.trace.termination == Termination::kMaxIterations) {
                capped.emplace_back(objective, spec);
              }
              worst_stationarity =
                  std::max(worst_stationarity, stationarity_residual(objective, spec, result.z,
                                                                     result.trace.final_step));
            }
          }
        }
      }
    }
  }
  const long pgd_runs = runs / 2;

  // Convex quadratic with a known interior optimum.
  VectorXd centre(3);
  centre << 0.2, -0.1, 0.15;
  const VectorXd weights = Eigen::Vector3d(1.0, 3.0, 0.5);
  const Objective quadratic{
      [=](const VectorXd& z) { return (weights.array() * (z - centre).array().square()).sum(); },
      [=](const VectorXd& z) { return VectorXd(2 * weights.array() * (z - centre).array()); }};
  const FeasibleSetSpec<double> box{VectorXd::Ones(3), VectorXd::Ones(3), 1.0,
                                    -VectorXd::Ones(3), VectorXd::Ones(3)};
  const auto q = pgd(quadratic, box);
  const double q_err = (q.z - centre).lpNorm<Eigen::Infinity>();
  const double q_stat = stationarity_residual(quadratic, box, q.z, q.trace.final_step);
  worst_stationarity = std::max(worst_stationarity, q_stat);

  std::ostringstream terms;
  for (const auto& [name, count] : terminations) terms << name << "=" << count << " ";

  report.check("pgd_monotone_traces", monotone == pgd_runs && non_increasing(q.trace),
               fmt("%.0f/%.0f backtracking traces non-increasing", monotone, pgd_runs));
  report.check("pgd_quadratic_optimum", q_err <= 1e-6,
               fmt("|z* - z_opt|_inf %.2e (<= 1e-6) in %.0f iterations", q_err, q.trace.iterations));
  report.check("pgd_stationarity", worst_stationarity <= 1e-5,
               fmt("max ||z* - P(z* - eta g)|| %.2e (<= 1e-5) over %.0f runs", worst_stationarity,
                   pgd_runs + 1) +
                   "; terminations " + terms.str());
  // Runs stopped by the iteration cap sit on nearly flat probability tails
  // (g ~ 1e-7..1e-4) where unit steps still move more than tol_z. Rerun them
  // uncapped to separate "not yet converged" from "converged elsewhere".
  if (!capped.empty()) {
    OptimizerConfig long_run;
    long_run.max_iterations = 200000;
    double worst = 0;
    long still_capped = 0;
    int most = 0;
    for (const auto& [objective, spec] : capped) {
      const auto r = pgd(objective, spec, long_run);
      still_capped += r.trace.termination == Termination::kMaxIterations;
      most = std::max(most, r.trace.iterations);
      worst = std::max(worst, stationarity_residual(objective, spec, r.z, r.trace.final_step));
    }
    report.info("pgd_stationarity_uncapped",
                fmt("%.0f capped runs rerun with max_iter 2e5: max residual %.2e, %.0f still capped, "
                    "longest %.0f iterations",
                    capped.size(), worst, still_capped, most));
  }
  report.check("optimizer_feasibility", feasible_runs == runs,
               fmt("%.0f/%.0f runs feasible (pgd+sensitivity x hardline+elastic); %.0f iterates, "
                   "max budget excess %.1e",
                   feasible_runs, runs, iterates, worst_budget_excess) +
                   (infeasible_iterates ? " with infeasible iterates" : ""));
}

// ---------------------------------------------------------------------------
// Indirect estimator scaling and representativeness

void scaling_check(Report& report) {
  const auto rows = complexity_probe({10, 100}, 2000, 20, 10, 50, 7);
  const double ratio = rows[1].seconds / rows[0].seconds;
  report.check("indirect_linear_scaling", ratio <= 20,
               fmt("n=2000, 10 reps: |I|=10 %.3f s, |I|=100 %.3f s, ratio %.2f (<= 20)",
                   rows[0].seconds, rows[1].seconds, ratio));
}

void discrepancy_check(Report& report) {
  const Index dim = 43;
  const VectorXd mean = VectorXd::Constant(dim, 0.5);
  std::vector<double> medians;
  for (const Index n : {100, 1000, 10000}) {
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const MatrixXd sample = MatrixXd::NullaryExpr(n, dim, [&] { return u(rng); });
      values.push_back(discrepancy(sample, mean));
    }
    std::nth_element(values.begin(), values.begin() + 10, values.end());
    const double upper = values[10];
    const double lower = *std::max_element(values.begin(), values.begin() + 10);
    medians.push_back(0.5 * (lower + upper));
  }
  const double ratio = medians[2] / medians[0];
  report.check("discrepancy_vanishes",
               medians[1] < medians[0] && medians[2] < medians[1] && ratio <= 0.1,
               fmt("median over 20 seeds: n=1e2 %.4f, 1e3 %.4f, 1e4 %.4f; ratio %.4f (<= 0.1)",
                   medians[0], medians[1], medians[2], ratio));
}

// ---------------------------------------------------------------------------
// Change-frequency table

void frequency_check(Report& report) {
  auto change = [](const std::string& name, double delta, double lower, double upper) {
    FeatureChange c;
    c.feature = name;
    c.delta = delta;
    c.effective_lower = lower;
    c.effective_upper = upper;
    return c;
  };
  auto at = [](double budget, std::vector<FeatureChange> changes) {
    RecommendationReport r;
    r.budget = budget;
    r.changes = std::move(changes);
    return r;
  };
  // Hand count at budget 4: studytime rises in 3 of 4 eligible instances;
  // Walc falls in 1 of the 2 instances that could lower it; absences never
  // moves. The budget-2 report is ignored.
  const std::vector<RecommendationReport> reports{
      at(4, {change("studytime", 0.3, 0, 1), change("Walc", -0.2, -0.5, 0), change("absences", 0, -1, 0)}),
      at(4, {change("studytime", 0.1, 0, 1), change("Walc", 0, 0, 1), change("absences", 0, -1, 0)}),
      at(4, {change("studytime", 0, 0, 1), change("Walc", 0, -0.4, 0), change("absences", 0, -1, 0)}),
      at(4, {change("studytime", 0.5, 0, 1), change("Walc", 0, 0, 0), change("absences", 0, -1, 0)}),
      at(2, {change("studytime", 0.9, 0, 1), change("Walc", -0.9, -1, 0), change("absences", -1, -1, 0)}),
  };
  const auto a = frequency_table(reports, 4);
  const auto b = frequency_table(reports, 4);
  const bool exact = a.size() == 2 && a[0].feature == "studytime" && a[0].count == 3 &&
                     a[0].eligible == 4 && a[0].share == 0.75 && a[1].feature == "Walc" &&
                     a[1].count == 1 && a[1].eligible == 2 && a[1].share == 0.5;
  bool same = a.size() == b.size();
  for (size_t k = 0; same && k < a.size(); ++k) {
    same = a[k].feature == b[k].feature && a[k].count == b[k].count && a[k].share == b[k].share;
  }
  report.check("frequency_table_fixture", exact && same,
               "studytime 3/4 = 0.75, Walc 1/2 = 0.5, absences omitted; repeat identical");
}

// ---------------------------------------------------------------------------
// Student Performance

const BudgetRow* find_row(const std::vector<BudgetRow>& rows, const std::string& classifier,
                          const std::string& optimizer, const std::string& policy, double budget) {
  for (const auto& r : rows) {
    if (r.classifier == classifier && r.optimizer == optimizer && r.policy == policy &&
        std::abs(r.budget - budget) < 1e-9) {
      return &r;
    }
  }
  return nullptr;
}

struct StudentOutcome {
  bool ok = false;
  std::string detail;
};

// Each entry is one criterion evaluated on a finished grid.
std::vector<std::pair<std::string, StudentOutcome>> student_outcomes(const GridResult& grid,
                                                                     double seconds) {
  std::vector<std::pair<std::string, StudentOutcome>> out;
  const auto& rows = grid.rows;
  std::vector<double> budgets;
  for (int b = 0; b <= 20; ++b) budgets.push_back(b);

  // Mean validated probability non-increasing (0.01 slack), SVM + PGD.
  {
    StudentOutcome o{true, ""};
    double worst_rise = -1;
    for (const std::string policy : {"hardline", "elastic"}) {
      for (size_t k = 1; k < budgets.size(); ++k) {
        const auto* prev = find_row(rows, "svm", "pgd", policy, budgets[k - 1]);
        const auto* cur = find_row(rows, "svm", "pgd", policy, budgets[k]);
        if (!prev || !cur) {
          o.ok = false;
          continue;
        }
        worst_rise = std::max(worst_rise, cur->mean_probability - prev->mean_probability);
      }
    }
    o.ok = o.ok && worst_rise <= 0.01;
    const auto* b0 = find_row(rows, "svm", "pgd", "hardline", 0);
    const auto* b20 = find_row(rows, "svm", "pgd", "hardline", 20);
    o.detail = fmt("svm/pgd largest step-to-step rise %.4f (<= 0.01); p' %.3f at B=0 -> %.3f at B=20",
                   worst_rise, b0 ? b0->mean_probability : -1, b20 ? b20->mean_probability : -1);
    out.emplace_back("student_probability_vs_budget", o);
  }
  // PGD vs the sensitivity benchmark at budget 4, Hardline.
  {
    const auto* pgd = find_row(rows, "svm", "pgd", "hardline", 4);
    const auto* sens = find_row(rows, "svm", "sensitivity", "hardline", 4);
    StudentOutcome o{pgd && sens && pgd->mean_probability <= sens->mean_probability + 0.02, ""};
    if (pgd && sens) {
      o.detail = fmt("svm hardline B=4: pgd p' %.4f vs sens p' %.4f + 0.02 (model f: %.4f vs %.4f)",
                     pgd->mean_probability, sens->mean_probability, pgd->mean_model_probability,
                     sens->mean_model_probability);
    }
    out.emplace_back("student_pgd_vs_sensitivity", o);
  }
  out.emplace_back("student_grid_runtime",
                   StudentOutcome{seconds < 1800, fmt("2x2x2 grid, 21 budgets: %.0f s (< 1800 s)", seconds)});
  // Hardline vs Elastic.
  {
    double worst = 0;
    bool complete = true;
    for (const std::string classifier : {"svm", "logistic"}) {
      for (const std::string optimizer : {"pgd", "sensitivity"}) {
        for (double b : budgets) {
          const auto* h = find_row(rows, classifier, optimizer, "hardline", b);
          const auto* e = find_row(rows, classifier, optimizer, "elastic", b);
          if (!h || !e) {
            complete = false;
            continue;
          }
          worst = std::max(worst, std::abs(h->mean_probability - e->mean_probability));
        }
      }
    }
    out.emplace_back("student_policy_equivalence",
                     StudentOutcome{complete && worst <= 0.02,
                                    fmt("max |hardline - elastic| over all curves %.4f (<= 0.02)", worst)});
  }
  // Support at budget 0.
  {
    bool ok = true;
    std::ostringstream detail;
    for (const std::string optimizer : {"pgd", "sensitivity"}) {
      const auto* r = find_row(rows, "svm", optimizer, "hardline", 0);
      if (!r) {
        ok = false;
        continue;
      }
      ok = ok && r->mean_gamma >= 0.5 * r->baseline_gamma;
      detail << optimizer << " gamma " << fmt("%.2f", r->mean_gamma) << " ";
    }
    const auto* any = find_row(rows, "svm", "pgd", "hardline", 0);
    const auto* high = find_row(rows, "svm", "pgd", "hardline", 20);
    detail << fmt("vs baseline %.2f x 0.5; eps %.4f at B=0, gamma %.2f at B=20",
                  any ? any->baseline_gamma : -1, any ? any->mean_epsilon : -1,
                  high ? high->mean_gamma : -1);
    out.emplace_back("student_support", StudentOutcome{ok, detail.str()});
  }
  // Every recommendation respects its bounds and budget.
  {
    long bad = 0;
    for (const auto& r : grid.reports) {
      bad += r.cost_spent > r.budget + 1e-8;
      for (const auto& c : r.changes) bad += c.delta < c.effective_lower || c.delta > c.effective_upper;
    }
    out.emplace_back("student_feasibility",
                     StudentOutcome{bad == 0 && grid.failures.empty(),
                                    fmt("%.0f reports, %.0f violations, %.0f optimizer failures",
                                        grid.reports.size(), bad, grid.failures.size())});
  }
  return out;
}

GridResult run_student_grid(const Dataset& data, double& seconds) {
  const auto config = student::default_config("");
  const auto start = Clock::now();
  auto grid = run_grid(config, data, {ClassifierKind::kSvm, ClassifierKind::kLogistic},
                       {OptimizerKind::kPgd, OptimizerKind::kSensitivity},
                       {BoundPolicy::kHardline, BoundPolicy::kElastic});
  seconds = seconds_since(start);
  return grid;
}

std::string student_path() {
  if (const char* env = std::getenv("ICX_STUDENT_POR"); env != nullptr && *env != '\0') return env;
  const std::string local = std::string(INVCLASS_SOURCE_DIR) + "/data/student-por.csv";
  return std::filesystem::exists(local) ? local : "";
}

void student_checks(Report& report) {
  const std::vector<std::string> names{"student_probability_vs_budget", "student_pgd_vs_sensitivity",
                                       "student_grid_runtime", "student_policy_equivalence",
                                       "student_support", "student_feasibility"};
  const std::string path = student_path();
  if (path.empty()) {
    for (const auto& name : names) {
      report.not_run(name, "student-por.csv not found (set ICX_STUDENT_POR)");
    }
  } else {
    const Dataset data = student::load(path);
    double seconds = 0;
    const auto grid = run_student_grid(data, seconds);
    report.info("student_data", path + fmt(" (%.0f rows)", data.rows()));
    for (const auto& [name, outcome] : student_outcomes(grid, seconds)) {
      report.check(name, outcome.ok, outcome.detail);
    }
  }

  // The synthetic stand-in exercises the same pipeline end to end.
  if (std::getenv("ICX_SKIP_SURROGATE") != nullptr) return;
  std::istringstream raw(student::synthetic_raw_csv(649, 1));
  const Dataset surrogate = student::encode(read_csv_records(raw, ';'));
  double seconds = 0;
  const auto grid = run_student_grid(surrogate, seconds);
  for (const auto& [name, outcome] : student_outcomes(grid, seconds)) {
    report.info("surrogate:" + name.substr(8),
                std::string(outcome.ok ? "[meets] " : "[misses] ") + outcome.detail);
  }
}

}  // namespace
}  // namespace invclass

int main() {
  using namespace invclass;
  Report report;
  projection_checks(report);
  const Fixture fixture = make_fixture(5);
  gradient_checks(report, fixture);
  optimizer_checks(report, fixture);
  scaling_check(report);
  discrepancy_check(report);
  frequency_check(report);
  student_checks(report);
  return report.exit_code();
}
