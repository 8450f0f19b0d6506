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

// Command-line front end. Exit codes: 0 ok, 1 configuration error, 2 data
// error, 3 runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "invclass/engine.hpp"
#include "invclass/pipeline.hpp"
#include "invclass/service.hpp"
#include "invclass/student.hpp"

namespace {

using namespace invclass;
using nlohmann::json;

enum Exit { kOk = 0, kConfig = 1, kData = 2, kRuntime = 3 };

struct Overrides {
  std::string budgets;
  std::string optimizer;
  std::string policy;
  std::string classifier;
  bool swap = false;
  std::optional<std::uint64_t> seed;

  void apply(ExperimentConfig& c) const {
    if (!budgets.empty()) c.budgets = parse_budget_list(budgets);
    if (!optimizer.empty()) c.optimizer = parse_optimizer_kind(optimizer);
    if (!policy.empty()) {
      c.policy = parse_bound_policy(policy);
      c.policy_overrides.clear();
    }
    if (!classifier.empty()) c.classifier = parse_classifier_kind(classifier);
    if (swap) c.swap_roles = true;
    if (seed) c.seed = *seed;
    c.validate();
  }
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot write '" + path + "'");
  return file;
}

ModelBundle bundle_from(const std::string& bundle_path, const std::string& config_path) {
  if (!bundle_path.empty()) return load_bundle(bundle_path);
  if (config_path.empty()) throw ConfigError("either --bundle or --config is required");
  const ExperimentConfig c = load_config(config_path);
  return train_bundle(c, load_dataset(c));
}

// Rows of raw instances with the bundle's feature columns; other columns are
// ignored except an optional id column.
struct Instances {
  std::vector<VectorXd> rows;  // normalized
  std::vector<std::string> ids;
};

Instances read_instances(const ModelBundle& b, const std::string& path, char delimiter) {
  CsvOptions options;
  options.delimiter = delimiter;
  options.required_columns = b.schema.feature_names;
  const RawTable table = load_csv(path, options);
  Instances out;
  const auto& cols = table.columns;
  const auto id_it = b.schema.id_column.empty()
                         ? cols.end()
                         : std::find(cols.begin(), cols.end(), b.schema.id_column);
  for (Index i = 0; i < table.rows(); ++i) {
    VectorXd raw(b.schema.width());
    for (Index j = 0; j < raw.size(); ++j) {
      raw[j] = table.values(i, table.column_index(b.schema.feature_names[static_cast<size_t>(j)]));
    }
    out.rows.push_back(b.schema.normalize(raw));
    if (id_it != cols.end()) {
      const double id = table.values(i, id_it - cols.begin());
      out.ids.push_back(is_missing(id) ? std::to_string(i + 1) : json(id).dump());
    } else {
      out.ids.push_back(std::to_string(i + 1));
    }
  }
  return out;
}

void apply_request_overrides(CostBudgetSpec<double>& spec, OptimizerKind& optimizer,
                             const std::string& opt, const std::string& policy) {
  if (!opt.empty()) optimizer = parse_optimizer_kind(opt);
  if (!policy.empty()) {
    spec.bound_policy = parse_bound_policy(policy);
    spec.feature_policy.clear();
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Budget-constrained inverse classification"};
  app.require_subcommand(1);

  // train
  std::string config_path, bundle_path, out_path;
  auto* train = app.add_subcommand("train", "Fit classifier and indirect estimator on a dataset");
  train->add_option("-c,--config", config_path, "Experiment config JSON")->required();
  train->add_option("-o,--out", out_path, "Bundle output path")->required();

  // recommend / sweep
  std::string instances_path, trace_path, optimizer_name, policy_name, budget_list;
  double budget = 0.0;
  char delimiter = ',';
  auto* rec = app.add_subcommand("recommend", "Recommend changes for instances in a CSV file");
  for (auto* cmd : {rec}) {
    cmd->add_option("-b,--bundle", bundle_path, "Model bundle JSON");
    cmd->add_option("-c,--config", config_path, "Config JSON (trains a bundle when no --bundle)");
    cmd->add_option("-i,--instances", instances_path, "CSV of raw instances")->required();
    cmd->add_option("--budget", budget, "Budget")->required()->check(CLI::NonNegativeNumber);
    cmd->add_option("--trace", trace_path, "Write optimizer iterates as JSON lines");
  }
  auto* sweep = app.add_subcommand("sweep", "Recommend across a budget grid");
  sweep->add_option("-b,--bundle", bundle_path, "Model bundle JSON");
  sweep->add_option("-c,--config", config_path, "Config JSON (trains a bundle when no --bundle)");
  sweep->add_option("-i,--instances", instances_path, "CSV of raw instances")->required();
  sweep->add_option("--budgets", budget_list, "Budget grid, e.g. 0:20:1 or 0,2,4")->required();
  for (auto* cmd : {rec, sweep}) {
    cmd->add_option("-o,--out", out_path, "JSON-lines report output (default stdout)");
    cmd->add_option("--optimizer", optimizer_name, "pgd | sensitivity");
    cmd->add_option("--policy", policy_name, "hardline | elastic");
    cmd->add_option("--delimiter", delimiter, "Instance CSV delimiter");
  }

  // experiment
  Overrides ov;
  bool grid = false;
  std::string csv_path, reports_path;
  std::vector<double> frequency_budgets;
  auto* exp = app.add_subcommand("experiment", "Run the split/validate pipeline");
  exp->add_option("-c,--config", config_path, "Experiment config JSON")->required();
  exp->add_option("--budgets", ov.budgets, "Override the budget grid");
  exp->add_option("--optimizer", ov.optimizer, "Override optimizer");
  exp->add_option("--policy", ov.policy, "Override bound policy");
  exp->add_option("--classifier", ov.classifier, "Override classifier");
  exp->add_option("--seed", ov.seed, "Override seed");
  exp->add_flag("--swap-roles", ov.swap, "Exchange the training and test halves");
  exp->add_flag("--grid", grid, "Run classifier x optimizer x policy");
  exp->add_option("-o,--out", csv_path, "Per-budget summary CSV (default stdout)");
  exp->add_option("--reports", reports_path, "Per-instance reports as JSON lines");
  exp->add_option("--frequency", frequency_budgets, "Print change-frequency tables at these budgets");

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
  srv->add_option("-b,--bundle", bundle_path, "Model bundle JSON");
  srv->add_option("-c,--config", config_path, "Config JSON (trains a bundle when no --bundle)");
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));

  // probe-h
  std::vector<Index> sizes{10, 100};
  Index probe_rows = 2000, probe_dim = 20;
  int reps = 10, queries = 50;
  auto* probe = app.add_subcommand("probe-h", "Time the indirect estimator against |I|");
  probe->add_option("--sizes", sizes, "Indirect dimensions")->delimiter(',');
  probe->add_option("--rows", probe_rows, "Stored rows");
  probe->add_option("--input-dim", probe_dim, "|D| + |U|");
  probe->add_option("--reps", reps, "Repetitions");
  probe->add_option("--queries", queries, "Queries per repetition");

  // prepare-student
  std::string raw_path, out_dir;
  int synthetic_rows = 0;
  std::uint64_t synthetic_seed = 1;
  auto* prep = app.add_subcommand("prepare-student",
                                  "Encode student-por.csv and write a matching config");
  prep->add_option("--raw", raw_path, "Raw semicolon-separated UCI file");
  prep->add_option("--synthetic", synthetic_rows, "Generate this many synthetic rows instead");
  prep->add_option("--synthetic-seed", synthetic_seed, "Seed for --synthetic");
  prep->add_option("-o,--out-dir", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (train->parsed()) {
    const ExperimentConfig c = load_config(config_path);
    save_bundle(train_bundle(c, load_dataset(c)), out_path);
    std::cerr << "wrote " << out_path << '\n';
    return kOk;
  }

  if (rec->parsed() || sweep->parsed()) {
    const ModelBundle b = bundle_from(bundle_path, config_path);
    const Instances inst = read_instances(b, instances_path, delimiter);
    CostBudgetSpec<double> spec = b.base_spec;
    OptimizerKind optimizer = b.optimizer;
    apply_request_overrides(spec, optimizer, optimizer_name, policy_name);
    const std::vector<double> budgets =
        rec->parsed() ? std::vector<double>{budget} : parse_budget_list(budget_list);
    std::ofstream file, trace_file;
    std::ostream& out = open_output(out_path, file);
    std::ostream* trace_out = trace_path.empty() ? nullptr : &open_output(trace_path, trace_file);
    int failures = 0;
    for (size_t i = 0; i < inst.rows.size(); ++i) {
      for (double bgt : budgets) {
        spec.budget = bgt;
        OptimizationTrace trace;
        try {
          const auto r = recommend(b.context(), inst.rows[i], spec, optimizer, b.optimizer_config,
                                   inst.ids[i], &trace);
          out << to_json(r).dump() << '\n';
          if (trace_out != nullptr) {
            for (auto& line : trace_to_json_lines(trace)) {
              line["instance_id"] = inst.ids[i];
              line["budget"] = bgt;
              *trace_out << line.dump() << '\n';
            }
          }
        } catch (const OptimizationError& e) {
          ++failures;
          std::cerr << "instance " << inst.ids[i] << " budget " << bgt << ": " << e.what() << '\n';
        }
      }
    }
    return failures == 0 ? kOk : kRuntime;
  }

  if (exp->parsed()) {
    ExperimentConfig c = load_config(config_path);
    ov.apply(c);
    const Dataset data = load_dataset(c);
    auto progress = [](const std::string& line) { std::cerr << line << '\n'; };
    std::vector<BudgetRow> rows;
    std::vector<RecommendationReport> reports;
    size_t failures = 0;
    if (grid) {
      GridResult g = run_grid(c, data, {ClassifierKind::kLogistic, ClassifierKind::kSvm},
                              {OptimizerKind::kPgd, OptimizerKind::kSensitivity},
                              {BoundPolicy::kHardline, BoundPolicy::kElastic}, progress);
      rows = std::move(g.rows);
      reports = std::move(g.reports);
      failures = g.failures.size();
      std::cerr << "grid finished in " << g.seconds << " s\n";
    } else {
      SweepResult s = run_pipeline(c, data, progress);
      rows = std::move(s.rows);
      reports = std::move(s.reports);
      failures = s.failures.size();
    }
    std::ofstream file;
    open_output(csv_path, file) << budget_rows_csv(rows);
    if (!reports_path.empty()) {
      std::ofstream rf;
      std::ostream& r = open_output(reports_path, rf);
      for (const auto& rep : reports) r << to_json(rep).dump() << '\n';
    }
    for (double fb : frequency_budgets) {
      std::cerr << "change frequency at budget " << fb << ":\n";
      for (const auto& row : frequency_table(reports, fb)) {
        std::cerr << "  " << row.feature << "  count " << row.count << "  eligible " << row.eligible
                  << "  share " << row.share << '\n';
      }
    }
    if (failures > 0) std::cerr << failures << " instance optimizations failed\n";
    return kOk;
  }

  if (srv->parsed()) {
    const RecommendationService service(bundle_from(bundle_path, config_path));
    std::cerr << "listening on " << host << ':' << port << '\n';
    serve(service, host, port);
    return kOk;
  }

  if (probe->parsed()) {
    std::cout << "indirect_size,seconds,checksum\n";
    for (const auto& r : complexity_probe(sizes, probe_rows, probe_dim, reps, queries)) {
      std::cout << r.indirect_size << ',' << r.seconds << ',' << r.checksum << '\n';
    }
    return kOk;
  }

  if (prep->parsed()) {
    if (raw_path.empty() == (synthetic_rows == 0)) {
      throw ConfigError("give exactly one of --raw or --synthetic");
    }
    std::filesystem::create_directories(out_dir);
    Dataset d;
    if (!raw_path.empty()) {
      d = student::load(raw_path);
    } else {
      std::istringstream in(student::synthetic_raw_csv(synthetic_rows, synthetic_seed));
      d = student::encode(read_csv_records(in, ';'));
    }
    const auto data_path = (std::filesystem::path(out_dir) / "student_encoded.csv").string();
    const auto cfg_path = (std::filesystem::path(out_dir) / "student_config.json").string();
    student::write_encoded_csv(d, data_path);
    std::ofstream cfg(cfg_path);
    cfg << student::default_config_json("student_encoded.csv").dump(2) << '\n';
    std::cerr << "wrote " << data_path << " and " << cfg_path << '\n';
    return kOk;
  }
  return kConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what();
    if (e.row() > 0) std::cerr << " (line " << e.row() << ')';
    std::cerr << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
