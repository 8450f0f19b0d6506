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

#include "invclass/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace invclass {

using nlohmann::json;

namespace {

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).data(), m.row(i).data() + 0));
    auto& row = rows.back();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& rows, Index cols_if_empty = 0) {
  const auto n = static_cast<Index>(rows.size());
  const Index p = n > 0 ? static_cast<Index>(rows[0].size()) : cols_if_empty;
  MatrixXd m(n, p);
  for (Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<size_t>(i)];
    if (static_cast<Index>(row.size()) != p) throw ConfigError("ragged matrix in JSON document");
    for (Index j = 0; j < p; ++j) m(i, j) = row[static_cast<size_t>(j)].get<double>();
  }
  return m;
}

json vector_to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

VectorXd vector_from_json(const json& node) {
  const auto values = node.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

std::vector<std::string> names_of(const std::vector<std::string>& all, const IndexList& idx) {
  std::vector<std::string> out;
  for (Index i : idx) out.push_back(all[static_cast<size_t>(i)]);
  return out;
}

IndexList indices_of(const std::vector<std::string>& all, const std::vector<std::string>& names) {
  IndexList out;
  for (const auto& name : names) {
    const auto it = std::find(all.begin(), all.end(), name);
    if (it == all.end()) throw ConfigError("bundle refers to unknown feature '" + name + "'");
    out.push_back(static_cast<Index>(it - all.begin()));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Reports

json to_json(const SupportReport& r) {
  return {{"epsilon", r.epsilon}, {"gamma", r.gamma}, {"k", r.k},
          {"radius", r.radius}, {"baseline_gamma", r.baseline_gamma}};
}

json to_json(const RecommendationReport& r) {
  json changes = json::array();
  for (const auto& c : r.changes) {
    changes.push_back({{"feature", c.feature},
                       {"delta", c.delta},
                       {"delta_raw", c.delta_raw},
                       {"before_raw", c.before_raw},
                       {"after_raw", c.after_raw},
                       {"effective_lower", c.effective_lower},
                       {"effective_upper", c.effective_upper}});
  }
  json doc = {{"instance_id", r.instance_id},
              {"budget", r.budget},
              {"optimizer", r.optimizer},
              {"policy", r.policy},
              {"changes", changes},
              {"cost_spent", r.cost_spent},
              {"probability_before", r.probability_before},
              {"probability_after", r.probability_after},
              {"model_probability_before", r.model_probability_before},
              {"model_probability_after", r.model_probability_after},
              {"trace",
               {{"iterations", r.trace.iterations},
                {"termination", r.trace.termination},
                {"initial_value", r.trace.initial_value},
                {"final_value", r.trace.final_value}}}};
  doc["support"] = r.support ? to_json(*r.support) : json(nullptr);
  return doc;
}

RecommendationReport report_from_json(const json& doc) {
  RecommendationReport r;
  r.instance_id = doc.at("instance_id").get<std::string>();
  r.budget = doc.at("budget").get<double>();
  r.optimizer = doc.at("optimizer").get<std::string>();
  r.policy = doc.at("policy").get<std::string>();
  for (const auto& c : doc.at("changes")) {
    r.changes.push_back({c.at("feature").get<std::string>(), c.at("delta").get<double>(),
                         c.at("delta_raw").get<double>(), c.at("before_raw").get<double>(),
                         c.at("after_raw").get<double>(), c.at("effective_lower").get<double>(),
                         c.at("effective_upper").get<double>()});
  }
  r.cost_spent = doc.at("cost_spent").get<double>();
  r.probability_before = doc.at("probability_before").get<double>();
  r.probability_after = doc.at("probability_after").get<double>();
  r.model_probability_before = doc.at("model_probability_before").get<double>();
  r.model_probability_after = doc.at("model_probability_after").get<double>();
  const json& t = doc.at("trace");
  r.trace = {t.at("iterations").get<int>(), t.at("termination").get<std::string>(),
             t.at("initial_value").get<double>(), t.at("final_value").get<double>()};
  if (const auto it = doc.find("support"); it != doc.end() && !it->is_null()) {
    r.support = SupportReport{it->at("epsilon").get<double>(), it->at("gamma").get<long>(),
                              it->at("k").get<int>(), it->at("radius").get<double>(),
                              it->at("baseline_gamma").get<double>()};
  }
  return r;
}

json trace_to_json_lines(const OptimizationTrace& trace) {
  json lines = json::array();
  for (const auto& rec : trace.records) {
    lines.push_back({{"t", rec.t}, {"z", vector_to_json(rec.z)}, {"g", rec.value},
                     {"cost", rec.cost}, {"step", rec.step}});
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Single-instance recommendation

RecommendationReport recommend(const RecommendContext& ctx, const VectorXd& instance,
                               const CostBudgetSpec<double>& spec, OptimizerKind optimizer,
                               const OptimizerConfig& config, const std::string& instance_id,
                               OptimizationTrace* trace_out) {
  if (ctx.model == nullptr || ctx.schema == nullptr || ctx.partition == nullptr) {
    throw StateError("recommend: model, schema and partition are required");
  }
  spec.validate();
  const FeaturePartition& partition = *ctx.partition;
  const ReducedProblem problem(*ctx.model, ctx.indirect, instance, partition);
  const VectorXd x_direct = problem.direct_values();
  const auto bounds = effective_bounds(x_direct, spec);
  const auto feasible = FeasibleSetSpec<double>::from(spec, bounds);

  OptimizationResult result = optimize(optimizer, problem.objective(), feasible, config);
  const VectorXd& z = result.z;

  RecommendationReport report;
  report.instance_id = instance_id;
  report.budget = spec.budget;
  report.optimizer = to_string(optimizer);
  report.policy = to_string(spec.bound_policy);
  report.cost_spent = change_cost(z, spec);

  const VectorXd base = problem.instance_at(VectorXd::Zero(z.size()));
  const VectorXd moved = problem.instance_at(z);
  report.model_probability_before = ctx.model->probability(base);
  report.model_probability_after = ctx.model->probability(moved);

  if (ctx.validation_model != nullptr) {
    const IndirectModel* h = ctx.validation_indirect != nullptr ? ctx.validation_indirect : ctx.indirect;
    const ReducedProblem validation(*ctx.validation_model, h, instance, partition);
    report.probability_before = validation.value(VectorXd::Zero(z.size()));
    report.probability_after = validation.value(z);
  } else {
    report.probability_before = report.model_probability_before;
    report.probability_after = report.model_probability_after;
  }

  const DatasetSchema& schema = *ctx.schema;
  for (Index i = 0; i < z.size(); ++i) {
    const Index col = partition.direct[static_cast<size_t>(i)];
    FeatureChange c;
    c.feature = schema.feature_names[static_cast<size_t>(col)];
    c.delta = z[i];
    c.delta_raw = z[i] * schema.raw_scale(col);
    c.before_raw = schema.min[col] + x_direct[i] * schema.raw_scale(col);
    c.after_raw = c.before_raw + c.delta_raw;
    c.effective_lower = bounds.lower[i];
    c.effective_upper = bounds.upper[i];
    report.changes.push_back(std::move(c));
  }
  report.trace = {result.trace.iterations, to_string(result.trace.termination),
                  result.trace.initial_value, result.trace.final_value};
  if (ctx.support != nullptr) report.support = ctx.support->support(moved);
  if (trace_out != nullptr) *trace_out = std::move(result.trace);
  return report;
}

// ---------------------------------------------------------------------------
// Bundles

std::vector<std::string> ModelBundle::direct_names() const {
  return names_of(schema.feature_names, partition.direct);
}

RecommendContext ModelBundle::context() const {
  RecommendContext ctx;
  ctx.model = classifier.get();
  ctx.indirect = indirect.get();
  ctx.schema = &schema;
  ctx.partition = &partition;
  ctx.support = support.get();
  return ctx;
}

void ModelBundle::index_support() {
  support = training.rows() >= support_k
                ? std::make_shared<const SupportIndex>(training, *classifier, support_k)
                : nullptr;
}

ModelBundle train_bundle(const ExperimentConfig& config, const Dataset& data) {
  const ResolvedProblem resolved = resolve(config, data.feature_names);
  ModelBundle bundle;
  bundle.schema = fit_preprocess(data.X, data.feature_names);
  bundle.schema.label_column = config.label_column;
  bundle.schema.id_column = config.id_column;
  bundle.partition = resolved.partition;
  bundle.base_spec = resolved.spec;
  bundle.training = apply_preprocess(data.X, bundle.schema);
  bundle.classifier = train_classifier(config.classifier, bundle.training, data.y, config.grid,
                                       config.seed);
  if (!bundle.partition.indirect.empty()) {
    bundle.indirect = std::make_shared<const IndirectModel>(fit_indirect(
        bundle.training, bundle.partition,
        config.bandwidth_grid.empty() ? default_bandwidth_grid() : config.bandwidth_grid,
        config.grid.folds, config.seed));
  }
  bundle.optimizer = config.optimizer;
  bundle.optimizer_config = config.optimizer_config;
  bundle.support_k = config.support_k;
  bundle.index_support();
  return bundle;
}

json classifier_to_json(const ProbabilityModel& model) {
  if (const auto* m = dynamic_cast<const LogisticModel*>(&model)) {
    return {{"type", "logistic"}, {"weights", vector_to_json(m->weights())},
            {"intercept", m->intercept()}};
  }
  if (const auto* m = dynamic_cast<const SvmModel*>(&model)) {
    return {{"type", "svm"},
            {"support_vectors", matrix_to_json(m->support_vectors())},
            {"dual_coefs", vector_to_json(m->dual_coefs())},
            {"sigma", m->sigma()},
            {"C", m->box()},
            {"offset", m->offset()},
            {"dimension", m->dimension()},
            {"platt", {{"A", m->platt().slope}, {"B", m->platt().intercept}}}};
  }
  throw ArgumentError("classifier_to_json: unsupported model kind '" + model.kind() + "'");
}

std::unique_ptr<ProbabilityModel> classifier_from_json(const json& doc) {
  const auto type = doc.at("type").get<std::string>();
  if (type == "logistic") {
    return std::make_unique<LogisticModel>(vector_from_json(doc.at("weights")),
                                           doc.at("intercept").get<double>());
  }
  if (type == "svm") {
    return std::make_unique<SvmModel>(
        matrix_from_json(doc.at("support_vectors"), doc.value("dimension", Index{0})),
        vector_from_json(doc.at("dual_coefs")), doc.at("sigma").get<double>(),
        doc.at("C").get<double>(), doc.at("offset").get<double>(),
        PlattParams{doc.at("platt").at("A").get<double>(), doc.at("platt").at("B").get<double>()});
  }
  throw ConfigError("unknown classifier type '" + type + "'");
}

json to_json(const IndirectModel& model) {
  return {{"inputs", matrix_to_json(model.inputs())},
          {"targets", matrix_to_json(model.targets())},
          {"direct_dim", model.direct_dim()},
          {"bandwidth", model.bandwidth()}};
}

IndirectModel indirect_from_json(const json& doc) {
  return IndirectModel(matrix_from_json(doc.at("inputs")), matrix_from_json(doc.at("targets")),
                       doc.at("direct_dim").get<Index>(), doc.at("bandwidth").get<double>());
}

json to_json(const DatasetSchema& s) {
  return {{"features", s.feature_names}, {"label", s.label_column}, {"id", s.id_column},
          {"min", vector_to_json(s.min)}, {"max", vector_to_json(s.max)},
          {"mean", vector_to_json(s.mean)}};
}

DatasetSchema schema_from_json(const json& doc) {
  DatasetSchema s;
  s.feature_names = doc.at("features").get<std::vector<std::string>>();
  s.label_column = doc.value("label", "");
  s.id_column = doc.value("id", "");
  s.min = vector_from_json(doc.at("min"));
  s.max = vector_from_json(doc.at("max"));
  s.mean = vector_from_json(doc.at("mean"));
  const auto p = static_cast<Index>(s.feature_names.size());
  if (s.min.size() != p || s.max.size() != p || s.mean.size() != p) {
    throw ConfigError("schema: statistics do not match the feature list");
  }
  return s;
}

json to_json(const ModelBundle& b) {
  json direct = json::array();
  const auto names = b.direct_names();
  for (Index i = 0; i < b.base_spec.size(); ++i) {
    direct.push_back({{"feature", names[static_cast<size_t>(i)]},
                      {"cost_up", b.base_spec.cost_up[i]},
                      {"cost_down", b.base_spec.cost_down[i]},
                      {"lower", b.base_spec.raw_lower[i]},
                      {"upper", b.base_spec.raw_upper[i]},
                      {"policy", to_string(b.base_spec.policy_for(i))}});
  }
  json doc;
  doc["format"] = "invclass-model-bundle";
  doc["version"] = 1;
  doc["schema"] = to_json(b.schema);
  doc["partition"] = {{"direct", names},
                      {"indirect", names_of(b.schema.feature_names, b.partition.indirect)},
                      {"unchangeable", names_of(b.schema.feature_names, b.partition.unchangeable)}};
  doc["direct"] = direct;
  doc["policy"] = to_string(b.base_spec.bound_policy);
  doc["classifier"] = classifier_to_json(*b.classifier);
  doc["indirect"] = b.indirect ? to_json(*b.indirect) : json(nullptr);
  json step = "auto";
  if (b.optimizer_config.step_rule == StepRule::kFixed) step = b.optimizer_config.fixed_step;
  if (b.optimizer_config.step_rule == StepRule::kLipschitz) step = "lipschitz";
  doc["optimizer"] = {{"method", to_string(b.optimizer)},
                      {"max_iter", b.optimizer_config.max_iterations},
                      {"tol", b.optimizer_config.tolerance},
                      {"step", step}};
  doc["support"] = {{"k", b.support_k}, {"training", matrix_to_json(b.training)}};
  return doc;
}

ModelBundle bundle_from_json(const json& doc) {
  try {
    if (doc.value("format", "") != "invclass-model-bundle") {
      throw ConfigError("not a model bundle document");
    }
    if (doc.value("version", 0) != 1) throw ConfigError("unsupported bundle version");
    ModelBundle b;
    b.schema = schema_from_json(doc.at("schema"));
    const json& part = doc.at("partition");
    const auto& names = b.schema.feature_names;
    b.partition.direct = indices_of(names, part.at("direct").get<std::vector<std::string>>());
    b.partition.indirect = indices_of(names, part.at("indirect").get<std::vector<std::string>>());
    b.partition.unchangeable =
        indices_of(names, part.at("unchangeable").get<std::vector<std::string>>());
    b.partition.validate(b.schema.width());

    const json& direct = doc.at("direct");
    const auto d = static_cast<Index>(direct.size());
    if (d != static_cast<Index>(b.partition.direct.size())) {
      throw ConfigError("bundle: direct cost table does not match the partition");
    }
    auto& spec = b.base_spec;
    spec.cost_up.resize(d);
    spec.cost_down.resize(d);
    spec.raw_lower.resize(d);
    spec.raw_upper.resize(d);
    spec.bound_policy = parse_bound_policy(doc.value("policy", "hardline"));
    bool mixed = false;
    std::vector<BoundPolicy> per_feature;
    for (Index i = 0; i < d; ++i) {
      const json& row = direct[static_cast<size_t>(i)];
      spec.cost_up[i] = row.at("cost_up").get<double>();
      spec.cost_down[i] = row.at("cost_down").get<double>();
      spec.raw_lower[i] = row.at("lower").get<double>();
      spec.raw_upper[i] = row.at("upper").get<double>();
      per_feature.push_back(parse_bound_policy(row.value("policy", to_string(spec.bound_policy))));
      mixed = mixed || per_feature.back() != spec.bound_policy;
    }
    if (mixed) spec.feature_policy = per_feature;
    spec.validate();

    b.classifier = classifier_from_json(doc.at("classifier"));
    if (b.classifier->dimension() != b.schema.width()) {
      throw ConfigError("bundle: classifier width does not match the schema");
    }
    if (!doc.at("indirect").is_null()) {
      b.indirect = std::make_shared<const IndirectModel>(indirect_from_json(doc.at("indirect")));
    }
    const json& opt = doc.at("optimizer");
    b.optimizer = parse_optimizer_kind(opt.value("method", "pgd"));
    b.optimizer_config.max_iterations = opt.value("max_iter", 1000);
    b.optimizer_config.tolerance = opt.value("tol", 1e-6);
    if (const auto step = opt.find("step"); step != opt.end()) {
      if (step->is_number()) {
        b.optimizer_config.step_rule = StepRule::kFixed;
        b.optimizer_config.fixed_step = step->get<double>();
      } else if (step->get<std::string>() == "lipschitz") {
        b.optimizer_config.step_rule = StepRule::kLipschitz;
      }
    }
    b.support_k = doc.at("support").value("k", 10);
    b.training = matrix_from_json(doc.at("support").at("training"), b.schema.width());
    b.index_support();
    return b;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bundle: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("bundle: ") + e.what());
  }
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << to_json(bundle).dump() << '\n';
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open bundle '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("bundle '" + path + "': " + e.what());
  }
  return bundle_from_json(doc);
}

// ---------------------------------------------------------------------------
// Frequency tables

std::vector<FrequencyRow> frequency_table(const std::vector<RecommendationReport>& reports,
                                          double budget) {
  constexpr double kChanged = 1e-6;
  std::vector<const RecommendationReport*> selected;
  for (const auto& r : reports) {
    if (std::abs(r.budget - budget) <= 1e-9) selected.push_back(&r);
  }
  std::vector<std::string> order;
  for (const auto* r : selected) {
    for (const auto& c : r->changes) {
      if (std::find(order.begin(), order.end(), c.feature) == order.end()) order.push_back(c.feature);
    }
  }

  std::vector<FrequencyRow> table;
  for (const auto& feature : order) {
    bool up = false;
    bool down = false;
    long count = 0;
    for (const auto* r : selected) {
      for (const auto& c : r->changes) {
        if (c.feature != feature || std::abs(c.delta) <= kChanged) continue;
        ++count;
        (c.delta > 0 ? up : down) = true;
      }
    }
    if (count == 0) continue;
    long eligible = 0;
    for (const auto* r : selected) {
      for (const auto& c : r->changes) {
        if (c.feature != feature) continue;
        if ((up && c.effective_upper > kChanged) || (down && c.effective_lower < -kChanged)) {
          ++eligible;
        }
      }
    }
    table.push_back({feature, count, eligible,
                     eligible > 0 ? static_cast<double>(count) / static_cast<double>(eligible) : 0.0});
  }
  std::stable_sort(table.begin(), table.end(),
                   [](const FrequencyRow& a, const FrequencyRow& b) { return a.count > b.count; });
  return table;
}

}  // namespace invclass
