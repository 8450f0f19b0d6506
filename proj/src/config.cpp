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

#include "invclass/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace invclass {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<T>();
}

std::vector<double> number_list(const json& node, const char* what) {
  if (node.is_number()) return {node.get<double>()};
  if (!node.is_array()) throw ConfigError(std::string(what) + " must be a number or an array");
  return node.get<std::vector<double>>();
}

std::vector<double> budget_range(double start, double stop, double step) {
  if (!(step > 0)) throw ConfigError("budgets: step must be > 0");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double b = start + static_cast<double>(k) * step;
    if (b > stop + 1e-9 * std::max(1.0, std::abs(stop))) break;
    out.push_back(b);
  }
  return out;
}

}  // namespace

std::vector<double> parse_budget_list(const std::string& text) {
  try {
    if (text.find(':') != std::string::npos) {
      std::stringstream ss(text);
      std::string a, b, c;
      std::getline(ss, a, ':');
      std::getline(ss, b, ':');
      std::getline(ss, c, ':');
      return budget_range(std::stod(a), std::stod(b), c.empty() ? 1.0 : std::stod(c));
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(std::stod(item));
    }
    if (out.empty()) throw ConfigError("empty budget list");
    return out;
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse budget list '" + text + "'");
  }
}

void ExperimentConfig::validate() const {
  if (budgets.empty()) throw ConfigError("budget grid is empty");
  for (size_t k = 0; k < budgets.size(); ++k) {
    if (!(budgets[k] >= 0)) throw ConfigError("budgets must be nonnegative");
    if (k > 0 && !(budgets[k] > budgets[k - 1])) {
      throw ConfigError("budgets must be strictly increasing");
    }
  }
  if (direct.empty()) throw ConfigError("partition.direct is empty");
  std::set<std::string> seen;
  for (const auto* list : {&direct, &indirect, &unchangeable}) {
    for (const auto& name : *list) {
      if (!seen.insert(name).second) {
        throw ConfigError("feature '" + name + "' appears in more than one partition set");
      }
    }
  }
  for (const auto& [name, cost] : costs) {
    if (!(cost.up >= 0) || !(cost.down >= 0)) {
      throw ConfigError("costs for '" + name + "' must be nonnegative");
    }
  }
  for (const auto& [name, b] : bounds) {
    if (!(b.lower <= b.upper)) throw ConfigError("bounds for '" + name + "' are inverted");
  }
  if (support_k < 1) throw ConfigError("support k must be >= 1");
  if (grid.folds < 2) throw ConfigError("model.folds must be >= 2");
  try {
    optimizer_config.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    if (const auto it = doc.find("dataset"); it != doc.end()) {
      const json& ds = *it;
      if (ds.is_string()) {
        c.dataset_path = ds.get<std::string>();
      } else {
        c.dataset_path = get_or<std::string>(ds, "path", "");
        const auto delim = get_or<std::string>(ds, "delimiter", ",");
        if (delim.size() != 1) throw ConfigError("dataset.delimiter must be one character");
        c.delimiter = delim[0];
        c.label_column = get_or<std::string>(ds, "label", "y");
        c.id_column = get_or<std::string>(ds, "id", "");
        c.positive_value = get_or<double>(ds, "positive", 1.0);
      }
      if (!c.dataset_path.empty() && !base_dir.empty() &&
          std::filesystem::path(c.dataset_path).is_relative()) {
        c.dataset_path = (std::filesystem::path(base_dir) / c.dataset_path).string();
      }
    }

    const json& part = doc.at("partition");
    c.direct = get_or<std::vector<std::string>>(part, "direct", {});
    c.indirect = get_or<std::vector<std::string>>(part, "indirect", {});
    c.unchangeable = get_or<std::vector<std::string>>(part, "unchangeable", {});

    if (const auto it = doc.find("costs"); it != doc.end()) {
      for (const auto& [name, node] : it->items()) {
        c.costs[name] = {get_or<double>(node, "up", 0.0), get_or<double>(node, "down", 0.0)};
      }
    }
    if (const auto it = doc.find("bounds"); it != doc.end()) {
      for (const auto& [name, node] : it->items()) {
        c.bounds[name] = {get_or<double>(node, "lower", 0.0), get_or<double>(node, "upper", 1.0)};
      }
    }
    if (const auto it = doc.find("policy"); it != doc.end()) {
      if (it->is_string()) {
        c.policy = parse_bound_policy(it->get<std::string>());
      } else {
        c.policy = parse_bound_policy(get_or<std::string>(*it, "default", "hardline"));
        if (const auto ov = it->find("overrides"); ov != it->end()) {
          for (const auto& [name, node] : ov->items()) {
            c.policy_overrides[name] = parse_bound_policy(node.get<std::string>());
          }
        }
      }
    }
    if (const auto it = doc.find("model"); it != doc.end()) {
      const json& m = *it;
      c.classifier = parse_classifier_kind(get_or<std::string>(m, "type", "svm"));
      if (m.contains("C")) c.grid.box = number_list(m["C"], "model.C");
      if (m.contains("sigma")) c.grid.sigma = number_list(m["sigma"], "model.sigma");
      if (m.contains("ridge")) c.grid.ridge = number_list(m["ridge"], "model.ridge");
      if (m.contains("bandwidth")) c.bandwidth_grid = number_list(m["bandwidth"], "model.bandwidth");
      c.grid.folds = get_or<int>(m, "folds", 5);
    }
    if (const auto it = doc.find("optimizer"); it != doc.end()) {
      const json& o = *it;
      c.optimizer = parse_optimizer_kind(get_or<std::string>(o, "method", "pgd"));
      c.optimizer_config.max_iterations = get_or<int>(o, "max_iter", 1000);
      c.optimizer_config.tolerance = get_or<double>(o, "tol", 1e-6);
      if (const auto step = o.find("step"); step != o.end()) {
        if (step->is_number()) {
          c.optimizer_config.step_rule = StepRule::kFixed;
          c.optimizer_config.fixed_step = step->get<double>();
        } else if (step->get<std::string>() == "lipschitz") {
          c.optimizer_config.step_rule = StepRule::kLipschitz;
        } else if (step->get<std::string>() != "auto") {
          throw ConfigError("optimizer.step must be \"auto\", \"lipschitz\" or a number");
        }
      }
    }
    if (const auto it = doc.find("budgets"); it != doc.end()) {
      if (it->is_array()) {
        c.budgets = it->get<std::vector<double>>();
      } else {
        c.budgets = budget_range(get_or<double>(*it, "start", 0.0), it->at("stop").get<double>(),
                                 get_or<double>(*it, "step", 1.0));
      }
    } else {
      c.budgets = budget_range(0, 20, 1);
    }
    c.seed = get_or<std::uint64_t>(doc, "seed", 1);
    c.swap_roles = get_or<bool>(doc, "swap_roles", false);
    c.support_k = get_or<int>(doc, "support_k", 10);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["dataset"] = {{"path", c.dataset_path},
                    {"delimiter", std::string(1, c.delimiter)},
                    {"label", c.label_column},
                    {"id", c.id_column},
                    {"positive", c.positive_value}};
  doc["partition"] = {{"direct", c.direct}, {"indirect", c.indirect},
                      {"unchangeable", c.unchangeable}};
  json costs = json::object();
  for (const auto& [name, cost] : c.costs) costs[name] = {{"up", cost.up}, {"down", cost.down}};
  doc["costs"] = costs;
  json bounds = json::object();
  for (const auto& [name, b] : c.bounds) bounds[name] = {{"lower", b.lower}, {"upper", b.upper}};
  doc["bounds"] = bounds;
  json overrides = json::object();
  for (const auto& [name, p] : c.policy_overrides) overrides[name] = to_string(p);
  doc["policy"] = {{"default", to_string(c.policy)}, {"overrides", overrides}};
  doc["model"] = {{"type", to_string(c.classifier)}, {"C", c.grid.box},
                  {"sigma", c.grid.sigma}, {"ridge", c.grid.ridge},
                  {"folds", c.grid.folds}, {"bandwidth", c.bandwidth_grid}};
  json step = "auto";
  if (c.optimizer_config.step_rule == StepRule::kFixed) step = c.optimizer_config.fixed_step;
  if (c.optimizer_config.step_rule == StepRule::kLipschitz) step = "lipschitz";
  doc["optimizer"] = {{"method", to_string(c.optimizer)},
                      {"max_iter", c.optimizer_config.max_iterations},
                      {"tol", c.optimizer_config.tolerance},
                      {"step", step}};
  doc["budgets"] = c.budgets;
  doc["seed"] = c.seed;
  doc["swap_roles"] = c.swap_roles;
  doc["support_k"] = c.support_k;
  return doc;
}

ResolvedProblem resolve(const ExperimentConfig& config,
                        const std::vector<std::string>& feature_names) {
  auto index_of = [&](const std::string& name) {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw ConfigError("unknown feature '" + name + "'");
    return static_cast<Index>(it - feature_names.begin());
  };
  ResolvedProblem out;
  std::set<Index> named;
  for (const auto& n : config.direct) named.insert(out.partition.direct.emplace_back(index_of(n)));
  for (const auto& n : config.indirect) named.insert(out.partition.indirect.emplace_back(index_of(n)));
  for (const auto& n : config.unchangeable) {
    named.insert(out.partition.unchangeable.emplace_back(index_of(n)));
  }
  for (Index j = 0; j < static_cast<Index>(feature_names.size()); ++j) {
    if (!named.count(j)) out.partition.unchangeable.push_back(j);
  }
  std::sort(out.partition.unchangeable.begin(), out.partition.unchangeable.end());
  try {
    out.partition.validate(static_cast<Index>(feature_names.size()));
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }

  auto require_direct = [&](const std::string& name, const char* what) {
    if (std::find(config.direct.begin(), config.direct.end(), name) == config.direct.end()) {
      throw ConfigError(std::string(what) + " given for '" + name +
                        "', which is not directly changeable");
    }
  };
  for (const auto& [name, _] : config.costs) require_direct(name, "cost");
  for (const auto& [name, _] : config.bounds) require_direct(name, "bounds");
  for (const auto& [name, _] : config.policy_overrides) require_direct(name, "policy override");
  const auto d = static_cast<Index>(config.direct.size());
  auto& spec = out.spec;
  spec.cost_up.resize(d);
  spec.cost_down.resize(d);
  spec.raw_lower.resize(d);
  spec.raw_upper.resize(d);
  spec.budget = 0;
  spec.bound_policy = config.policy;
  if (!config.policy_overrides.empty()) spec.feature_policy.assign(static_cast<size_t>(d), config.policy);
  for (Index i = 0; i < d; ++i) {
    const auto& name = config.direct[static_cast<size_t>(i)];
    const auto cost = config.costs.count(name) ? config.costs.at(name) : FeatureCost{};
    const auto bounds = config.bounds.count(name) ? config.bounds.at(name) : FeatureBounds{};
    spec.cost_up[i] = cost.up;
    spec.cost_down[i] = cost.down;
    spec.raw_lower[i] = bounds.lower;
    spec.raw_upper[i] = bounds.upper;
    if (const auto it = config.policy_overrides.find(name); it != config.policy_overrides.end()) {
      spec.feature_policy[static_cast<size_t>(i)] = it->second;
    }
  }
  return out;
}

}  // namespace invclass
