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

#include "invclass/service.hpp"

#include <httplib.h>

#include <cmath>
#include <limits>

namespace invclass {

using nlohmann::json;

namespace {

// Raised while decoding a request; becomes a 400.
struct BadRequest {
  std::string field;
  std::string message;
};

ServiceResponse reply(int status, const json& body) { return {status, body.dump()}; }

ServiceResponse bad_request(const BadRequest& e) {
  return reply(400, {{"error", e.message}, {"field", e.field}});
}

double number_field(const json& node, const std::string& field) {
  if (!node.is_number()) throw BadRequest{field, "must be a number"};
  const double v = node.get<double>();
  if (!std::isfinite(v)) throw BadRequest{field, "must be finite"};
  return v;
}

struct Request {
  VectorXd instance;  // normalized
  CostBudgetSpec<double> spec;
  OptimizerKind optimizer;
  std::string id;
};

Request decode(const ModelBundle& b, const json& req, bool need_budget) {
  if (!req.is_object()) throw BadRequest{"", "request body must be a JSON object"};
  const auto& names = b.schema.feature_names;
  const auto p = static_cast<Index>(names.size());

  const auto inst = req.find("instance");
  if (inst == req.end()) throw BadRequest{"instance", "is required"};
  VectorXd raw = VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  if (inst->is_array()) {
    if (static_cast<Index>(inst->size()) != p) {
      throw BadRequest{"instance", "array must have " + std::to_string(p) + " entries"};
    }
    for (Index j = 0; j < p; ++j) {
      const json& v = (*inst)[static_cast<size_t>(j)];
      if (!v.is_null()) raw[j] = number_field(v, "instance[" + std::to_string(j) + "]");
    }
  } else if (inst->is_object()) {
    for (const auto& [name, v] : inst->items()) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw BadRequest{"instance." + name, "unknown feature"};
      if (!v.is_null()) raw[it - names.begin()] = number_field(v, "instance." + name);
    }
  } else {
    throw BadRequest{"instance", "must be an object or an array"};
  }

  Request r;
  r.instance = b.schema.normalize(raw);
  r.spec = b.base_spec;
  r.optimizer = b.optimizer;
  r.id = "request";

  if (need_budget) {
    const auto budget = req.find("budget");
    if (budget == req.end()) throw BadRequest{"budget", "is required"};
    r.spec.budget = number_field(*budget, "budget");
    if (r.spec.budget < 0) throw BadRequest{"budget", "must be >= 0"};
  }
  if (const auto it = req.find("id"); it != req.end()) {
    if (!it->is_string()) throw BadRequest{"id", "must be a string"};
    r.id = it->get<std::string>();
  }
  if (const auto it = req.find("optimizer"); it != req.end()) {
    try {
      r.optimizer = parse_optimizer_kind(it->get<std::string>());
    } catch (const std::exception&) {
      throw BadRequest{"optimizer", "must be \"pgd\" or \"sensitivity\""};
    }
  }
  if (const auto it = req.find("policy"); it != req.end()) {
    try {
      r.spec.bound_policy = parse_bound_policy(it->get<std::string>());
      r.spec.feature_policy.clear();
    } catch (const std::exception&) {
      throw BadRequest{"policy", "must be \"hardline\" or \"elastic\""};
    }
  }
  if (const auto it = req.find("costs"); it != req.end()) {
    if (!it->is_object()) throw BadRequest{"costs", "must be an object"};
    const auto direct = b.direct_names();
    for (const auto& [name, cost] : it->items()) {
      const auto pos = std::find(direct.begin(), direct.end(), name);
      if (pos == direct.end()) throw BadRequest{"costs." + name, "not a directly changeable feature"};
      if (!cost.is_object()) throw BadRequest{"costs." + name, "must be {\"up\", \"down\"}"};
      const auto i = pos - direct.begin();
      for (const char* side : {"up", "down"}) {
        const auto s = cost.find(side);
        if (s == cost.end()) continue;
        const std::string field = "costs." + name + "." + side;
        const double c = number_field(*s, field);
        if (c < 0) throw BadRequest{field, "must be >= 0"};
        (side[0] == 'u' ? r.spec.cost_up : r.spec.cost_down)[i] = c;
      }
    }
  }
  return r;
}

json trace_tail(const OptimizationTrace& trace, size_t n = 5) {
  json lines = trace_to_json_lines(trace);
  if (lines.size() > n) lines.erase(lines.begin(), lines.end() - static_cast<std::ptrdiff_t>(n));
  return lines;
}

}  // namespace

RecommendationService::RecommendationService(ModelBundle bundle) : bundle_(std::move(bundle)) {
  if (!bundle_.classifier) throw ConfigError("service: bundle has no classifier");
}

json RecommendationService::schema() const {
  json doc = to_json(bundle_);
  json out;
  out["features"] = bundle_.schema.feature_names;
  out["raw_min"] = doc["schema"]["min"];
  out["raw_max"] = doc["schema"]["max"];
  out["partition"] = doc["partition"];
  out["direct"] = doc["direct"];
  out["policy"] = doc["policy"];
  out["optimizer"] = doc["optimizer"];
  out["classifier"] = bundle_.classifier->kind();
  return out;
}

ServiceResponse RecommendationService::recommend(const json& body) const {
  const Request r = decode(bundle_, body, true);
  OptimizerConfig oc = bundle_.optimizer_config;
  OptimizationTrace trace;
  try {
    const auto report = invclass::recommend(bundle_.context(), r.instance, r.spec, r.optimizer, oc,
                                            r.id, &trace);
    return reply(200, to_json(report));
  } catch (const OptimizationFailure& e) {
    return reply(422, {{"error", e.what()}, {"trace_tail", trace_tail(e.trace())}});
  } catch (const OptimizationError& e) {
    return reply(422, {{"error", e.what()}, {"trace_tail", json::array()}});
  }
}

ServiceResponse RecommendationService::sweep(const json& body) const {
  Request r = decode(bundle_, body, false);
  const auto it = body.find("budgets");
  if (it == body.end() || !it->is_array() || it->empty()) {
    throw BadRequest{"budgets", "must be a nonempty array"};
  }
  std::vector<double> budgets;
  for (size_t k = 0; k < it->size(); ++k) {
    const std::string field = "budgets[" + std::to_string(k) + "]";
    budgets.push_back(number_field((*it)[k], field));
    if (budgets.back() < 0) throw BadRequest{field, "must be >= 0"};
  }
  json reports = json::array();
  for (double budget : budgets) {
    r.spec.budget = budget;
    try {
      reports.push_back(to_json(invclass::recommend(bundle_.context(), r.instance, r.spec,
                                                    r.optimizer, bundle_.optimizer_config, r.id)));
    } catch (const OptimizationFailure& e) {
      return reply(422, {{"error", e.what()}, {"budget", budget}, {"trace_tail", trace_tail(e.trace())}});
    } catch (const OptimizationError& e) {
      return reply(422, {{"error", e.what()}, {"budget", budget}, {"trace_tail", json::array()}});
    }
  }
  return reply(200, {{"reports", reports}});
}

ServiceResponse RecommendationService::handle(const std::string& method, const std::string& path,
                                              const std::string& body) const {
  try {
    if (path == "/health") {
      if (method != "GET") return reply(405, {{"error", "method not allowed"}});
      return reply(200, {{"status", "ok"}});
    }
    if (path == "/schema") {
      if (method != "GET") return reply(405, {{"error", "method not allowed"}});
      return reply(200, schema());
    }
    if (path == "/recommend" || path == "/sweep") {
      if (method != "POST") return reply(405, {{"error", "method not allowed"}});
      json request;
      try {
        request = json::parse(body);
      } catch (const json::parse_error& e) {
        return bad_request({"", std::string("malformed JSON: ") + e.what()});
      }
      return path == "/recommend" ? recommend(request) : sweep(request);
    }
    return reply(404, {{"error", "no such endpoint"}});
  } catch (const BadRequest& e) {
    return bad_request(e);
  } catch (const json::exception& e) {
    return bad_request({"", e.what()});
  } catch (const ArgumentError& e) {
    return bad_request({"", e.what()});
  } catch (const std::exception& e) {
    return reply(500, {{"error", e.what()}});
  }
}

void serve(const RecommendationService& service, const std::string& host, int port) {
  httplib::Server server;
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    const ServiceResponse r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/.*)", route);
  server.Post(R"(/.*)", route);
  if (!server.bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  server.listen_after_bind();
}

}  // namespace invclass
