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

// HTTP/JSON front end over an immutable ModelBundle.
//
//   GET  /health     -> {"status": "ok"}
//   GET  /schema     -> features, partition, costs, bounds, policy defaults
//   POST /recommend  {"instance": {...} | [...], "budget": b, "costs": {...},
//                     "policy": "...", "optimizer": "...", "id": "..."}
//   POST /sweep      {"instance": ..., "budgets": [...], <same overrides>}
//
// Instances are given in raw units, either as an object keyed by feature
// name (omitted features are mean-imputed) or as a full array. Malformed
// requests get 400 with {"error", "field"}; optimizer failures get 422 with
// the tail of the trace.

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "invclass/engine.hpp"

namespace invclass {

struct ServiceResponse {
  int status = 200;
  std::string body;  // JSON
};

class RecommendationService {
 public:
  explicit RecommendationService(ModelBundle bundle);

  // Pure function of (method, path, body); safe to call concurrently.
  ServiceResponse handle(const std::string& method, const std::string& path,
                         const std::string& body) const;

  nlohmann::json schema() const;
  const ModelBundle& bundle() const { return bundle_; }

 private:
  ServiceResponse recommend(const nlohmann::json& request) const;
  ServiceResponse sweep(const nlohmann::json& request) const;

  ModelBundle bundle_;
};

// Blocks until the server stops. Throws ConfigError if the address cannot
// be bound.
void serve(const RecommendationService& service, const std::string& host, int port);

}  // namespace invclass
