// Copyright 2026 The Posterlay Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// JSON-over-HTTP front end for retrieval, generation, completion and
// evaluation.
//
//   GET  /health            -> {"status": "ok"}
//   GET  /layouts/{id}      -> {"id", "layout", "paper"}
//   POST /retrieve          {"paper"?, "embedding"?, "constraints"?, "k"?,
//                            "rerank_pool"?} -> {"mode", "results"}
//   POST /complete          {"canvas", "constraints", "paper"?,
//                            "n_candidates"?, "k"?, "provider"?}
//   POST /generate          {"paper", "canvas"?, "use_paper"?,
//                            "n_candidates"?, "k"?, "provider"?}
//   POST /evaluate          {"pred", "gold", "references"?} -> metrics
//
// /complete and /generate answer {"candidates", "failures", "retrieved",
// "chosen_index", "prompt"}. Errors answer
// {"error": {"code", "message"}} with 400, 404 or 502.
#ifndef POSTERLAY_SERVICE_H_
#define POSTERLAY_SERVICE_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "posterlay/error.h"
#include "posterlay/generator.h"
#include "posterlay/provider.h"
#include "posterlay/retriever.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace posterlay {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string index_path;
  std::string params_path;
  LlmProviderConfig provider;
  // "mock" or "live"; requests may override it.
  std::string default_provider = "mock";
  // "*" allows any origin.
  std::vector<std::string> cors_origins = {"http://localhost:5173"};
  int max_in_flight = 4;
  int k = 3;
  int rerank_pool = 15;
  int n_candidates = 3;
  SelectionWeights weights;
};

// Unknown keys or bad values throw Error{kConfigError}.
ServiceConfig ServiceConfigFromJson(const nlohmann::json& j);

using EnvLookup = std::function<const char*(const char*)>;

// POSTERLAY_HOST, POSTERLAY_PORT, POSTERLAY_INDEX, POSTERLAY_PARAMS,
// POSTERLAY_PROVIDER, POSTERLAY_CORS_ORIGINS (comma separated),
// POSTERLAY_LLM_ENDPOINT and POSTERLAY_LLM_MODEL replace config values.
void ApplyEnvOverrides(ServiceConfig& config, const EnvLookup& env);

// Request handling shared by the HTTP service and the CLI. Immutable after
// construction and safe for concurrent use.
class Pipeline {
 public:
  Pipeline(RetrievalIndex index, EncoderParams params, ServiceConfig config);

  // Loads config.index_path and config.params_path.
  static std::shared_ptr<const Pipeline> Load(const ServiceConfig& config);

  nlohmann::ordered_json Retrieve(const nlohmann::json& request) const;
  nlohmann::ordered_json Complete(const nlohmann::json& request) const;
  nlohmann::ordered_json Generate(const nlohmann::json& request) const;
  nlohmann::ordered_json GetLayout(const std::string& id) const;
  static nlohmann::ordered_json EvaluateRequest(const nlohmann::json& request);

  const RetrievalIndex& index() const { return index_; }
  const EncoderParams& params() const { return params_; }
  const ServiceConfig& config() const { return config_; }

 private:
  const LlmProvider& ProviderFor(const nlohmann::json& request) const;
  nlohmann::ordered_json RunGeneration(const GenerationRequest& request,
                               const std::vector<ScoredId>& retrieved,
                               const LlmProvider& provider) const;

  RetrievalIndex index_;
  EncoderParams params_;
  ServiceConfig config_;
  EchoMockProvider mock_;
  std::unique_ptr<HttpProvider> live_;
  std::unique_ptr<ThrottledProvider> throttled_live_;
};

// HTTP status for an error code: 404 for NotFound, 502 for provider
// failures, 400 otherwise.
int HttpStatusFor(ErrorCode code);
nlohmann::ordered_json ErrorBody(std::string_view code, std::string_view message);

class Service {
 public:
  Service(std::shared_ptr<const Pipeline> pipeline, ServiceConfig config);
  ~Service();

  // Binds config.host:config.port, or an ephemeral port when port is 0.
  // Returns the bound port; throws Error{kIoError} on failure.
  int Bind();
  // Blocks until Stop().
  void Listen();
  void Stop();
  void WaitUntilReady();

 private:
  void Route();

  std::shared_ptr<const Pipeline> pipeline_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace posterlay

#endif  // POSTERLAY_SERVICE_H_
