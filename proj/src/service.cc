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
#include "posterlay/service.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "httplib.h"
#include "posterlay/json_io.h"
#include "posterlay/metrics.h"
#include "posterlay/report.h"

namespace posterlay {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void ConfigFail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

void BadRequest(const std::string& message) {
  throw Error(ErrorCode::kInvalidArgument, message);
}

int IntField(const json& request, const char* key, int fallback, int min_value) {
  if (!request.contains(key)) return fallback;
  const json& v = request.at(key);
  if (!v.is_number_integer()) BadRequest(std::string(key) + " must be an integer");
  const long long value = v.get<long long>();
  if (value < min_value || value > 1000000) {
    BadRequest(std::string(key) + " out of range");
  }
  return static_cast<int>(value);
}

std::optional<PaperStructure> OptionalPaper(const json& request) {
  if (!request.contains("paper") || request.at("paper").is_null()) return std::nullopt;
  return PaperFromJson(request.at("paper"));
}

std::pair<int, int> CanvasField(const json& request, std::pair<int, int> fallback) {
  if (!request.contains("canvas")) return fallback;
  const json& c = request.at("canvas");
  if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() ||
      !c[1].is_number_integer() || c[0].get<long long>() <= 0 ||
      c[1].get<long long>() <= 0 || c[0].get<long long>() > 1000000 ||
      c[1].get<long long>() > 1000000) {
    BadRequest("canvas must be [width, height] in positive pixels");
  }
  return {c[0].get<int>(), c[1].get<int>()};
}

ordered_json LayoutJson(const Layout& layout) {
  ordered_json j;
  j["canvas"] = {layout.canvas_w, layout.canvas_h};
  ordered_json elements = ordered_json::array();
  for (const Element& e : layout.elements) {
    ordered_json el;
    el["category"] = std::string(CategoryName(e.category));
    el["bbox"] = {e.bbox.x, e.bbox.y, e.bbox.w, e.bbox.h};
    elements.push_back(std::move(el));
  }
  j["elements"] = std::move(elements);
  return j;
}

ordered_json ScoredJson(const std::vector<ScoredId>& scored, const RetrievalIndex& index) {
  ordered_json out = ordered_json::array();
  for (const ScoredId& s : scored) {
    ordered_json item;
    item["id"] = s.id;
    item["score"] = s.score;
    item["layout"] = LayoutJson(index.Find(s.id)->layout);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<std::string> Ids(const std::vector<ScoredId>& scored) {
  std::vector<std::string> ids;
  for (const ScoredId& s : scored) ids.push_back(s.id);
  return ids;
}

std::vector<std::string> SplitComma(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ServiceConfig ServiceConfigFromJson(const json& j) {
  if (!j.is_object()) ConfigFail("service config must be an object");
  static const std::set<std::string> kKeys = {
      "host", "port", "index", "params", "provider", "default_provider",
      "cors_origins", "max_in_flight", "k", "rerank_pool", "n_candidates", "weights"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKeys.count(it.key())) ConfigFail("unknown service config key '" + it.key() + "'");
  }
  ServiceConfig c;
  try {
    if (j.contains("host")) c.host = j.at("host").get<std::string>();
    if (j.contains("port")) c.port = j.at("port").get<int>();
    if (j.contains("index")) c.index_path = j.at("index").get<std::string>();
    if (j.contains("params")) c.params_path = j.at("params").get<std::string>();
    if (j.contains("provider")) c.provider = ProviderConfigFromJson(j.at("provider"));
    if (j.contains("default_provider")) {
      c.default_provider = j.at("default_provider").get<std::string>();
    }
    if (j.contains("cors_origins")) {
      c.cors_origins = j.at("cors_origins").get<std::vector<std::string>>();
    }
    if (j.contains("max_in_flight")) c.max_in_flight = j.at("max_in_flight").get<int>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("rerank_pool")) c.rerank_pool = j.at("rerank_pool").get<int>();
    if (j.contains("n_candidates")) c.n_candidates = j.at("n_candidates").get<int>();
    if (j.contains("weights")) {
      const json& w = j.at("weights");
      for (auto it = w.begin(); it != w.end(); ++it) {
        if (it.key() != "overlap" && it.key() != "alignment") {
          ConfigFail("unknown weights key '" + it.key() + "'");
        }
      }
      c.weights.overlap = w.value("overlap", c.weights.overlap);
      c.weights.alignment = w.value("alignment", c.weights.alignment);
    }
  } catch (const json::exception& e) {
    ConfigFail(e.what());
  }
  if (c.port < 0 || c.port > 65535) ConfigFail("port out of range");
  if (c.default_provider != "mock" && c.default_provider != "live") {
    ConfigFail("default_provider must be 'mock' or 'live'");
  }
  if (c.max_in_flight < 1 || c.k < 1 || c.rerank_pool < 1 || c.n_candidates < 1) {
    ConfigFail("max_in_flight, k, rerank_pool and n_candidates must be >= 1");
  }
  return c;
}

void ApplyEnvOverrides(ServiceConfig& config, const EnvLookup& env) {
  const auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = env(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("POSTERLAY_HOST")) config.host = *v;
  if (auto v = get("POSTERLAY_PORT")) {
    try {
      std::size_t used = 0;
      const int port = std::stoi(*v, &used);
      if (used != v->size() || port < 0 || port > 65535) throw std::out_of_range("port");
      config.port = port;
    } catch (const std::exception&) {
      ConfigFail("POSTERLAY_PORT is not a port number: '" + *v + "'");
    }
  }
  if (auto v = get("POSTERLAY_INDEX")) config.index_path = *v;
  if (auto v = get("POSTERLAY_PARAMS")) config.params_path = *v;
  if (auto v = get("POSTERLAY_PROVIDER")) {
    if (*v != "mock" && *v != "live") ConfigFail("POSTERLAY_PROVIDER must be mock or live");
    config.default_provider = *v;
  }
  if (auto v = get("POSTERLAY_CORS_ORIGINS")) config.cors_origins = SplitComma(*v);
  if (auto v = get("POSTERLAY_LLM_ENDPOINT")) config.provider.endpoint = *v;
  if (auto v = get("POSTERLAY_LLM_MODEL")) config.provider.model = *v;
}

Pipeline::Pipeline(RetrievalIndex index, EncoderParams params, ServiceConfig config)
    : index_(std::move(index)), params_(std::move(params)), config_(std::move(config)) {
  if (index_.empty()) throw Error(ErrorCode::kEmptyIndex, "service index is empty");
  live_ = std::make_unique<HttpProvider>(config_.provider);
  throttled_live_ = std::make_unique<ThrottledProvider>(*live_, config_.max_in_flight);
}

std::shared_ptr<const Pipeline> Pipeline::Load(const ServiceConfig& config) {
  if (config.index_path.empty() || config.params_path.empty()) {
    ConfigFail("service needs both an index path and a params path");
  }
  return std::make_shared<const Pipeline>(LoadIndex(config.index_path),
                                          LoadParams(config.params_path), config);
}

const LlmProvider& Pipeline::ProviderFor(const json& request) const {
  std::string name = config_.default_provider;
  if (request.contains("provider")) {
    if (!request.at("provider").is_string()) BadRequest("provider must be a string");
    name = request.at("provider").get<std::string>();
  }
  if (name == "mock") return mock_;
  if (name == "live") return *throttled_live_;
  BadRequest("provider must be 'mock' or 'live'");
  return mock_;
}

ordered_json Pipeline::Retrieve(const json& request) const {
  if (!request.is_object()) BadRequest("request must be an object");
  const int k = IntField(request, "k", config_.k, 1);
  const int pool = std::max(k, IntField(request, "rerank_pool", config_.rerank_pool, 1));
  std::optional<Embedding> query;
  if (request.contains("embedding")) {
    const json& e = request.at("embedding");
    if (!e.is_array() || e.empty()) BadRequest("embedding must be a non-empty array");
    query = Embedding(static_cast<Eigen::Index>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!e[i].is_number()) BadRequest("embedding entries must be numbers");
      (*query)(static_cast<Eigen::Index>(i)) = e[i].get<double>();
    }
  } else if (const auto paper = OptionalPaper(request)) {
    query = EncodePaper(params_, *paper);
  }
  std::optional<Layout> constraints;
  if (request.contains("constraints")) constraints = LayoutFromJson(request.at("constraints"));
  if (!query && !constraints) BadRequest("need paper, embedding or constraints");

  ordered_json out;
  std::vector<ScoredId> results;
  if (constraints && query) {
    out["mode"] = "reranked";
    const std::vector<std::string> ids = Ids(TopKByMaxIou(index_, *constraints, pool));
    results = Rerank(ids, *query, index_, k);
  } else if (constraints) {
    out["mode"] = "max_iou";
    results = TopKByMaxIou(index_, *constraints, k);
  } else {
    out["mode"] = "cosine";
    results = TopKByCosine(index_, *query, k);
  }
  out["results"] = ScoredJson(results, index_);
  return out;
}

ordered_json Pipeline::RunGeneration(const GenerationRequest& request,
                             const std::vector<ScoredId>& retrieved,
                             const LlmProvider& provider) const {
  const GenerationResult result = posterlay::Generate(request, provider, config_.weights);
  std::vector<Layout> refs;
  for (const Exemplar& ex : request.exemplars) refs.push_back(NormalizeCategories(ex.layout));
  const std::size_t chosen = SelectTop1(result.candidates, refs, config_.weights);

  ordered_json out;
  out["provider"] = provider.name();
  out["chosen_index"] = chosen;
  ordered_json candidates = ordered_json::array();
  for (const Candidate& c : result.candidates) {
    ordered_json item;
    item["sample_index"] = c.sample_index;
    item["layout"] = LayoutJson(c.layout);
    item["scores"] = {{"overlap", c.scores.overlap},
                      {"alignment", c.scores.alignment},
                      {"max_iou", c.scores.max_iou},
                      {"combined", c.scores.combined}};
    item["warnings"] = c.warnings;
    candidates.push_back(std::move(item));
  }
  out["candidates"] = std::move(candidates);
  ordered_json failures = ordered_json::array();
  for (const CandidateFailure& f : result.failures) {
    failures.push_back({{"sample_index", f.sample_index}, {"reason", f.reason}});
  }
  out["failures"] = std::move(failures);
  out["retrieved"] = ScoredJson(retrieved, index_);
  out["prompt"] = result.prompt;
  return out;
}

ordered_json Pipeline::Complete(const json& request) const {
  if (!request.is_object()) BadRequest("request must be an object");
  const auto [cw, ch] = CanvasField(request, {0, 0});
  if (cw == 0) BadRequest("canvas is required");
  if (!request.contains("constraints") || !request.at("constraints").is_array() ||
      request.at("constraints").empty()) {
    throw Error(ErrorCode::kMissingConstraints, "constraints must be a non-empty element list");
  }
  const Layout constraints =
      LayoutFromJson(json{{"canvas", {cw, ch}}, {"elements", request.at("constraints")}});
  const std::optional<PaperStructure> paper = OptionalPaper(request);
  const int k = IntField(request, "k", config_.k, 1);
  const int n = IntField(request, "n_candidates", config_.n_candidates, 1);
  const LlmProvider& provider = ProviderFor(request);

  std::vector<ScoredId> retrieved;
  if (paper) {
    const int pool = std::max(k, config_.rerank_pool);
    retrieved = Rerank(Ids(TopKByMaxIou(index_, constraints, pool)),
                       EncodePaper(params_, *paper), index_, k);
  } else {
    retrieved = TopKByMaxIou(index_, constraints, k);
  }

  GenerationRequest gen;
  gen.mode = GenerationMode::kSemiAutomatic;
  gen.canvas_w = cw;
  gen.canvas_h = ch;
  gen.constraints = constraints;
  gen.target_paper = paper;
  gen.n_candidates = n;
  for (const ScoredId& s : retrieved) {
    const IndexEntry* e = index_.Find(s.id);
    gen.exemplars.push_back({e->id, e->layout, paper ? std::optional(e->paper) : std::nullopt});
  }
  return RunGeneration(gen, retrieved, provider);
}

ordered_json Pipeline::Generate(const json& request) const {
  if (!request.is_object()) BadRequest("request must be an object");
  const std::optional<PaperStructure> paper = OptionalPaper(request);
  if (!paper) BadRequest("paper is required");
  const auto [cw, ch] = CanvasField(request, {5120, 2560});
  const int k = IntField(request, "k", config_.k, 1);
  const int n = IntField(request, "n_candidates", config_.n_candidates, 1);
  bool use_paper = true;
  if (request.contains("use_paper")) {
    if (!request.at("use_paper").is_boolean()) BadRequest("use_paper must be a boolean");
    use_paper = request.at("use_paper").get<bool>();
  }
  const LlmProvider& provider = ProviderFor(request);
  const std::vector<ScoredId> retrieved =
      TopKByCosine(index_, EncodePaper(params_, *paper), k);

  GenerationRequest gen;
  gen.canvas_w = cw;
  gen.canvas_h = ch;
  gen.n_candidates = n;
  if (use_paper) gen.target_paper = paper;
  for (const ScoredId& s : retrieved) {
    const IndexEntry* e = index_.Find(s.id);
    gen.exemplars.push_back({e->id, e->layout, use_paper ? std::optional(e->paper) : std::nullopt});
  }
  return RunGeneration(gen, retrieved, provider);
}

ordered_json Pipeline::GetLayout(const std::string& id) const {
  const IndexEntry* e = index_.Find(id);
  if (e == nullptr) throw Error(ErrorCode::kNotFound, "no layout with id '" + id + "'");
  ordered_json out;
  out["id"] = e->id;
  out["layout"] = LayoutJson(e->layout);
  out["paper"] = json(e->paper);
  return out;
}

ordered_json Pipeline::EvaluateRequest(const json& request) {
  if (!request.is_object() || !request.contains("pred") || !request.contains("gold")) {
    BadRequest("need pred and gold layouts");
  }
  const Layout pred = LayoutFromJson(request.at("pred"));
  const Layout gold = LayoutFromJson(request.at("gold"));
  std::vector<Layout> refs;
  if (request.contains("references")) {
    if (!request.at("references").is_array()) BadRequest("references must be an array");
    for (const json& r : request.at("references")) refs.push_back(LayoutFromJson(r));
  }
  return ReportToJson(Evaluate(pred, gold, refs));
}

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kProviderError:
    case ErrorCode::kAllCandidatesUnparseable:
      return 502;
    default:
      return 400;
  }
}

ordered_json ErrorBody(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

Service::Service(std::shared_ptr<const Pipeline> pipeline, ServiceConfig config)
    : pipeline_(std::move(pipeline)),
      config_(std::move(config)),
      server_(std::make_unique<httplib::Server>()) {
  Route();
}

Service::~Service() { Stop(); }

void Service::Route() {
  using Handler = std::function<ordered_json(const httplib::Request&)>;
  const auto wrap = [](Handler fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
      ordered_json body;
      try {
        body = fn(req);
        res.status = 200;
      } catch (const Error& e) {
        res.status = HttpStatusFor(e.code());
        body = ErrorBody(ErrorCodeName(e.code()), e.what());
      } catch (const json::exception& e) {
        res.status = 400;
        body = ErrorBody(ErrorCodeName(ErrorCode::kInvalidArgument), e.what());
      } catch (const std::exception& e) {
        res.status = 500;
        body = ErrorBody("Internal", e.what());
      }
      res.set_content(body.dump(), "application/json");
    };
  };
  const auto parse = [](const httplib::Request& req) {
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) BadRequest("request body is not valid JSON");
    return j;
  };
  const Pipeline& p = *pipeline_;

  server_->Get("/health", wrap([](const httplib::Request&) { return ordered_json{{"status", "ok"}}; }));
  server_->Get(R"(/layouts/([^/]+))", wrap([&p](const httplib::Request& req) {
                 return p.GetLayout(req.matches[1].str());
               }));
  server_->Post("/retrieve", wrap([&p, parse](const httplib::Request& req) {
                  return p.Retrieve(parse(req));
                }));
  server_->Post("/complete", wrap([&p, parse](const httplib::Request& req) {
                  return p.Complete(parse(req));
                }));
  server_->Post("/generate", wrap([&p, parse](const httplib::Request& req) {
                  return p.Generate(parse(req));
                }));
  server_->Post("/evaluate", wrap([parse](const httplib::Request& req) {
                  return Pipeline::EvaluateRequest(parse(req));
                }));
  server_->Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });
  server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "NotFound" : "HttpError";
    res.set_content(ErrorBody(code, req.method + " " + req.path).dump(), "application/json");
  });
  const std::vector<std::string> origins = config_.cors_origins;
  server_->set_post_routing_handler(
      [origins](const httplib::Request& req, httplib::Response& res) {
        const std::string origin = req.get_header_value("Origin");
        if (origin.empty()) return;
        const bool any = std::find(origins.begin(), origins.end(), "*") != origins.end();
        if (any || std::find(origins.begin(), origins.end(), origin) != origins.end()) {
          res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
          res.set_header("Vary", "Origin");
        }
      });
}

int Service::Bind() {
  int port = config_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(config_.host);
  } else if (!server_->bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port <= 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + config_.host + ":" +
                                         std::to_string(config_.port));
  }
  return port;
}

void Service::Listen() { server_->listen_after_bind(); }

void Service::Stop() {
  if (server_) server_->stop();
}

void Service::WaitUntilReady() { server_->wait_until_ready(); }

}  // namespace posterlay
