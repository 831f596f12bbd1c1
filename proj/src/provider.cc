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
#include "posterlay/provider.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <set>
#include <thread>

#include "httplib.h"
#include "posterlay/error.h"

namespace posterlay {

using nlohmann::json;

namespace {

constexpr char kOutputOpen[] = "Output: \n<html><body>\n";
constexpr char kOutputClose[] = "</html></body>";
constexpr char kTargetMarker[] = "Please generate a layout.";

bool Retryable(int status) { return status == 408 || status == 429 || status >= 500; }

void SetTimeouts(httplib::Client& client, double seconds) {
  const auto sec = static_cast<time_t>(seconds);
  const auto usec = static_cast<time_t>((seconds - static_cast<double>(sec)) * 1e6);
  client.set_connection_timeout(sec, usec);
  client.set_read_timeout(sec, usec);
  client.set_write_timeout(sec, usec);
}

}  // namespace

std::vector<std::string> ExtractExampleOutputs(const std::string& prompt) {
  const std::size_t limit = prompt.find(kTargetMarker);
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = prompt.find(kOutputOpen, pos);
    if (open == std::string::npos || open >= limit) break;
    const std::size_t body = open + std::string_view(kOutputOpen).size();
    const std::size_t close = prompt.find(kOutputClose, body);
    if (close == std::string::npos) break;
    const std::size_t end = close + std::string_view(kOutputClose).size();
    out.push_back(prompt.substr(open + std::string_view("Output: \n").size(),
                                end - open - std::string_view("Output: \n").size()));
    pos = end;
  }
  return out;
}

std::vector<std::string> EchoMockProvider::Complete(const std::string& prompt,
                                                    int n) const {
  const std::vector<std::string> outputs = ExtractExampleOutputs(prompt);
  std::vector<std::string> completions;
  for (int k = 0; k < n; ++k) {
    completions.push_back(outputs.empty()
                              ? std::string("<html><body>\n</html></body>")
                              : outputs[static_cast<std::size_t>(k) % outputs.size()]);
  }
  return completions;
}

LlmProviderConfig ProviderConfigFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, "provider config must be an object");
  static const std::set<std::string> known = {
      "endpoint", "model",    "timeout_seconds", "retries",
      "backoff_ms", "api_key_env", "sampling",   "temperature"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::kConfigError, "unknown provider key '" + key + "'");
    }
  }
  LlmProviderConfig c;
  try {
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.retries = j.value("retries", c.retries);
    c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.sampling = j.value("sampling", c.sampling);
    if (j.contains("temperature") && !j["temperature"].is_null()) {
      c.temperature = j["temperature"].get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  if (!(c.timeout_seconds > 0.0)) throw Error(ErrorCode::kConfigError, "timeout must be > 0");
  if (c.retries < 0 || c.backoff_ms < 0) {
    throw Error(ErrorCode::kConfigError, "retries and backoff must be >= 0");
  }
  if (c.sampling != "n" && c.sampling != "calls") {
    throw Error(ErrorCode::kConfigError, "sampling must be 'n' or 'calls'");
  }
  return c;
}

HttpProvider::HttpProvider(LlmProviderConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw Error(ErrorCode::kConfigError, "bad endpoint '" + config_.endpoint + "'");
  }
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
  if (!(config_.timeout_seconds > 0.0)) {
    throw Error(ErrorCode::kConfigError, "timeout must be > 0");
  }
}

std::vector<std::string> HttpProvider::Request(const std::string& prompt, int n) const {
  json body{{"model", config_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"n", n}};
  if (config_.temperature) body["temperature"] = *config_.temperature;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str());
      key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      const long delay = static_cast<long>(config_.backoff_ms) << (attempt - 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    httplib::Client client(scheme_host_port_);
    SetTimeouts(client, config_.timeout_seconds);
    const httplib::Result res =
        client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (Retryable(res->status)) continue;
      throw Error(ErrorCode::kProviderError, last_error + ": " + res->body.substr(0, 200));
    }
    const json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array()) {
      last_error = "malformed provider response";
      continue;
    }
    std::vector<std::string> contents;
    for (const json& choice : reply["choices"]) {
      const json* content = nullptr;
      if (choice.contains("message") && choice["message"].contains("content")) {
        content = &choice["message"]["content"];
      } else if (choice.contains("text")) {
        content = &choice["text"];
      }
      contents.push_back(content != nullptr && content->is_string()
                             ? content->get<std::string>()
                             : std::string());
    }
    return contents;
  }
  throw Error(ErrorCode::kProviderError,
              last_error + " after " + std::to_string(config_.retries + 1) + " attempts");
}

std::vector<std::string> HttpProvider::Complete(const std::string& prompt, int n) const {
  std::vector<std::string> out;
  if (config_.sampling == "n" && n > 0) {
    out = Request(prompt, n);
    if (out.size() > static_cast<std::size_t>(n)) out.resize(n);
  }
  while (out.size() < static_cast<std::size_t>(n)) {
    std::vector<std::string> one = Request(prompt, 1);
    if (one.empty()) throw Error(ErrorCode::kProviderError, "provider returned no choices");
    out.push_back(std::move(one[0]));
  }
  return out;
}

ThrottledProvider::ThrottledProvider(const LlmProvider& inner, int max_in_flight)
    : inner_(inner), max_in_flight_(max_in_flight) {
  if (max_in_flight < 1) throw Error(ErrorCode::kConfigError, "max_in_flight must be >= 1");
}

std::vector<std::string> ThrottledProvider::Complete(const std::string& prompt,
                                                     int n) const {
  {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [this] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  const auto release = [this] {
    std::lock_guard<std::mutex> lock(mu_);
    --in_flight_;
    cv_.notify_one();
  };
  try {
    std::vector<std::string> out = inner_.Complete(prompt, n);
    release();
    return out;
  } catch (...) {
    release();
    throw;
  }
}

}  // namespace posterlay
