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
// LLM completion providers: a deterministic echo mock and an
// OpenAI-compatible chat-completions client with bounded retries.
#ifndef POSTERLAY_PROVIDER_H_
#define POSTERLAY_PROVIDER_H_

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace posterlay {

// Request/response contract. Implementations must be safe to call from
// several threads at once.
class LlmProvider {
 public:
  virtual ~LlmProvider() = default;
  // Returns exactly n completions of `prompt` or throws
  // Error{kProviderError}.
  virtual std::vector<std::string> Complete(const std::string& prompt,
                                            int n) const = 0;
  virtual std::string name() const = 0;
};

// Completion k repeats the Output block of example (k mod E) + 1 of the
// prompt, where E is the number of examples. Prompts without examples
// yield an empty html document.
class EchoMockProvider : public LlmProvider {
 public:
  std::vector<std::string> Complete(const std::string& prompt,
                                    int n) const override;
  std::string name() const override { return "mock"; }
};

// The Output html blocks of the numbered examples of a prompt, in order.
std::vector<std::string> ExtractExampleOutputs(const std::string& prompt);

struct LlmProviderConfig {
  // Full URL of the chat-completions endpoint.
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-5";
  double timeout_seconds = 120.0;
  int retries = 2;
  int backoff_ms = 500;
  std::string api_key_env = "OPENAI_API_KEY";
  // "n": one request with n samples; "calls": n single-sample requests.
  std::string sampling = "calls";
  // Sent only when set.
  std::optional<double> temperature;
};

// Unknown keys or bad values throw Error{kConfigError}.
LlmProviderConfig ProviderConfigFromJson(const nlohmann::json& j);

class HttpProvider : public LlmProvider {
 public:
  explicit HttpProvider(LlmProviderConfig config);

  std::vector<std::string> Complete(const std::string& prompt,
                                    int n) const override;
  std::string name() const override { return "live"; }
  const LlmProviderConfig& config() const { return config_; }

 private:
  // One HTTP exchange with retries; returns the choices' contents.
  std::vector<std::string> Request(const std::string& prompt, int n) const;

  LlmProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// Caps the number of concurrent Complete calls on a shared provider.
class ThrottledProvider : public LlmProvider {
 public:
  // `inner` must outlive this object. max_in_flight >= 1.
  ThrottledProvider(const LlmProvider& inner, int max_in_flight);

  std::vector<std::string> Complete(const std::string& prompt,
                                    int n) const override;
  std::string name() const override { return inner_.name(); }

 private:
  const LlmProvider& inner_;
  const int max_in_flight_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable int in_flight_ = 0;
};

}  // namespace posterlay

#endif  // POSTERLAY_PROVIDER_H_
