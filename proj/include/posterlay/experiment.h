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
// Evaluation harness comparing retrieval baselines and retrieval-augmented
// generation on test pairs.
//
// Automatic arms:      random3_avg, random3_gen_wo_paper, retrieved_top3_avg,
//                      retrieved_gen_wo_paper, retrieved_gen_w_paper
// Semi-automatic arms: maxiou_top3_avg, maxiou_gen_w_paper, reranked_top3_avg,
//                      reranked_gen_wo_paper, reranked_gen_w_paper
// "*_avg" arms score each of the k exemplars against the gold layout and
// average; "*_gen_*" arms score the selected generated candidate.
#ifndef POSTERLAY_EXPERIMENT_H_
#define POSTERLAY_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posterlay/dataset.h"
#include "posterlay/generator.h"
#include "posterlay/metrics.h"
#include "posterlay/provider.h"
#include "posterlay/retriever.h"

namespace posterlay {

enum class Setting { kAutomatic, kSemiAutomatic };

std::optional<Setting> ParseSetting(std::string_view name);
const std::vector<std::string>& ArmsFor(Setting setting);
// Human-readable row label for an arm.
std::string ArmLabel(std::string_view arm);

// The constraints derived from a gold layout: its two largest elements.
Layout ConstraintsFromGold(const Layout& gold);

struct ExperimentConfig {
  Setting setting = Setting::kAutomatic;
  std::vector<std::string> arms;  // empty: every arm of the setting
  int k = 3;
  int maxiou_candidates = 15;
  int n_candidates = 3;
  std::uint64_t seed = 0;
  int max_in_flight = 4;
  SelectionWeights weights;
};

using QueryEmbedder = std::function<Embedding(const PairRecord&)>;

struct ExperimentContext {
  const RetrievalIndex* index = nullptr;
  QueryEmbedder embed_query;             // needed by retrieved/reranked arms
  const LlmProvider* provider = nullptr;  // needed by generation arms
};

struct PairOutcome {
  std::string pair_id;
  std::string arm;
  std::vector<std::string> exemplar_ids;
  std::optional<MetricsReport> report;
  std::optional<bool> constraints_satisfied;  // semi-automatic generation
  std::optional<std::string> error;
};

struct ArmAggregate {
  std::string arm;
  std::string label;
  int pairs = 0;
  double miou = 0.0;
  double ltsim = 0.0;
  double tc_mean = 0.0;
  double tc_std = 0.0;
};

struct ExperimentResult {
  std::vector<PairOutcome> outcomes;  // pair order, then arm order
  std::vector<ArmAggregate> aggregates;
  int total_pairs = 0;
  int failed_pairs = 0;
};

// Uses records that carry a gold layout. A pair fails when any of its arms
// errors; the run throws Error{kProviderError} when more than half of the
// pairs fail. Results do not depend on max_in_flight.
ExperimentResult RunExperiment(std::span<const PairRecord> records,
                               const ExperimentContext& context,
                               const ExperimentConfig& config);

std::string OutcomesJsonl(const ExperimentResult& result);
std::string AggregatesCsv(const ExperimentResult& result);

}  // namespace posterlay

#endif  // POSTERLAY_EXPERIMENT_H_
