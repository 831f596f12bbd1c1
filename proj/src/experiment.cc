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
#include "posterlay/experiment.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <sstream>
#include <thread>

#include "posterlay/error.h"
#include "posterlay/report.h"

namespace posterlay {

using nlohmann::ordered_json;

namespace {

struct ArmInfo {
  const char* name;
  const char* label;
};

constexpr ArmInfo kArmInfo[] = {
    {"random3_avg", "Random 3 Samples (Avg.)"},
    {"random3_gen_wo_paper", "Random 3 Samples -> w/o Paper Structures"},
    {"retrieved_top3_avg", "Retrieved Top-3 (Avg.)"},
    {"retrieved_gen_wo_paper", "Retrieved Top-3 -> w/o Paper Structures"},
    {"retrieved_gen_w_paper", "Retrieved Top-3 -> w/ Paper Structures"},
    {"maxiou_top3_avg", "Max. IoU Top-3 (Avg.)"},
    {"maxiou_gen_w_paper", "Max. IoU Top-3 -> w/ Paper Structures"},
    {"reranked_top3_avg", "Re-ranked Top-3 (Avg.)"},
    {"reranked_gen_wo_paper", "Re-ranked Top-3 -> w/o Paper Structures"},
    {"reranked_gen_w_paper", "Re-ranked Top-3 -> w/ Paper Structures"},
};

// FNV-1a, stable across platforms, to derive per-pair seeds.
std::uint64_t HashId(std::string_view id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

MetricsReport Mean(const std::vector<MetricsReport>& reports) {
  MetricsReport m;
  const double n = static_cast<double>(reports.size());
  for (const MetricsReport& r : reports) {
    m.miou += r.miou / n;
    m.ltsim += r.ltsim / n;
    m.tc_mean += r.tc_mean / n;
    m.tc_std += r.tc_std / n;
    m.overlap += r.overlap / n;
    m.alignment += r.alignment / n;
  }
  return m;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

class PairRunner {
 public:
  PairRunner(const PairRecord& record, const ExperimentContext& context,
             const ExperimentConfig& config)
      : record_(record),
        gold_(*record.gold_layout),
        context_(context),
        config_(config),
        constraints_(ConstraintsFromGold(gold_)) {}

  PairOutcome Run(const std::string& arm) {
    PairOutcome out;
    out.pair_id = record_.id;
    out.arm = arm;
    try {
      const std::vector<std::string> ids = Exemplars(arm);
      out.exemplar_ids = ids;
      if (arm.ends_with("_avg")) {
        std::vector<MetricsReport> reports;
        for (const std::string& id : ids) {
          reports.push_back(Evaluate(context_.index->Find(id)->layout, gold_));
        }
        if (reports.empty()) throw Error(ErrorCode::kEmptyIndex, "no exemplars retrieved");
        out.report = Mean(reports);
      } else {
        const bool with_paper = arm.ends_with("_w_paper");
        Layout chosen = GenerateLayout(ids, with_paper);
        std::vector<Layout> refs;
        for (const std::string& id : ids) refs.push_back(context_.index->Find(id)->layout);
        out.report = Evaluate(chosen, gold_, refs);
        if (config_.setting == Setting::kSemiAutomatic) {
          out.constraints_satisfied =
              LayoutMatchScore(constraints_, chosen, Normalizer::kLeft).first == 1.0;
        }
      }
    } catch (const Error& e) {
      out.report.reset();
      out.error = e.what();
    }
    return out;
  }

 private:
  std::vector<std::string> Exemplars(const std::string& arm) {
    const RetrievalIndex& index = *context_.index;
    std::vector<std::string> ids;
    if (StartsWith(arm, "random3")) {
      return RandomSamples(index, std::min<int>(config_.k, index.size()),
                           config_.seed ^ HashId(record_.id));
    }
    if (StartsWith(arm, "retrieved")) {
      for (const ScoredId& s : TopKByCosine(index, Query(), config_.k)) ids.push_back(s.id);
      return ids;
    }
    if (StartsWith(arm, "maxiou")) {
      for (const ScoredId& s : TopKByMaxIou(index, constraints_, config_.k)) {
        ids.push_back(s.id);
      }
      return ids;
    }
    std::vector<std::string> pool;
    for (const ScoredId& s : TopKByMaxIou(index, constraints_, config_.maxiou_candidates)) {
      pool.push_back(s.id);
    }
    for (const ScoredId& s : Rerank(pool, Query(), index, config_.k)) ids.push_back(s.id);
    return ids;
  }

  const Embedding& Query() {
    if (!query_) {
      if (!context_.embed_query) {
        throw Error(ErrorCode::kInvalidArgument, "arm needs a query embedder");
      }
      query_ = context_.embed_query(record_);
    }
    return *query_;
  }

  Layout GenerateLayout(const std::vector<std::string>& ids, bool with_paper) {
    if (context_.provider == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "generation arm needs a provider");
    }
    GenerationRequest request;
    request.mode = config_.setting == Setting::kAutomatic
                       ? GenerationMode::kAutomatic
                       : GenerationMode::kSemiAutomatic;
    request.canvas_w = gold_.canvas_w;
    request.canvas_h = gold_.canvas_h;
    request.n_candidates = config_.n_candidates;
    if (with_paper) request.target_paper = record_.paper;
    if (request.mode == GenerationMode::kSemiAutomatic) request.constraints = constraints_;
    for (const std::string& id : ids) {
      const IndexEntry* e = context_.index->Find(id);
      Exemplar ex{e->id, e->layout, std::nullopt};
      if (with_paper) ex.paper = e->paper;
      request.exemplars.push_back(std::move(ex));
    }
    const GenerationResult generated =
        Generate(request, *context_.provider, config_.weights);
    std::vector<Layout> refs;
    for (const Exemplar& ex : request.exemplars) refs.push_back(NormalizeCategories(ex.layout));
    return generated.candidates[SelectTop1(generated.candidates, refs, config_.weights)]
        .layout;
  }

  const PairRecord& record_;
  const Layout& gold_;
  const ExperimentContext& context_;
  const ExperimentConfig& config_;
  const Layout constraints_;
  std::optional<Embedding> query_;
};

ordered_json ReportJson(const std::optional<MetricsReport>& report) {
  if (!report) return nullptr;
  return ReportToJson(*report);
}

}  // namespace

std::optional<Setting> ParseSetting(std::string_view name) {
  if (name == "automatic" || name == "auto") return Setting::kAutomatic;
  if (name == "semi-automatic" || name == "semi") return Setting::kSemiAutomatic;
  return std::nullopt;
}

const std::vector<std::string>& ArmsFor(Setting setting) {
  static const std::vector<std::string> automatic = {
      "random3_avg", "random3_gen_wo_paper", "retrieved_top3_avg",
      "retrieved_gen_wo_paper", "retrieved_gen_w_paper"};
  static const std::vector<std::string> semi = {
      "maxiou_top3_avg", "maxiou_gen_w_paper", "reranked_top3_avg",
      "reranked_gen_wo_paper", "reranked_gen_w_paper"};
  return setting == Setting::kAutomatic ? automatic : semi;
}

std::string ArmLabel(std::string_view arm) {
  for (const ArmInfo& info : kArmInfo) {
    if (arm == info.name) return info.label;
  }
  return std::string(arm);
}

Layout ConstraintsFromGold(const Layout& gold) {
  return LargestElements(gold, kExemplarConstraintCount);
}

ExperimentResult RunExperiment(std::span<const PairRecord> records,
                               const ExperimentContext& context,
                               const ExperimentConfig& config) {
  if (context.index == nullptr || context.index->empty()) {
    throw Error(ErrorCode::kEmptyIndex, "experiment needs a retrieval pool");
  }
  if (config.k < 1 || config.n_candidates < 1 || config.maxiou_candidates < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k, n_candidates and pool sizes must be >= 1");
  }
  const std::vector<std::string>& valid_arms = ArmsFor(config.setting);
  const std::vector<std::string> arms = config.arms.empty() ? valid_arms : config.arms;
  for (const std::string& arm : arms) {
    if (std::find(valid_arms.begin(), valid_arms.end(), arm) == valid_arms.end()) {
      throw Error(ErrorCode::kInvalidArgument, "arm '" + arm + "' is not part of this setting");
    }
  }
  std::vector<const PairRecord*> pairs;
  for (const PairRecord& r : records) {
    if (r.gold_layout && !r.gold_layout->empty()) pairs.push_back(&r);
  }
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no pairs with gold layouts");

  std::vector<std::vector<PairOutcome>> per_pair(pairs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      PairRunner runner(*pairs[i], context, config);
      for (const std::string& arm : arms) per_pair[i].push_back(runner.Run(arm));
    }
  };
  const int threads = std::clamp<int>(config.max_in_flight, 1,
                                      static_cast<int>(pairs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  ExperimentResult result;
  result.total_pairs = static_cast<int>(pairs.size());
  std::map<std::string, std::vector<MetricsReport>> by_arm;
  for (std::vector<PairOutcome>& outcomes : per_pair) {
    bool failed = false;
    for (PairOutcome& o : outcomes) {
      if (o.error) failed = true;
      if (o.report) by_arm[o.arm].push_back(*o.report);
      result.outcomes.push_back(std::move(o));
    }
    if (failed) ++result.failed_pairs;
  }
  for (const std::string& arm : arms) {
    ArmAggregate agg;
    agg.arm = arm;
    agg.label = ArmLabel(arm);
    const auto it = by_arm.find(arm);
    if (it != by_arm.end()) {
      agg.pairs = static_cast<int>(it->second.size());
      const MetricsReport mean = Mean(it->second);
      agg.miou = mean.miou;
      agg.ltsim = mean.ltsim;
      agg.tc_mean = mean.tc_mean;
      agg.tc_std = mean.tc_std;
    }
    result.aggregates.push_back(agg);
  }
  if (2 * result.failed_pairs > result.total_pairs) {
    std::string first_error;
    for (const PairOutcome& o : result.outcomes) {
      if (o.error) {
        first_error = *o.error;
        break;
      }
    }
    throw Error(ErrorCode::kProviderError,
                std::to_string(result.failed_pairs) + " of " +
                    std::to_string(result.total_pairs) +
                    " pairs failed; first error: " + first_error);
  }
  return result;
}

std::string OutcomesJsonl(const ExperimentResult& result) {
  std::ostringstream os;
  for (const PairOutcome& o : result.outcomes) {
    ordered_json j;
    j["pair_id"] = o.pair_id;
    j["arm"] = o.arm;
    j["exemplars"] = o.exemplar_ids;
    j["metrics"] = ReportJson(o.report);
    j["constraints_satisfied"] =
        o.constraints_satisfied ? ordered_json(*o.constraints_satisfied) : ordered_json(nullptr);
    j["error"] = o.error ? ordered_json(*o.error) : ordered_json(nullptr);
    os << j.dump() << '\n';
  }
  return os.str();
}

std::string AggregatesCsv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "arm,label,pairs,miou,ltsim,tc_mean,tc_std\n";
  for (const ArmAggregate& a : result.aggregates) {
    os << a.arm << ",\"" << a.label << "\"," << a.pairs << ',' << FormatDouble(a.miou)
       << ',' << FormatDouble(a.ltsim) << ',' << FormatDouble(a.tc_mean) << ','
       << FormatDouble(a.tc_std) << '\n';
  }
  return os.str();
}

}  // namespace posterlay
