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
#include "posterlay/cli.h"

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "posterlay/dataset.h"
#include "posterlay/error.h"
#include "posterlay/experiment.h"
#include "posterlay/html_codec.h"
#include "posterlay/json_io.h"
#include "posterlay/metrics.h"
#include "posterlay/report.h"
#include "posterlay/retriever.h"
#include "posterlay/service.h"
#include "posterlay/synthetic.h"

namespace posterlay {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string config_path;
  std::string format = "table";
  json config = json::object();
};

// Section `name` of the --config file, or an empty object.
json ConfigSection(const GlobalOptions& g, const char* name) {
  if (g.config.contains(name)) return g.config.at(name);
  return json::object();
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<int, int> ParseCanvas(const std::string& text) {
  int w = 0;
  int h = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || w <= 0 || h <= 0 ||
      !in.eof()) {
    throw Error(ErrorCode::kInvalidArgument, "canvas must look like 5120x2560");
  }
  return {w, h};
}

// A layout JSON file (bare, under "layout", or a record's "gold_layout"),
// or an html layout (canvas div optional).
Layout ReadLayoutFile(const fs::path& path, std::pair<int, int> canvas) {
  const std::string text = ReadText(path);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, path.string() + " is not JSON");
    for (const char* key : {"layout", "gold_layout"}) {
      if (j.contains(key)) return LayoutFromJson(j.at(key));
    }
    return LayoutFromJson(j);
  }
  return ParseHtml(text, canvas).layout;
}

// A PaperStructure, or any record object carrying one under "paper".
PaperStructure ReadPaperFile(const fs::path& path) {
  const json j = ReadJsonFile(path);
  return PaperFromJson(j.contains("paper") ? j.at("paper") : j);
}

void PrintJson(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

std::string Fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

ordered_json StatsJson(const SplitStats& s) {
  ordered_json j;
  j["pairs"] = s.pairs;
  j["gold_layouts"] = s.gold_layouts;
  j["sections"] = s.sections;
  j["captions"] = s.captions;
  j["figures"] = s.figures;
  j["tables"] = s.tables;
  j["title_chars"] = s.title_chars;
  j["author_chars"] = s.author_chars;
  j["abstract_chars"] = s.abstract_chars;
  j["section_chars"] = s.section_chars;
  j["silver_elements"] = s.silver_elements;
  j["gold_elements"] = s.gold_elements;
  return j;
}

std::vector<PairRecord> LoadCorpus(const std::string& dir, std::ostream& err) {
  IngestResult result = Ingest(dir);
  for (const SkippedRecord& s : result.skipped) {
    err << "warning: skipped " << s.source << ": " << s.reason << '\n';
  }
  return std::move(result.records);
}

// Service settings from --config plus explicit index/params paths.
ServiceConfig PipelineConfig(const GlobalOptions& g, const std::string& index,
                             const std::string& params) {
  ServiceConfig config;
  if (g.config.contains("service")) config = ServiceConfigFromJson(g.config.at("service"));
  if (g.config.contains("provider")) config.provider = ProviderConfigFromJson(g.config.at("provider"));
  if (!index.empty()) config.index_path = index;
  if (!params.empty()) config.params_path = params;
  return config;
}

void PrintGeneration(std::ostream& out, const GlobalOptions& g, const ordered_json& r) {
  if (g.format == "json") {
    PrintJson(out, r);
    return;
  }
  if (g.format == "csv") {
    out << "sample_index,chosen,overlap,alignment,max_iou,combined\n";
    const std::size_t chosen = r["chosen_index"].get<std::size_t>();
    for (std::size_t i = 0; i < r["candidates"].size(); ++i) {
      const ordered_json& c = r["candidates"][i];
      out << c["sample_index"].get<int>() << ',' << (i == chosen ? 1 : 0) << ','
          << FormatDouble(c["scores"]["overlap"].get<double>()) << ','
          << FormatDouble(c["scores"]["alignment"].get<double>()) << ','
          << FormatDouble(c["scores"]["max_iou"].get<double>()) << ','
          << FormatDouble(c["scores"]["combined"].get<double>()) << '\n';
    }
    return;
  }
  out << "retrieved:";
  for (const auto& e : r["retrieved"]) out << ' ' << e["id"].get<std::string>();
  out << '\n';
  const std::size_t chosen = r["chosen_index"].get<std::size_t>();
  for (std::size_t i = 0; i < r["candidates"].size(); ++i) {
    const ordered_json& c = r["candidates"][i];
    out << (i == chosen ? "* " : "  ") << "candidate " << c["sample_index"].get<int>()
        << "  max_iou " << Fixed(c["scores"]["max_iou"].get<double>()) << "  overlap "
        << Fixed(c["scores"]["overlap"].get<double>()) << "  alignment "
        << Fixed(c["scores"]["alignment"].get<double>()) << "  combined "
        << Fixed(c["scores"]["combined"].get<double>()) << '\n';
  }
  for (const auto& f : r["failures"]) {
    out << "  failed sample " << f["sample_index"].get<int>() << ": "
        << f["reason"].get<std::string>() << '\n';
  }
  out << SerializeHtml(LayoutFromJson(json(r["candidates"][chosen]["layout"]))) << '\n';
}

std::atomic<Service*> g_running_service{nullptr};

extern "C" void StopOnSignal(int) {
  if (Service* s = g_running_service.load()) s->Stop();
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int Run(int argc, const char* const* argv);

 private:
  void Synth();
  void IngestCmd();
  void Stats();
  void Analyze();
  void TrainRetriever();
  void RetrieveCmd();
  void GenerateCmd();
  void CompleteCmd();
  void Eval();
  void Experiment();
  void Serve();

  std::ostream& out_;
  std::ostream& err_;
  GlobalOptions g_;

  // Flag storage shared by subcommands.
  std::string corpus_, input_, out_path_, mapping_, index_, params_, paper_,
      constraints_, pred_, gold_, canvas_ = "5120x2560", provider_ = "mock",
      side_ = "paper-layout", setting_ = "automatic", arms_, split_ = "test",
      heatmap_, out_index_, host_;
  std::vector<std::string> refs_;
  int n_train_ = 500, n_valid_ = 200, n_test_ = 100, k_ = 3, rerank_m_ = 15,
      n_candidates_ = 3, min_records_ = 30, max_in_flight_ = 4, limit_ = 0,
      pool_size_ = 0, port_ = -1;
  double portrait_fraction_ = 0.2;
  bool postprocess_ = false, silver_map_ = false, no_paper_ = false;
  std::optional<int> epochs_, batch_size_;
  std::optional<double> lr_, tau_;
};

int Cli::Run(int argc, const char* const* argv) {
  CLI::App app{"Retrieval-augmented poster layout toolkit", "posterlay"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--seed", g_.seed, "Seed for every randomized step");
  app.add_option("--config", g_.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--format", g_.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "table"}));

  std::function<void()> action;
  const auto sub = [&](const char* name, const char* help, void (Cli::*fn)()) {
    CLI::App* s = app.add_subcommand(name, help);
    s->callback([&action, this, fn] { action = [this, fn] { (this->*fn)(); }; });
    return s;
  };

  CLI::App* synth = sub("synth", "Write a seeded synthetic corpus", &Cli::Synth);
  synth->add_option("--out", out_path_, "Output corpus directory")->required();
  synth->add_option("--train", n_train_)->check(CLI::NonNegativeNumber);
  synth->add_option("--valid", n_valid_)->check(CLI::NonNegativeNumber);
  synth->add_option("--test", n_test_)->check(CLI::NonNegativeNumber);
  synth->add_option("--portrait-fraction", portrait_fraction_)->check(CLI::Range(0.0, 1.0));

  CLI::App* ingest = sub("ingest", "Normalize raw records into a corpus", &Cli::IngestCmd);
  ingest->add_option("--input", input_, "Raw record directory")->required();
  ingest->add_option("--out", out_path_, "Output corpus directory")->required();
  ingest->add_option("--mapping", mapping_, "Field mapping JSON")->check(CLI::ExistingFile);
  ingest->add_flag("--postprocess", postprocess_, "Post-process silver layouts");

  CLI::App* stats = sub("stats", "Per-split corpus statistics", &Cli::Stats);
  stats->add_option("--corpus", corpus_)->required();
  stats->add_flag("--silver-map", silver_map_, "Also report silver-vs-gold mAP");
  stats->add_flag("--postprocess", postprocess_, "Post-process silver before mAP");

  CLI::App* analyze = sub("analyze", "Spearman correlation matrix", &Cli::Analyze);
  analyze->add_option("--corpus", corpus_)->required();
  analyze->add_option("--side", side_)->check(CLI::IsMember({"paper-layout", "layout-layout"}));
  analyze->add_option("--min-records", min_records_)->check(CLI::PositiveNumber);
  analyze->add_option("--heatmap", heatmap_, "Also write heatmap JSON here");

  CLI::App* train = sub("train-retriever", "Train the contrastive retriever", &Cli::TrainRetriever);
  train->add_option("--corpus", corpus_)->required();
  train->add_option("--out", out_path_, "Output params JSON")->required();
  train->add_option("--out-index", out_index_, "Also write an index of the train split");
  train->add_option("--epochs", epochs_)->check(CLI::PositiveNumber);
  train->add_option("--batch-size", batch_size_)->check(CLI::Range(2, 1 << 20));
  train->add_option("--lr", lr_)->check(CLI::NonNegativeNumber);
  train->add_option("--tau", tau_);

  CLI::App* retrieve = sub("retrieve", "Top-k exemplar layouts", &Cli::RetrieveCmd);
  retrieve->add_option("--index", index_)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--params", params_)->required()->check(CLI::ExistingFile);
  retrieve->add_option("--paper", paper_, "Paper structure JSON")->check(CLI::ExistingFile);
  retrieve->add_option("--constraints", constraints_, "Constraint layout (JSON or html)")
      ->check(CLI::ExistingFile);
  retrieve->add_option("--canvas", canvas_, "Canvas for html input, WxH");
  retrieve->add_option("--k", k_)->check(CLI::PositiveNumber);
  retrieve->add_option("--rerank-m", rerank_m_, "Max-IoU pool size before re-ranking")
      ->check(CLI::PositiveNumber);

  for (auto [name, help, fn] :
       {std::tuple{"generate", "Automatic layout generation", &Cli::GenerateCmd},
        std::tuple{"complete", "Layout completion from constraints", &Cli::CompleteCmd}}) {
    CLI::App* s = sub(name, help, fn);
    s->add_option("--index", index_)->required()->check(CLI::ExistingFile);
    s->add_option("--params", params_)->required()->check(CLI::ExistingFile);
    s->add_option("--paper", paper_, "Paper structure JSON")->check(CLI::ExistingFile);
    s->add_option("--canvas", canvas_, "Canvas, WxH");
    s->add_option("--provider", provider_)->check(CLI::IsMember({"mock", "live"}));
    s->add_option("--k", k_)->check(CLI::PositiveNumber);
    s->add_option("--n", n_candidates_, "Candidates to sample")->check(CLI::PositiveNumber);
    s->add_option("--out", out_path_, "Write the chosen layout JSON here");
    if (std::string(name) == "generate") {
      s->add_flag("--no-paper", no_paper_, "Withhold paper structures from the prompt");
    } else {
      s->add_option("--constraints", constraints_, "Constraint layout (JSON or html)")
          ->required()
          ->check(CLI::ExistingFile);
    }
  }

  CLI::App* eval = sub("eval", "Score a predicted layout", &Cli::Eval);
  eval->add_option("--pred", pred_)->required()->check(CLI::ExistingFile);
  eval->add_option("--gold", gold_)->required()->check(CLI::ExistingFile);
  eval->add_option("--ref", refs_, "Reference layouts for Max-IoU")->check(CLI::ExistingFile);
  eval->add_option("--canvas", canvas_, "Canvas for html input, WxH");

  CLI::App* exp = sub("experiment", "Run the evaluation arms", &Cli::Experiment);
  exp->add_option("--corpus", corpus_)->required();
  exp->add_option("--index", index_)->required()->check(CLI::ExistingFile);
  exp->add_option("--params", params_)->check(CLI::ExistingFile);
  exp->add_option("--setting", setting_)
      ->check(CLI::IsMember({"automatic", "auto", "semi-automatic", "semi"}));
  exp->add_option("--arms", arms_, "Comma-separated arm names");
  exp->add_option("--split", split_)->check(CLI::IsMember({"train", "valid", "test"}));
  exp->add_option("--limit", limit_, "Use the first N pairs")->check(CLI::NonNegativeNumber);
  exp->add_option("--pool-size", pool_size_, "Truncate the pool to N")
      ->check(CLI::NonNegativeNumber);
  exp->add_option("--provider", provider_)->check(CLI::IsMember({"mock", "live"}));
  exp->add_option("--k", k_)->check(CLI::PositiveNumber);
  exp->add_option("--n", n_candidates_)->check(CLI::PositiveNumber);
  exp->add_option("--max-in-flight", max_in_flight_)->check(CLI::PositiveNumber);
  exp->add_option("--out", out_path_, "Directory for outcomes.jsonl and aggregates.csv");

  CLI::App* serve = sub("serve", "Run the HTTP service", &Cli::Serve);
  serve->add_option("--index", index_);
  serve->add_option("--params", params_);
  serve->add_option("--host", host_);
  serve->add_option("--port", port_)->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const std::vector<CLI::App*> chosen = app.get_subcommands();
    out_ << (chosen.empty() ? app.help() : chosen.back()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n';
    const std::vector<CLI::App*> chosen = app.get_subcommands();
    err_ << (chosen.empty() ? app.help() : chosen.back()->help());
    return kExitUsage;
  }

  try {
    if (!g_.config_path.empty()) {
      g_.config = ReadJsonFile(g_.config_path);
      if (!g_.config.is_object()) {
        throw Error(ErrorCode::kConfigError, "config must be a JSON object");
      }
    }
    action();
  } catch (const Error& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

void Cli::Synth() {
  SynthOptions options;
  options.n_train = n_train_;
  options.n_valid = n_valid_;
  options.n_test = n_test_;
  options.portrait_fraction = portrait_fraction_;
  options.seed = g_.seed;
  const std::vector<PairRecord> records = SynthesizeCorpus(options);
  EmitCorpus(out_path_, records);
  out_ << "wrote " << records.size() << " records to " << out_path_ << '\n';
}

void Cli::IngestCmd() {
  json mapping_json = ConfigSection(g_, "ingest");
  if (!mapping_.empty()) mapping_json = ReadJsonFile(mapping_);
  IngestResult result = Ingest(input_, ParseFieldMapping(mapping_json));
  if (postprocess_) {
    for (PairRecord& r : result.records) r.silver_layout = PostprocessSilver(r.silver_layout);
  }
  EmitCorpus(out_path_, result.records);
  if (g_.format == "json") {
    ordered_json j;
    j["records"] = result.records.size();
    ordered_json skipped = ordered_json::array();
    for (const SkippedRecord& s : result.skipped) {
      skipped.push_back({{"source", s.source}, {"reason", s.reason}});
    }
    j["skipped"] = skipped;
    PrintJson(out_, j);
    return;
  }
  out_ << "ingested " << result.records.size() << " records, skipped "
       << result.skipped.size() << '\n';
  for (const SkippedRecord& s : result.skipped) {
    out_ << "  " << s.source << ": " << s.reason << '\n';
  }
}

void Cli::Stats() {
  const std::vector<PairRecord> records = LoadCorpus(corpus_, err_);
  const std::map<Split, SplitStats> stats = CorpusStats(records);
  std::map<Split, double> maps;
  if (silver_map_) {
    std::map<Split, std::vector<LayoutPair>> pairs;
    for (const PairRecord& r : records) {
      if (!r.gold_layout || r.silver_layout.empty()) continue;
      pairs[r.split].push_back(
          {postprocess_ ? PostprocessSilver(r.silver_layout) : r.silver_layout, *r.gold_layout});
    }
    for (const auto& [split, p] : pairs) maps[split] = MapSilverGold(p);
  }
  if (g_.format == "json") {
    ordered_json j;
    for (const auto& [split, s] : stats) {
      ordered_json row = StatsJson(s);
      if (maps.count(split)) row["silver_gold_map"] = maps.at(split);
      j[std::string(SplitName(split))] = row;
    }
    PrintJson(out_, j);
    return;
  }
  if (g_.format == "csv") {
    out_ << "split,pairs,gold_layouts,sections,captions,figures,tables,title_chars,"
            "author_chars,abstract_chars,section_chars,silver_elements,gold_elements"
         << (silver_map_ ? ",silver_gold_map" : "") << '\n';
    for (const auto& [split, s] : stats) {
      out_ << SplitName(split) << ',' << s.pairs << ',' << s.gold_layouts << ',' << s.sections
           << ',' << s.captions << ',' << s.figures << ',' << s.tables << ',' << s.title_chars
           << ',' << s.author_chars << ',' << s.abstract_chars << ',' << s.section_chars << ','
           << s.silver_elements << ',' << s.gold_elements;
      if (silver_map_) out_ << ',' << (maps.count(split) ? FormatDouble(maps.at(split)) : "");
      out_ << '\n';
    }
    return;
  }
  char line[256];
  std::snprintf(line, sizeof(line), "%-6s %7s %6s %9s %9s %8s %7s %10s\n", "split", "pairs",
                "gold", "sections", "captions", "figures", "tables", "silver_map");
  out_ << line;
  for (const auto& [split, s] : stats) {
    const std::string map = maps.count(split) ? Fixed(maps.at(split)) : "-";
    std::snprintf(line, sizeof(line), "%-6s %7d %6d %9ld %9ld %8ld %7ld %10s\n",
                  std::string(SplitName(split)).c_str(), s.pairs, s.gold_layouts, s.sections,
                  s.captions, s.figures, s.tables, map.c_str());
    out_ << line;
  }
}

void Cli::Analyze() {
  const std::vector<PairRecord> records = LoadCorpus(corpus_, err_);
  const CorrelationMatrix m =
      ComputeCorrelationMatrix(records, *ParseCorrelationSide(side_), min_records_);
  if (!heatmap_.empty()) WriteJsonFile(heatmap_, m.ToHeatmapJson());
  if (g_.format == "json") {
    out_ << m.ToHeatmapJson().dump(2) << '\n';
  } else if (g_.format == "csv") {
    out_ << m.ToCsv();
  } else {
    out_ << "n = " << m.num_records << '\n';
    char cell[64];
    std::snprintf(cell, sizeof(cell), "%-18s", "");
    out_ << cell;
    for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
      std::snprintf(cell, sizeof(cell), " %6zu", c + 1);
      out_ << cell;
    }
    out_ << '\n';
    for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
      std::snprintf(cell, sizeof(cell), "%-18s", m.row_labels[r].c_str());
      out_ << cell;
      for (const std::optional<double>& v : m.cells[r]) {
        if (v) {
          std::snprintf(cell, sizeof(cell), " %6.2f", *v);
        } else {
          std::snprintf(cell, sizeof(cell), " %6s", "-");
        }
        out_ << cell;
      }
      out_ << '\n';
    }
    for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
      out_ << "  " << (c + 1) << " = " << m.col_labels[c] << '\n';
    }
  }
}

void Cli::TrainRetriever() {
  const std::vector<PairRecord> records = LoadCorpus(corpus_, err_);
  TrainConfig config = TrainConfigFromJson(ConfigSection(g_, "train"));
  config.seed = g_.seed;
  if (epochs_) config.epochs = *epochs_;
  if (batch_size_) config.batch_size = *batch_size_;
  if (lr_) config.learning_rate = *lr_;
  if (tau_) config.temperature = *tau_;
  const std::vector<PairRecord> train = FilterSplit(records, Split::kTrain);
  const std::vector<PairRecord> valid = FilterSplit(records, Split::kValid);
  const TrainResult result = Train(train, config, valid);
  SaveParams(out_path_, result.params);
  if (!out_index_.empty()) SaveIndex(out_index_, BuildIndex(result.params, train));
  if (g_.format == "json") {
    ordered_json j;
    j["train_records"] = train.size();
    j["epoch_loss"] = result.epoch_loss;
    j["valid_recall"] = result.valid_recall ? ordered_json(*result.valid_recall) : nullptr;
    j["params"] = out_path_;
    PrintJson(out_, j);
    return;
  }
  if (g_.format == "csv") {
    out_ << "epoch,loss\n";
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
      out_ << (e + 1) << ',' << FormatDouble(result.epoch_loss[e]) << '\n';
    }
    return;
  }
  out_ << "trained on " << train.size() << " records, " << result.epoch_loss.size()
       << " epochs\n";
  out_ << "loss: first " << Fixed(result.epoch_loss.front(), 4) << ", last "
       << Fixed(result.epoch_loss.back(), 4) << '\n';
  if (result.valid_recall) {
    out_ << "valid recall@" << config.recall_k << ": " << Fixed(*result.valid_recall) << '\n';
  }
  out_ << "params written to " << out_path_ << '\n';
}

void Cli::RetrieveCmd() {
  if (paper_.empty() && constraints_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need --paper and/or --constraints");
  }
  const auto pipeline = Pipeline::Load(PipelineConfig(g_, index_, params_));
  json request{{"k", k_}, {"rerank_pool", rerank_m_}};
  if (!paper_.empty()) request["paper"] = ReadPaperFile(paper_);
  if (!constraints_.empty()) {
    request["constraints"] = ReadLayoutFile(constraints_, ParseCanvas(canvas_));
  }
  const ordered_json r = pipeline->Retrieve(request);
  if (g_.format == "json") {
    PrintJson(out_, r);
    return;
  }
  if (g_.format == "csv") out_ << "rank,id,score\n";
  int rank = 0;
  for (const auto& item : r["results"]) {
    ++rank;
    if (g_.format == "csv") {
      out_ << rank << ',' << item["id"].get<std::string>() << ','
           << FormatDouble(item["score"].get<double>()) << '\n';
    } else {
      out_ << rank << ". " << item["id"].get<std::string>() << "  "
           << Fixed(item["score"].get<double>(), 4) << '\n';
    }
  }
}

void Cli::GenerateCmd() {
  if (paper_.empty()) throw Error(ErrorCode::kInvalidArgument, "generate needs --paper");
  const auto pipeline = Pipeline::Load(PipelineConfig(g_, index_, params_));
  const auto [w, h] = ParseCanvas(canvas_);
  const json request{{"paper", ReadPaperFile(paper_)}, {"canvas", {w, h}}, {"k", k_},
                     {"n_candidates", n_candidates_}, {"provider", provider_},
                     {"use_paper", !no_paper_}};
  const ordered_json r = pipeline->Generate(request);
  if (!out_path_.empty()) {
    WriteJsonFile(out_path_, json(r["candidates"][r["chosen_index"].get<std::size_t>()]["layout"]));
  }
  PrintGeneration(out_, g_, r);
}

void Cli::CompleteCmd() {
  const auto pipeline = Pipeline::Load(PipelineConfig(g_, index_, params_));
  const Layout constraints = ReadLayoutFile(constraints_, ParseCanvas(canvas_));
  json request{{"canvas", {constraints.canvas_w, constraints.canvas_h}},
               {"constraints", json(constraints)["elements"]},
               {"k", k_},
               {"n_candidates", n_candidates_},
               {"provider", provider_}};
  if (!paper_.empty()) request["paper"] = ReadPaperFile(paper_);
  const ordered_json r = pipeline->Complete(request);
  if (!out_path_.empty()) {
    WriteJsonFile(out_path_, json(r["candidates"][r["chosen_index"].get<std::size_t>()]["layout"]));
  }
  PrintGeneration(out_, g_, r);
}

void Cli::Eval() {
  const std::pair<int, int> canvas = ParseCanvas(canvas_);
  const Layout pred = ReadLayoutFile(pred_, canvas);
  const Layout gold = ReadLayoutFile(gold_, canvas);
  std::vector<Layout> refs;
  for (const std::string& r : refs_) refs.push_back(ReadLayoutFile(r, canvas));
  const MetricsReport report = Evaluate(pred, gold, refs);
  if (g_.format == "json") {
    PrintJson(out_, ReportToJson(report));
  } else if (g_.format == "csv") {
    out_ << ReportCsvHeader() << '\n' << ReportCsvRow(pred_, report) << '\n';
  } else {
    out_ << "mIoU       " << Fixed(report.miou) << '\n'
         << "LTSim      " << Fixed(report.ltsim) << '\n'
         << "TC_mean    " << Fixed(report.tc_mean) << '\n'
         << "TC_std     " << Fixed(report.tc_std) << '\n'
         << "overlap    " << Fixed(report.overlap) << '\n'
         << "alignment  " << Fixed(report.alignment) << '\n';
    if (report.max_iou) out_ << "Max-IoU    " << Fixed(*report.max_iou) << '\n';
  }
}

void Cli::Experiment() {
  const std::vector<PairRecord> records = LoadCorpus(corpus_, err_);
  std::vector<PairRecord> pairs = FilterSplit(records, *ParseSplit(split_));
  if (limit_ > 0 && static_cast<std::size_t>(limit_) < pairs.size()) pairs.resize(limit_);

  RetrievalIndex index = LoadIndex(index_);
  if (pool_size_ > 0) index = TruncatePool(index, pool_size_, g_.seed);

  ExperimentConfig config;
  config.setting = *ParseSetting(setting_);
  config.k = k_;
  config.n_candidates = n_candidates_;
  config.max_in_flight = max_in_flight_;
  config.seed = g_.seed;
  std::stringstream arms(arms_);
  for (std::string arm; std::getline(arms, arm, ',');) {
    if (!arm.empty()) config.arms.push_back(arm);
  }

  std::optional<EncoderParams> params;
  if (!params_.empty()) params = LoadParams(params_);
  ExperimentContext context;
  context.index = &index;
  if (params) {
    context.embed_query = [&params](const PairRecord& r) { return EncodePaper(*params, r.paper); };
  }
  EchoMockProvider mock;
  std::unique_ptr<HttpProvider> live;
  std::unique_ptr<ThrottledProvider> throttled;
  if (provider_ == "live") {
    live = std::make_unique<HttpProvider>(ProviderConfigFromJson(ConfigSection(g_, "provider")));
    throttled = std::make_unique<ThrottledProvider>(*live, max_in_flight_);
    context.provider = throttled.get();
  } else {
    context.provider = &mock;
  }

  const ExperimentResult result = RunExperiment(pairs, context, config);
  if (!out_path_.empty()) {
    fs::create_directories(out_path_);
    std::ofstream(fs::path(out_path_) / "outcomes.jsonl") << OutcomesJsonl(result);
    std::ofstream(fs::path(out_path_) / "aggregates.csv") << AggregatesCsv(result);
  }
  if (g_.format == "csv") {
    out_ << AggregatesCsv(result);
    return;
  }
  if (g_.format == "json") {
    ordered_json j;
    j["total_pairs"] = result.total_pairs;
    j["failed_pairs"] = result.failed_pairs;
    ordered_json rows = ordered_json::array();
    for (const ArmAggregate& a : result.aggregates) {
      rows.push_back({{"arm", a.arm}, {"label", a.label}, {"pairs", a.pairs},
                      {"miou", a.miou}, {"ltsim", a.ltsim}, {"tc_mean", a.tc_mean},
                      {"tc_std", a.tc_std}});
    }
    j["aggregates"] = rows;
    PrintJson(out_, j);
    return;
  }
  char line[256];
  std::snprintf(line, sizeof(line), "%-44s %6s %7s %7s %8s %8s\n", "approach", "pairs", "mIoU",
                "LTSim", "TC_mean", "TC_std");
  out_ << line;
  for (const ArmAggregate& a : result.aggregates) {
    std::snprintf(line, sizeof(line), "%-44s %6d %7.3f %7.3f %8.3f %8.3f\n", a.label.c_str(),
                  a.pairs, a.miou, a.ltsim, a.tc_mean, a.tc_std);
    out_ << line;
  }
  out_ << result.failed_pairs << " of " << result.total_pairs << " pairs failed\n";
}

void Cli::Serve() {
  ServiceConfig config = PipelineConfig(g_, "", "");
  ApplyEnvOverrides(config, [](const char* name) { return std::getenv(name); });
  if (!index_.empty()) config.index_path = index_;
  if (!params_.empty()) config.params_path = params_;
  if (!host_.empty()) config.host = host_;
  if (port_ >= 0) config.port = port_;
  Service service(Pipeline::Load(config), config);
  const int port = service.Bind();
  out_ << "listening on http://" << config.host << ':' << port << std::endl;
  g_running_service = &service;
  std::signal(SIGINT, StopOnSignal);
  std::signal(SIGTERM, StopOnSignal);
  service.Listen();
  g_running_service = nullptr;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return Cli(out, err).Run(argc, argv);
}

}  // namespace posterlay
