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
// Paper/poster pair corpora: ingestion into the canonical on-disk format,
// silver-layout clean-up, split statistics and Spearman correlation
// analyses between paper and layout features.
//
// Canonical corpus layout on disk:
//   <dir>/manifest.json        {"format": "posterlay-corpus", "version": 1,
//                               "records": ["<id>", ...]}
//   <dir>/<id>.json            one PairRecord per file
#ifndef POSTERLAY_DATASET_H_
#define POSTERLAY_DATASET_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "posterlay/layout.h"

namespace posterlay {

enum class Split { kTrain, kValid, kTest };

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

struct PairRecord {
  std::string id;
  std::string conference;
  Split split = Split::kTrain;
  PaperStructure paper;
  // Present for valid/test records.
  std::optional<Layout> gold_layout;
  Layout silver_layout;
};

nlohmann::json RecordToJson(const PairRecord& record);

// Where each PairRecord field lives in a source record. Paths are dotted
// ("annotations.poster.gold"). split_aliases maps source split spellings
// (e.g. "val") onto train/valid/test.
struct FieldMapping {
  std::string id = "id";
  std::string conference = "conference";
  std::string split = "split";
  std::string paper = "paper";
  std::string gold_layout = "gold_layout";
  std::string silver_layout = "silver_layout";
  std::map<std::string, std::string> split_aliases;
};

// Keys that are present override the defaults; an empty or non-string
// value throws Error{kConfigError}.
FieldMapping ParseFieldMapping(const nlohmann::json& config);

PairRecord RecordFromJson(const nlohmann::json& source,
                          const FieldMapping& mapping = {});

struct SkippedRecord {
  std::string source;
  std::string reason;
};

struct IngestResult {
  std::vector<PairRecord> records;  // sorted by id
  std::vector<SkippedRecord> skipped;
};

// Reads every *.json file (object or array of objects) except the
// manifest. Throws Error{kMissingDirectory} or Error{kEmptyCorpus}.
IngestResult Ingest(const std::filesystem::path& dir,
                    const FieldMapping& mapping = {});

// Writes the canonical corpus (one file per record plus manifest).
void EmitCorpus(const std::filesystem::path& dir,
                std::span<const PairRecord> records);

std::vector<PairRecord> FilterSplit(std::span<const PairRecord> records,
                                    Split split);

struct PostprocessRules {
  double min_area = 1e-4;  // canvas fraction
  double h_ovl = 0.5;      // fraction of the narrower box's width
  double v_gap = 0.01;     // canvas-height fraction
};

// Drops specks below min_area, then repeatedly merges vertically adjacent,
// horizontally overlapping Text boxes into their bounding union until no
// pair qualifies.
Layout PostprocessSilver(const Layout& layout,
                         const PostprocessRules& rules = {});

struct SplitStats {
  int pairs = 0;
  long sections = 0;
  long captions = 0;
  long figures = 0;
  long tables = 0;
  long title_chars = 0;
  long author_chars = 0;
  long abstract_chars = 0;
  long section_chars = 0;
  int gold_layouts = 0;
  long silver_elements = 0;
  long gold_elements = 0;

  friend bool operator==(const SplitStats&, const SplitStats&) = default;
};

// Throws Error{kEmptyCorpus}.
std::map<Split, SplitStats> CorpusStats(std::span<const PairRecord> records);

enum class CorrelationSide { kPaperLayout, kLayoutLayout };

std::optional<CorrelationSide> ParseCorrelationSide(std::string_view name);

// Feature axes: paper {text chars, #figures, #tables, figure area, table
// area}; layout {count, area} x {section, text(+list), figure, table,
// caption}. Title and AuthorInfo are not part of either registry.
const std::vector<std::string>& PaperFeatureNames();
const std::vector<std::string>& LayoutFeatureNames();
std::vector<double> PaperFeatureRow(const PaperStructure& paper);
std::vector<double> LayoutFeatureRow(const Layout& layout);

struct CorrelationMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  // Missing when either feature is constant over the corpus.
  std::vector<std::vector<std::optional<double>>> cells;
  int num_records = 0;

  std::optional<double> at(std::string_view row, std::string_view col) const;
  std::string ToCsv() const;
  nlohmann::json ToHeatmapJson() const;
};

// Uses records carrying a gold layout. Throws Error{kTooFewRecords} when
// fewer than min_records qualify.
CorrelationMatrix ComputeCorrelationMatrix(std::span<const PairRecord> records,
                                           CorrelationSide side,
                                           int min_records = 30);

}  // namespace posterlay

#endif  // POSTERLAY_DATASET_H_
