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
#include "posterlay/dataset.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "posterlay/error.h"
#include "posterlay/json_io.h"
#include "posterlay/metrics.h"
#include "posterlay/report.h"

namespace posterlay {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kManifestName[] = "manifest.json";
constexpr char kCorpusFormat[] = "posterlay-corpus";

const json* Lookup(const json& root, const std::string& dotted) {
  const json* node = &root;
  std::stringstream ss(dotted);
  std::string key;
  while (std::getline(ss, key, '.')) {
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &node->at(key);
  }
  return node;
}

const json& Require(const json& root, const std::string& path) {
  const json* node = Lookup(root, path);
  if (node == nullptr || node->is_null()) {
    throw Error(ErrorCode::kInvalidArgument, "missing field '" + path + "'");
  }
  return *node;
}

std::string ScalarToString(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorCode::kInvalidArgument, "expected string or integer id");
}

bool IsSafeId(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id == "manifest") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
           c == '_' || c == '.';
  });
}

bool TextPairMergeable(const BBox& a, const BBox& b,
                       const PostprocessRules& rules) {
  const double overlap_w =
      std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double narrower = std::min(a.w, b.w);
  if (overlap_w < rules.h_ovl * narrower) return false;
  const double gap =
      std::max(a.y, b.y) - std::min(a.bottom(), b.bottom());
  return gap <= rules.v_gap;
}

BBox UnionBox(const BBox& a, const BBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.right(), b.right());
  const double y1 = std::max(a.bottom(), b.bottom());
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

constexpr std::array<ElementCategory, 5> kLayoutFeatureCategories = {
    ElementCategory::kSection, ElementCategory::kText,
    ElementCategory::kFigure, ElementCategory::kTable,
    ElementCategory::kCaption};

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "train";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

json RecordToJson(const PairRecord& record) {
  json j{{"id", record.id},
         {"conference", record.conference},
         {"split", std::string(SplitName(record.split))},
         {"paper", record.paper},
         {"silver_layout", record.silver_layout}};
  j["gold_layout"] =
      record.gold_layout ? json(*record.gold_layout) : json(nullptr);
  return j;
}

FieldMapping ParseFieldMapping(const json& config) {
  if (!config.is_object()) {
    throw Error(ErrorCode::kConfigError, "mapping config must be an object");
  }
  FieldMapping mapping;
  const auto read = [&](const char* key, std::string& target) {
    if (!config.contains(key)) return;
    const json& v = config.at(key);
    if (!v.is_string() || v.get<std::string>().empty()) {
      throw Error(ErrorCode::kConfigError,
                  std::string("mapping '") + key + "' must be a non-empty string");
    }
    target = v.get<std::string>();
  };
  read("id", mapping.id);
  read("conference", mapping.conference);
  read("split", mapping.split);
  read("paper", mapping.paper);
  read("gold_layout", mapping.gold_layout);
  read("silver_layout", mapping.silver_layout);
  if (config.contains("split_aliases")) {
    const json& aliases = config.at("split_aliases");
    if (!aliases.is_object()) {
      throw Error(ErrorCode::kConfigError, "split_aliases must be an object");
    }
    for (const auto& [from, to] : aliases.items()) {
      if (!to.is_string() || !ParseSplit(to.get<std::string>())) {
        throw Error(ErrorCode::kConfigError,
                    "split alias '" + from + "' must map to train|valid|test");
      }
      mapping.split_aliases[from] = to.get<std::string>();
    }
  }
  for (const auto& [key, value] : config.items()) {
    static const std::set<std::string> known = {
        "id",          "conference",    "split",        "paper",
        "gold_layout", "silver_layout", "split_aliases"};
    if (!known.contains(key)) {
      throw Error(ErrorCode::kConfigError, "unknown mapping key '" + key + "'");
    }
  }
  return mapping;
}

PairRecord RecordFromJson(const json& source, const FieldMapping& mapping) {
  if (!source.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "record must be an object");
  }
  PairRecord record;
  record.id = ScalarToString(Require(source, mapping.id));
  if (!IsSafeId(record.id)) {
    throw Error(ErrorCode::kInvalidArgument, "unusable id '" + record.id + "'");
  }
  if (const json* conf = Lookup(source, mapping.conference);
      conf != nullptr && conf->is_string()) {
    record.conference = conf->get<std::string>();
  }
  const json& split_node = Require(source, mapping.split);
  if (!split_node.is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "split must be a string");
  }
  std::string split_name = split_node.get<std::string>();
  if (auto it = mapping.split_aliases.find(split_name);
      it != mapping.split_aliases.end()) {
    split_name = it->second;
  }
  const std::optional<Split> split = ParseSplit(split_name);
  if (!split) {
    throw Error(ErrorCode::kInvalidArgument, "unknown split '" + split_name + "'");
  }
  record.split = *split;
  record.paper = PaperFromJson(Require(source, mapping.paper));

  const json* gold = Lookup(source, mapping.gold_layout);
  if (gold != nullptr && !gold->is_null()) {
    record.gold_layout = LayoutFromJson(*gold);
  }
  const json* silver = Lookup(source, mapping.silver_layout);
  if (silver != nullptr && !silver->is_null()) {
    record.silver_layout = LayoutFromJson(*silver);
  } else if (record.split == Split::kTrain) {
    throw Error(ErrorCode::kInvalidArgument, "train record without silver layout");
  } else {
    record.silver_layout = Layout{record.gold_layout ? record.gold_layout->canvas_w : 1,
                                  record.gold_layout ? record.gold_layout->canvas_h : 1,
                                  {}};
  }
  if (record.split != Split::kTrain && !record.gold_layout) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(SplitName(record.split)) + " record without gold layout");
  }
  return record;
}

IngestResult Ingest(const fs::path& dir, const FieldMapping& mapping) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kMissingDirectory, dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == kManifestName) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  IngestResult result;
  std::set<std::string> seen;
  for (const fs::path& file : files) {
    json doc;
    try {
      doc = ReadJsonFile(file);
    } catch (const Error& e) {
      result.skipped.push_back({file.filename().string(), e.what()});
      continue;
    }
    const bool is_array = doc.is_array();
    const std::size_t n = is_array ? doc.size() : 1;
    for (std::size_t i = 0; i < n; ++i) {
      const json& item = is_array ? doc[i] : doc;
      const std::string source =
          file.filename().string() + (is_array ? "[" + std::to_string(i) + "]" : "");
      try {
        PairRecord record = RecordFromJson(item, mapping);
        if (!seen.insert(record.id).second) {
          result.skipped.push_back({source, "duplicate id '" + record.id + "'"});
          continue;
        }
        result.records.push_back(std::move(record));
      } catch (const Error& e) {
        result.skipped.push_back({source, e.what()});
      }
    }
  }
  if (result.records.empty()) {
    throw Error(ErrorCode::kEmptyCorpus,
                "no readable records in " + dir.string() + " (" +
                    std::to_string(result.skipped.size()) + " skipped)");
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const PairRecord& a, const PairRecord& b) { return a.id < b.id; });
  return result;
}

void EmitCorpus(const fs::path& dir, std::span<const PairRecord> records) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  std::vector<std::string> ids;
  for (const PairRecord& r : records) {
    if (!IsSafeId(r.id)) {
      throw Error(ErrorCode::kInvalidArgument, "unusable id '" + r.id + "'");
    }
    WriteJsonFile(dir / (r.id + ".json"), RecordToJson(r));
    ids.push_back(r.id);
  }
  std::sort(ids.begin(), ids.end());
  WriteJsonFile(dir / kManifestName,
                json{{"format", kCorpusFormat}, {"version", 1}, {"records", ids}});
}

std::vector<PairRecord> FilterSplit(std::span<const PairRecord> records,
                                    Split split) {
  std::vector<PairRecord> out;
  for (const PairRecord& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

Layout PostprocessSilver(const Layout& layout, const PostprocessRules& rules) {
  Layout out{layout.canvas_w, layout.canvas_h, {}};
  for (const Element& e : layout.elements) {
    if (e.bbox.Area() >= rules.min_area) out.elements.push_back(e);
  }
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < out.elements.size() && !merged; ++i) {
      if (out.elements[i].category != ElementCategory::kText) continue;
      for (std::size_t j = i + 1; j < out.elements.size(); ++j) {
        if (out.elements[j].category != ElementCategory::kText) continue;
        if (!TextPairMergeable(out.elements[i].bbox, out.elements[j].bbox,
                               rules)) {
          continue;
        }
        out.elements[i].bbox =
            UnionBox(out.elements[i].bbox, out.elements[j].bbox);
        out.elements.erase(out.elements.begin() + static_cast<long>(j));
        merged = true;
        break;
      }
    }
  }
  return out;
}

std::map<Split, SplitStats> CorpusStats(std::span<const PairRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyCorpus, "no records");
  std::map<Split, SplitStats> stats;
  for (const PairRecord& r : records) {
    SplitStats& s = stats[r.split];
    ++s.pairs;
    s.sections += r.paper.n_sections;
    s.captions += r.paper.n_captions;
    s.figures += r.paper.n_figures;
    s.tables += r.paper.n_tables;
    s.title_chars += r.paper.title_chars;
    s.author_chars += r.paper.author_chars;
    s.abstract_chars += r.paper.abstract_chars;
    for (const SectionLength& sec : r.paper.section_chars) {
      s.section_chars += sec.chars;
    }
    s.silver_elements += static_cast<long>(r.silver_layout.size());
    if (r.gold_layout) {
      ++s.gold_layouts;
      s.gold_elements += static_cast<long>(r.gold_layout->size());
    }
  }
  return stats;
}

std::optional<CorrelationSide> ParseCorrelationSide(std::string_view name) {
  if (name == "paper-layout") return CorrelationSide::kPaperLayout;
  if (name == "layout-layout") return CorrelationSide::kLayoutLayout;
  return std::nullopt;
}

const std::vector<std::string>& PaperFeatureNames() {
  static const std::vector<std::string> names = {
      "paper_text_chars", "paper_figures", "paper_tables",
      "paper_figure_area", "paper_table_area"};
  return names;
}

const std::vector<std::string>& LayoutFeatureNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (ElementCategory c : kLayoutFeatureCategories) {
      std::string base(CategoryName(c));
      std::transform(base.begin(), base.end(), base.begin(),
                     [](unsigned char ch) { return std::tolower(ch); });
      out.push_back(base + "_count");
      out.push_back(base + "_area");
    }
    return out;
  }();
  return names;
}

std::vector<double> PaperFeatureRow(const PaperStructure& paper) {
  const auto sum = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
  };
  return {static_cast<double>(paper.TotalChars()),
          static_cast<double>(paper.n_figures),
          static_cast<double>(paper.n_tables), sum(paper.figure_areas),
          sum(paper.table_areas)};
}

std::vector<double> LayoutFeatureRow(const Layout& layout) {
  const auto fractions = ElementAreaFractions(layout);
  std::vector<double> row;
  for (ElementCategory c : kLayoutFeatureCategories) {
    const CategoryArea& ca = fractions[MergedCategoryIndex(c)];
    row.push_back(static_cast<double>(ca.count));
    row.push_back(ca.area);
  }
  return row;
}

std::optional<double> CorrelationMatrix::at(std::string_view row,
                                            std::string_view col) const {
  const auto r = std::find(row_labels.begin(), row_labels.end(), row);
  const auto c = std::find(col_labels.begin(), col_labels.end(), col);
  if (r == row_labels.end() || c == col_labels.end()) return std::nullopt;
  return cells[r - row_labels.begin()][c - col_labels.begin()];
}

std::string CorrelationMatrix::ToCsv() const {
  std::ostringstream os;
  os << "feature";
  for (const std::string& c : col_labels) os << ',' << c;
  os << '\n';
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    os << row_labels[r];
    for (const auto& cell : cells[r]) {
      os << ',';
      if (cell) os << FormatDouble(*cell);
    }
    os << '\n';
  }
  return os.str();
}

json CorrelationMatrix::ToHeatmapJson() const {
  json values = json::array();
  for (const auto& row : cells) {
    json jr = json::array();
    for (const auto& cell : row) jr.push_back(cell ? json(*cell) : json(nullptr));
    values.push_back(jr);
  }
  return json{{"rows", row_labels},
              {"cols", col_labels},
              {"values", values},
              {"num_records", num_records}};
}

CorrelationMatrix ComputeCorrelationMatrix(std::span<const PairRecord> records,
                                           CorrelationSide side,
                                           int min_records) {
  std::vector<std::vector<double>> paper_rows, layout_rows;
  for (const PairRecord& r : records) {
    if (!r.gold_layout) continue;
    paper_rows.push_back(PaperFeatureRow(r.paper));
    layout_rows.push_back(LayoutFeatureRow(*r.gold_layout));
  }
  const int n = static_cast<int>(layout_rows.size());
  if (n < std::max(min_records, 2)) {
    throw Error(ErrorCode::kTooFewRecords,
                std::to_string(n) + " records with gold layouts, need " +
                    std::to_string(std::max(min_records, 2)));
  }
  const auto column = [](const std::vector<std::vector<double>>& rows,
                         std::size_t j) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[j]);
    return out;
  };
  const auto rho = [](const std::vector<double>& a,
                      const std::vector<double>& b) -> std::optional<double> {
    try {
      return Spearman(a, b);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDegenerateInput) return std::nullopt;
      throw;
    }
  };

  CorrelationMatrix m;
  m.num_records = n;
  m.col_labels = LayoutFeatureNames();
  const std::size_t nc = m.col_labels.size();
  if (side == CorrelationSide::kPaperLayout) {
    m.row_labels = PaperFeatureNames();
    m.cells.assign(m.row_labels.size(),
                   std::vector<std::optional<double>>(nc));
    for (std::size_t i = 0; i < m.row_labels.size(); ++i) {
      const auto xs = column(paper_rows, i);
      for (std::size_t j = 0; j < nc; ++j) {
        m.cells[i][j] = rho(xs, column(layout_rows, j));
      }
    }
  } else {
    m.row_labels = LayoutFeatureNames();
    m.cells.assign(nc, std::vector<std::optional<double>>(nc));
    for (std::size_t i = 0; i < nc; ++i) {
      const auto xs = column(layout_rows, i);
      for (std::size_t j = i; j < nc; ++j) {
        m.cells[i][j] = rho(xs, column(layout_rows, j));
        m.cells[j][i] = m.cells[i][j];
      }
    }
  }
  return m;
}

}  // namespace posterlay
