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
#include "posterlay/json_io.h"

#include <fstream>
#include <sstream>

#include "posterlay/error.h"

namespace posterlay {

using nlohmann::json;

namespace {

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

int ReadCount(const json& j, const char* key) {
  if (!j.contains(key)) return 0;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long>() < 0) {
    Invalid(std::string(key) + " must be a non-negative integer");
  }
  return v.get<int>();
}

std::vector<double> ReadDoubles(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  if (!j.at(key).is_array()) Invalid(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const json& v : j.at(key)) {
    if (!v.is_number()) Invalid(std::string(key) + " entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

void to_json(json& j, const Element& e) {
  j = json{{"category", std::string(CategoryName(e.category))},
           {"bbox", {e.bbox.x, e.bbox.y, e.bbox.w, e.bbox.h}}};
}

void from_json(const json& j, Element& e) {
  if (!j.is_object()) Invalid("element must be an object");
  if (!j.contains("category") || !j.at("category").is_string()) {
    Invalid("element.category must be a string");
  }
  const std::string name = j.at("category").get<std::string>();
  const auto category = ParseCategory(name);
  if (!category) throw Error(ErrorCode::kUnknownCategory, name);
  if (!j.contains("bbox") || !j.at("bbox").is_array() ||
      j.at("bbox").size() != 4) {
    Invalid("element.bbox must be [x, y, w, h]");
  }
  const json& b = j.at("bbox");
  for (const json& v : b) {
    if (!v.is_number()) Invalid("bbox entries must be numbers");
  }
  e.category = *category;
  e.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                b[3].get<double>()};
  if (!e.bbox.IsValid()) Invalid("bbox violates [0,1] / positive-size bounds");
}

void to_json(json& j, const Layout& layout) {
  j = json{{"canvas", {layout.canvas_w, layout.canvas_h}},
           {"elements", layout.elements}};
}

void from_json(const json& j, Layout& layout) {
  if (!j.is_object()) Invalid("layout must be an object");
  if (!j.contains("canvas") || !j.at("canvas").is_array() ||
      j.at("canvas").size() != 2 || !j.at("canvas")[0].is_number_integer() ||
      !j.at("canvas")[1].is_number_integer()) {
    Invalid("layout.canvas must be [w_px, h_px]");
  }
  layout.canvas_w = j.at("canvas")[0].get<int>();
  layout.canvas_h = j.at("canvas")[1].get<int>();
  if (layout.canvas_w <= 0 || layout.canvas_h <= 0) {
    Invalid("canvas dimensions must be positive");
  }
  layout.elements.clear();
  if (j.contains("elements")) {
    if (!j.at("elements").is_array()) Invalid("layout.elements must be array");
    for (const json& e : j.at("elements")) {
      layout.elements.push_back(e.get<Element>());
    }
  }
}

void to_json(json& j, const PaperStructure& p) {
  json sections = json::array();
  for (const SectionLength& s : p.section_chars) {
    sections.push_back({{"name", s.name}, {"chars", s.chars}});
  }
  j = json{{"n_sections", p.n_sections},
           {"n_captions", p.n_captions},
           {"n_figures", p.n_figures},
           {"n_tables", p.n_tables},
           {"title_chars", p.title_chars},
           {"author_chars", p.author_chars},
           {"abstract_chars", p.abstract_chars},
           {"section_chars", sections},
           {"figure_aspects", p.figure_aspects},
           {"table_aspects", p.table_aspects}};
  if (!p.figure_areas.empty()) j["figure_areas"] = p.figure_areas;
  if (!p.table_areas.empty()) j["table_areas"] = p.table_areas;
}

void from_json(const json& j, PaperStructure& p) {
  if (!j.is_object()) Invalid("paper must be an object");
  p = PaperStructure{};
  p.n_sections = ReadCount(j, "n_sections");
  p.n_captions = ReadCount(j, "n_captions");
  p.n_figures = ReadCount(j, "n_figures");
  p.n_tables = ReadCount(j, "n_tables");
  p.title_chars = ReadCount(j, "title_chars");
  p.author_chars = ReadCount(j, "author_chars");
  p.abstract_chars = ReadCount(j, "abstract_chars");
  if (j.contains("section_chars")) {
    if (!j.at("section_chars").is_array()) Invalid("section_chars must be array");
    for (const json& s : j.at("section_chars")) {
      if (!s.is_object()) Invalid("section_chars entries must be objects");
      p.section_chars.push_back(
          {s.value("name", std::string()), ReadCount(s, "chars")});
    }
  }
  p.figure_aspects = ReadDoubles(j, "figure_aspects");
  p.table_aspects = ReadDoubles(j, "table_aspects");
  p.figure_areas = ReadDoubles(j, "figure_areas");
  p.table_areas = ReadDoubles(j, "table_areas");
  if (!p.IsValid()) Invalid("paper structure violates count/length invariants");
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    Invalid(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << value.dump(2) << '\n';
}

Layout LayoutFromJson(const json& j) {
  try {
    return j.get<Layout>();
  } catch (const json::exception& e) {
    Invalid(std::string("layout: ") + e.what());
  }
}

PaperStructure PaperFromJson(const json& j) {
  try {
    return j.get<PaperStructure>();
  } catch (const json::exception& e) {
    Invalid(std::string("paper: ") + e.what());
  }
}

}  // namespace posterlay
