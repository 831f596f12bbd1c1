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
#include "posterlay/layout.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace posterlay {

namespace {

constexpr double kEdgeTolerance = 1e-9;

}  // namespace

std::string_view CategoryName(ElementCategory category) {
  switch (category) {
    case ElementCategory::kTitle: return "Title";
    case ElementCategory::kAuthorInfo: return "Author Info";
    case ElementCategory::kSection: return "Section";
    case ElementCategory::kText: return "Text";
    case ElementCategory::kList: return "List";
    case ElementCategory::kTable: return "Table";
    case ElementCategory::kFigure: return "Figure";
    case ElementCategory::kCaption: return "Caption";
  }
  return "Text";
}

std::string_view CategoryHtmlClass(ElementCategory category) {
  if (category == ElementCategory::kAuthorInfo) return "AuthorInfo";
  return CategoryName(category);
}

std::optional<ElementCategory> ParseCategory(std::string_view name) {
  for (ElementCategory c : kAllCategories) {
    if (name == CategoryName(c) || name == CategoryHtmlClass(c)) return c;
  }
  return std::nullopt;
}

ElementCategory MergeCategory(ElementCategory category) {
  switch (category) {
    case ElementCategory::kAuthorInfo:
    case ElementCategory::kList:
      return ElementCategory::kText;
    default:
      return category;
  }
}

int MergedCategoryIndex(ElementCategory category) {
  const ElementCategory merged = MergeCategory(category);
  for (int i = 0; i < static_cast<int>(kMergedCategories.size()); ++i) {
    if (kMergedCategories[i] == merged) return i;
  }
  return -1;  // unreachable: MergeCategory is total onto kMergedCategories
}

bool BBox::IsValid() const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    return false;
  }
  return x >= 0.0 && y >= 0.0 && w > 0.0 && h > 0.0 &&
         x + w <= 1.0 + kEdgeTolerance && y + h <= 1.0 + kEdgeTolerance;
}

bool PaperStructure::IsValid() const {
  if (n_sections < 0 || n_captions < 0 || n_figures < 0 || n_tables < 0 ||
      title_chars < 0 || author_chars < 0 || abstract_chars < 0) {
    return false;
  }
  if (static_cast<int>(section_chars.size()) != n_sections) return false;
  if (static_cast<int>(figure_aspects.size()) != n_figures) return false;
  if (static_cast<int>(table_aspects.size()) != n_tables) return false;
  if (!figure_areas.empty() &&
      static_cast<int>(figure_areas.size()) != n_figures) {
    return false;
  }
  if (!table_areas.empty() &&
      static_cast<int>(table_areas.size()) != n_tables) {
    return false;
  }
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!std::all_of(figure_aspects.begin(), figure_aspects.end(), positive) ||
      !std::all_of(table_aspects.begin(), table_aspects.end(), positive)) {
    return false;
  }
  return std::all_of(section_chars.begin(), section_chars.end(),
                     [](const SectionLength& s) { return s.chars >= 0; });
}

long PaperStructure::TotalChars() const {
  long total = static_cast<long>(title_chars) + author_chars + abstract_chars;
  for (const SectionLength& s : section_chars) total += s.chars;
  return total;
}

double IntersectionArea(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double Iou(const BBox& a, const BBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter <= 0.0) return 0.0;
  // Same corner arithmetic as IntersectionArea, so identical boxes give
  // inter == area_a == area_b bit for bit.
  const double area_a = (a.right() - a.x) * (a.bottom() - a.y);
  const double area_b = (b.right() - b.x) * (b.bottom() - b.y);
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::array<CategoryArea, 6> ElementAreaFractions(const Layout& layout) {
  std::array<CategoryArea, 6> out{};
  for (const Element& e : layout.elements) {
    CategoryArea& slot = out[MergedCategoryIndex(e.category)];
    ++slot.count;
    slot.area += e.bbox.Area();
  }
  return out;
}

std::array<int, 6> MergedCategoryCounts(const Layout& layout) {
  std::array<int, 6> counts{};
  for (const Element& e : layout.elements) {
    ++counts[MergedCategoryIndex(e.category)];
  }
  return counts;
}

Layout NormalizeCategories(Layout layout) {
  for (Element& e : layout.elements) e.category = MergeCategory(e.category);
  return layout;
}

Layout LargestElements(const Layout& layout, std::size_t n) {
  std::vector<std::size_t> order(layout.elements.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) {
                     return layout.elements[i].bbox.Area() >
                            layout.elements[j].bbox.Area();
                   });
  order.resize(std::min(n, order.size()));
  std::sort(order.begin(), order.end());
  Layout out{layout.canvas_w, layout.canvas_h, {}};
  for (std::size_t i : order) out.elements.push_back(layout.elements[i]);
  return out;
}

}  // namespace posterlay
