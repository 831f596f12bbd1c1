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
#ifndef POSTERLAY_LAYOUT_H_
#define POSTERLAY_LAYOUT_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace posterlay {

// The eight poster element classes.
enum class ElementCategory {
  kTitle,
  kAuthorInfo,
  kSection,
  kText,
  kList,
  kTable,
  kFigure,
  kCaption,
};

inline constexpr std::array<ElementCategory, 8> kAllCategories = {
    ElementCategory::kTitle,  ElementCategory::kAuthorInfo,
    ElementCategory::kSection, ElementCategory::kText,
    ElementCategory::kList,   ElementCategory::kTable,
    ElementCategory::kFigure, ElementCategory::kCaption,
};

// The six categories left after merging AuthorInfo and List into Text, in the
// order the generation prompt lists them.
inline constexpr std::array<ElementCategory, 6> kMergedCategories = {
    ElementCategory::kTitle,  ElementCategory::kSection,
    ElementCategory::kText,   ElementCategory::kFigure,
    ElementCategory::kTable,  ElementCategory::kCaption,
};

// Display name, e.g. "Author Info".
std::string_view CategoryName(ElementCategory category);
// CSS class name used in the HTML codec, e.g. "AuthorInfo".
std::string_view CategoryHtmlClass(ElementCategory category);
// Accepts either the display name or the HTML class name.
std::optional<ElementCategory> ParseCategory(std::string_view name);

// AuthorInfo -> Text, List -> Text, everything else unchanged.
ElementCategory MergeCategory(ElementCategory category);

// Position of a merged category within kMergedCategories.
int MergedCategoryIndex(ElementCategory category);

// Bounding box in canvas-normalized coordinates.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double Area() const { return w * h; }
  bool IsValid() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Element {
  ElementCategory category = ElementCategory::kText;
  BBox bbox;

  friend bool operator==(const Element&, const Element&) = default;
};

struct Layout {
  int canvas_w = 1;
  int canvas_h = 1;
  std::vector<Element> elements;

  bool empty() const { return elements.empty(); }
  std::size_t size() const { return elements.size(); }

  friend bool operator==(const Layout&, const Layout&) = default;
};

struct SectionLength {
  std::string name;
  int chars = 0;

  friend bool operator==(const SectionLength&, const SectionLength&) = default;
};

// Summary statistics of a paper: counts, character lengths and figure/table
// aspect ratios. figure_areas / table_areas are optional page-normalized
// areas; when present they have one entry per figure / table.
struct PaperStructure {
  int n_sections = 0;
  int n_captions = 0;
  int n_figures = 0;
  int n_tables = 0;
  int title_chars = 0;
  int author_chars = 0;
  int abstract_chars = 0;
  std::vector<SectionLength> section_chars;
  std::vector<double> figure_aspects;
  std::vector<double> table_aspects;
  std::vector<double> figure_areas;
  std::vector<double> table_areas;

  bool IsValid() const;
  long TotalChars() const;

  friend bool operator==(const PaperStructure&,
                         const PaperStructure&) = default;
};

// Intersection over union. Areas are computed from corner coordinates so
// that iou(a, a) is exactly 1.
double Iou(const BBox& a, const BBox& b);
double IntersectionArea(const BBox& a, const BBox& b);

struct CategoryArea {
  int count = 0;
  double area = 0.0;

  friend bool operator==(const CategoryArea&, const CategoryArea&) = default;
};

// Per merged category (indexed like kMergedCategories): element count and
// summed bbox area. Overlaps are not removed.
std::array<CategoryArea, 6> ElementAreaFractions(const Layout& layout);

// Element count per merged category.
std::array<int, 6> MergedCategoryCounts(const Layout& layout);

// Replaces AuthorInfo and List by Text. Element count and order preserved.
Layout NormalizeCategories(Layout layout);

// Returns the `n` largest elements (by area, ties by position) in their
// original order.
Layout LargestElements(const Layout& layout, std::size_t n);

}  // namespace posterlay

#endif  // POSTERLAY_LAYOUT_H_
