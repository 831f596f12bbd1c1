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
#include "posterlay/html_codec.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>
#include <sstream>

#include "posterlay/error.h"

namespace posterlay {

namespace {

const std::regex& DivTagRegex() {
  static const std::regex re(R"(<\s*div\b([^>]*)>)", std::regex::icase);
  return re;
}

std::regex AttributeRegex(const char* name) {
  return std::regex(
      std::string(R"((?:^|\s))") + name +
          R"re(\s*=\s*(?:'([^']*)'|"([^"]*)"|([^\s'">]+)))re",
      std::regex::icase);
}

std::regex StyleValueRegex(const char* key) {
  return std::regex(
      std::string(R"((?:^|[;\s]))") + key +
          R"(\s*:\s*([-+]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][-+]?[0-9]+)?)\s*(?:px)?)",
      std::regex::icase);
}

std::optional<std::string> FindAttribute(const std::string& attrs,
                                         const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(attrs, m, re)) return std::nullopt;
  for (int g = 1; g <= 3; ++g) {
    if (m[g].matched) return m[g].str();
  }
  return std::nullopt;
}

std::optional<double> FindStyleValue(const std::string& style,
                                     const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(style, m, re)) return std::nullopt;
  try {
    const double v = std::stod(m[1].str());
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

struct StyleBox {
  double left, top, width, height;
};

std::optional<StyleBox> ReadStyleBox(const std::string& attrs) {
  static const std::regex style_re = AttributeRegex("style");
  static const std::regex left_re = StyleValueRegex("left");
  static const std::regex top_re = StyleValueRegex("top");
  static const std::regex width_re = StyleValueRegex("width");
  static const std::regex height_re = StyleValueRegex("height");
  const std::optional<std::string> style = FindAttribute(attrs, style_re);
  if (!style) return std::nullopt;
  const auto left = FindStyleValue(*style, left_re);
  const auto top = FindStyleValue(*style, top_re);
  const auto width = FindStyleValue(*style, width_re);
  const auto height = FindStyleValue(*style, height_re);
  if (!left || !top || !width || !height) return std::nullopt;
  return StyleBox{*left, *top, *width, *height};
}

}  // namespace

long RoundHalfUp(double v) { return static_cast<long>(std::floor(v + 0.5)); }

PixelBox ToPixels(const BBox& box, int canvas_w, int canvas_h) {
  return PixelBox{RoundHalfUp(box.x * canvas_w), RoundHalfUp(box.y * canvas_h),
                  RoundHalfUp(box.w * canvas_w), RoundHalfUp(box.h * canvas_h)};
}

std::string SerializeCanvasDiv(int canvas_w, int canvas_h) {
  std::ostringstream os;
  os << "<div class='canvas' style='left: 0px; top: 0px; width: " << canvas_w
     << "px; height: " << canvas_h << "px'></div>";
  return os.str();
}

std::string SerializeElementDiv(const Element& element, int canvas_w,
                                int canvas_h) {
  const PixelBox px = ToPixels(element.bbox, canvas_w, canvas_h);
  std::ostringstream os;
  os << "<div class='" << CategoryHtmlClass(element.category)
     << "' style='left: " << px.left << "px; top: " << px.top
     << "px; width: " << px.width << "px; height: " << px.height
     << "px;'></div>";
  return os.str();
}

std::string SerializeHtml(const Layout& layout) {
  std::string out = SerializeCanvasDiv(layout.canvas_w, layout.canvas_h);
  for (const Element& e : layout.elements) {
    out += '\n';
    out += SerializeElementDiv(e, layout.canvas_w, layout.canvas_h);
  }
  return out;
}

ParseResult ParseHtml(std::string_view text,
                      std::pair<int, int> default_canvas) {
  const std::string input(text);
  struct RawElement {
    ElementCategory category;
    StyleBox box;
  };
  std::optional<std::pair<int, int>> canvas;
  std::vector<RawElement> raw;

  for (auto it = std::sregex_iterator(input.begin(), input.end(),
                                      DivTagRegex());
       it != std::sregex_iterator(); ++it) {
    const std::string attrs = (*it)[1].str();
    static const std::regex class_re = AttributeRegex("class");
    const std::optional<std::string> cls = FindAttribute(attrs, class_re);
    if (!cls) continue;
    const std::string name = Trim(*cls);
    if (name == "canvas") {
      if (canvas) continue;
      const std::optional<StyleBox> box = ReadStyleBox(attrs);
      if (box && box->width >= 1.0 && box->height >= 1.0) {
        canvas = std::make_pair(static_cast<int>(RoundHalfUp(box->width)),
                                static_cast<int>(RoundHalfUp(box->height)));
      }
      continue;
    }
    const std::optional<ElementCategory> category = ParseCategory(name);
    if (!category) throw Error(ErrorCode::kUnknownCategory, name);
    const std::optional<StyleBox> box = ReadStyleBox(attrs);
    if (!box) {
      throw Error(ErrorCode::kMalformedStyle,
                  "cannot read left/top/width/height for '" + name + "'");
    }
    raw.push_back({*category, *box});
  }

  ParseResult result;
  const auto [cw, ch] = canvas.value_or(default_canvas);
  if (cw <= 0 || ch <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "canvas must be positive");
  }
  result.layout.canvas_w = cw;
  result.layout.canvas_h = ch;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const StyleBox& b = raw[i].box;
    const double x0 = std::clamp(b.left, 0.0, static_cast<double>(cw));
    const double x1 = std::clamp(b.left + b.width, 0.0, static_cast<double>(cw));
    const double y0 = std::clamp(b.top, 0.0, static_cast<double>(ch));
    const double y1 = std::clamp(b.top + b.height, 0.0, static_cast<double>(ch));
    if (x1 <= x0 || y1 <= y0) {
      result.warnings.push_back("dropped zero-area " +
                                std::string(CategoryName(raw[i].category)) +
                                " element #" + std::to_string(i));
      continue;
    }
    BBox box{x0 / cw, y0 / ch, (x1 - x0) / cw, (y1 - y0) / ch};
    // Division can overshoot the right/bottom edge by an ulp.
    box.w = std::min(box.w, 1.0 - box.x);
    box.h = std::min(box.h, 1.0 - box.y);
    result.layout.elements.push_back({raw[i].category, box});
  }
  if (result.layout.elements.empty()) {
    throw Error(ErrorCode::kNoElements, "no element div could be parsed");
  }
  return result;
}

}  // namespace posterlay
