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
// HTML layout codec used inside generation prompts:
//
//   <div class='canvas' style='left: 0px; top: 0px; width: 5120px; height: 2560px'></div>
//   <div class='Title' style='left: 57px; top: 61px; width: 3306px; height: 76px;'></div>
//
// Pixel values are round-half-up of the normalized coordinate times the
// canvas dimension. The parser is lenient about quoting, whitespace,
// attribute order and surrounding prose, since its input is model output.
#ifndef POSTERLAY_HTML_CODEC_H_
#define POSTERLAY_HTML_CODEC_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "posterlay/layout.h"

namespace posterlay {

struct PixelBox {
  long left = 0;
  long top = 0;
  long width = 0;
  long height = 0;

  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};

long RoundHalfUp(double v);

PixelBox ToPixels(const BBox& box, int canvas_w, int canvas_h);

// The canvas div alone.
std::string SerializeCanvasDiv(int canvas_w, int canvas_h);

// One element div, with pixel coordinates on the given canvas.
std::string SerializeElementDiv(const Element& element, int canvas_w,
                                int canvas_h);

// Canvas div followed by one div per element, newline separated, no
// trailing newline.
std::string SerializeHtml(const Layout& layout);

struct ParseResult {
  Layout layout;
  // One entry per element that was dropped after clamping to the canvas.
  std::vector<std::string> warnings;
};

// Throws Error{kUnknownCategory | kMalformedStyle | kNoElements}.
ParseResult ParseHtml(std::string_view text,
                      std::pair<int, int> default_canvas);

}  // namespace posterlay

#endif  // POSTERLAY_HTML_CODEC_H_
