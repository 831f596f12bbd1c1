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
// JSON records for the core types. A layout is stored as
//
//   {"canvas": [w_px, h_px],
//    "elements": [{"category": "Title", "bbox": [x, y, w, h]}, ...]}
//
// with normalized bbox coordinates. from_json validates every invariant and
// throws Error{kInvalidArgument} on violation.
#ifndef POSTERLAY_JSON_IO_H_
#define POSTERLAY_JSON_IO_H_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "posterlay/layout.h"

namespace posterlay {

void to_json(nlohmann::json& j, const Element& e);
void from_json(const nlohmann::json& j, Element& e);
void to_json(nlohmann::json& j, const Layout& layout);
void from_json(const nlohmann::json& j, Layout& layout);
void to_json(nlohmann::json& j, const PaperStructure& paper);
void from_json(const nlohmann::json& j, PaperStructure& paper);

// Reads and parses a JSON file; throws Error{kIoError} when unreadable and
// Error{kInvalidArgument} when not JSON.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path,
                   const nlohmann::json& value);

Layout LayoutFromJson(const nlohmann::json& j);
PaperStructure PaperFromJson(const nlohmann::json& j);

}  // namespace posterlay

#endif  // POSTERLAY_JSON_IO_H_
