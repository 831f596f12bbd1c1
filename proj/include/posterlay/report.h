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
#ifndef POSTERLAY_REPORT_H_
#define POSTERLAY_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "posterlay/metrics.h"

namespace posterlay {

// Field order is fixed: miou, ltsim, tc_mean, tc_std, overlap, alignment,
// max_iou (when set). LTSim is our matching-based formulation.
nlohmann::ordered_json ReportToJson(const MetricsReport& report);

std::string ReportCsvHeader();
// Keyed by pair id; max_iou left empty when unset.
std::string ReportCsvRow(const std::string& pair_id,
                         const MetricsReport& report);

// Fixed-width text table, one row per (id, report).
std::string ReportTable(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

// Shortest round-trip decimal representation.
std::string FormatDouble(double v);

}  // namespace posterlay

#endif  // POSTERLAY_REPORT_H_
