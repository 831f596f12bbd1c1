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
#include "posterlay/report.h"

#include <charconv>
#include <cstdio>
#include <sstream>

namespace posterlay {

std::string FormatDouble(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

nlohmann::ordered_json ReportToJson(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["miou"] = report.miou;
  j["ltsim"] = report.ltsim;
  j["tc_mean"] = report.tc_mean;
  j["tc_std"] = report.tc_std;
  j["overlap"] = report.overlap;
  j["alignment"] = report.alignment;
  if (report.max_iou) j["max_iou"] = *report.max_iou;
  return j;
}

std::string ReportCsvHeader() {
  return "pair_id,miou,ltsim,tc_mean,tc_std,overlap,alignment,max_iou";
}

std::string ReportCsvRow(const std::string& pair_id,
                         const MetricsReport& report) {
  std::ostringstream os;
  os << pair_id << ',' << FormatDouble(report.miou) << ','
     << FormatDouble(report.ltsim) << ',' << FormatDouble(report.tc_mean)
     << ',' << FormatDouble(report.tc_std) << ','
     << FormatDouble(report.overlap) << ',' << FormatDouble(report.alignment)
     << ',';
  if (report.max_iou) os << FormatDouble(*report.max_iou);
  return os.str();
}

std::string ReportTable(
    const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %8s %8s %8s %8s %8s %9s %8s\n",
                "pair", "mIoU", "LTSim", "TC_mean", "TC_std", "overlap",
                "alignment", "MaxIoU");
  os << line;
  for (const auto& [id, r] : rows) {
    std::snprintf(line, sizeof(line),
                  "%-16s %8.3f %8.3f %8.3f %8.3f %8.3f %9.3f ", id.c_str(),
                  r.miou, r.ltsim, r.tc_mean, r.tc_std, r.overlap,
                  r.alignment);
    os << line;
    if (r.max_iou) {
      std::snprintf(line, sizeof(line), "%8.3f", *r.max_iou);
      os << line;
    } else {
      os << "       -";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace posterlay
