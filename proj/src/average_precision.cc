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
// COCO-style average precision for silver (detections) against gold
// (ground truth) layouts. Mirrors pycocotools' evaluateImg/accumulate with
// 101-point interpolated precision; crowd/ignore handling is not needed.
#include <algorithm>
#include <array>
#include <numeric>

#include "posterlay/error.h"
#include "posterlay/metrics.h"

namespace posterlay {

namespace {

constexpr int kNumGroups = 3;
constexpr int kNumThresholds = 10;  // 0.50, 0.55, ..., 0.95
constexpr int kNumRecallPoints = 101;

int GroupOf(ElementCategory c) {
  switch (c) {
    case ElementCategory::kFigure: return 0;
    case ElementCategory::kTable: return 1;
    default: return 2;
  }
}

struct Detection {
  double score;
  bool true_positive;
};

// Greedy matching of one image's detections (already in score order).
std::vector<Detection> MatchImage(const std::vector<BBox>& gts,
                                  const std::vector<BBox>& dts,
                                  double threshold) {
  std::vector<char> gt_taken(gts.size(), 0);
  std::vector<Detection> out;
  out.reserve(dts.size());
  for (const BBox& dt : dts) {
    double best_iou = std::min(threshold, 1.0 - 1e-10);
    int best = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g]) continue;
      const double iou = Iou(dt, gts[g]);
      if (iou < best_iou) continue;
      best_iou = iou;
      best = static_cast<int>(g);
    }
    if (best >= 0) gt_taken[best] = 1;
    out.push_back({dt.Area(), best >= 0});
  }
  return out;
}

double InterpolatedAp(std::vector<Detection> detections, int num_gt) {
  if (detections.empty()) return 0.0;
  std::stable_sort(detections.begin(), detections.end(),
                   [](const Detection& a, const Detection& b) {
                     return a.score > b.score;
                   });
  const std::size_t nd = detections.size();
  std::vector<double> recall(nd), precision(nd);
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < nd; ++i) {
    if (detections[i].true_positive) {
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    recall[i] = tp / num_gt;
    precision[i] = tp / (tp + fp);
  }
  for (std::size_t i = nd - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int k = 0; k < kNumRecallPoints; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[it - recall.begin()];
  }
  return sum / kNumRecallPoints;
}

}  // namespace

double MapSilverGold(std::span<const LayoutPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no layout pairs");

  // Per group, per image: gold boxes and silver boxes sorted by area.
  struct Image {
    std::vector<BBox> gts;
    std::vector<BBox> dts;
  };
  std::array<std::vector<Image>, kNumGroups> images;
  for (auto& g : images) g.resize(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const Element& e : pairs[p].gold.elements) {
      images[GroupOf(e.category)][p].gts.push_back(e.bbox);
    }
    for (const Element& e : pairs[p].silver.elements) {
      images[GroupOf(e.category)][p].dts.push_back(e.bbox);
    }
    for (auto& g : images) {
      std::stable_sort(g[p].dts.begin(), g[p].dts.end(),
                       [](const BBox& a, const BBox& b) {
                         return a.Area() > b.Area();
                       });
    }
  }

  double group_sum = 0.0;
  int valid_groups = 0;
  for (const auto& group : images) {
    int num_gt = 0;
    for (const Image& img : group) num_gt += static_cast<int>(img.gts.size());
    if (num_gt == 0) continue;  // undefined for this group, as in COCO
    double threshold_sum = 0.0;
    for (int t = 0; t < kNumThresholds; ++t) {
      const double threshold = 0.5 + 0.05 * t;
      std::vector<Detection> detections;
      for (const Image& img : group) {
        const auto matched = MatchImage(img.gts, img.dts, threshold);
        detections.insert(detections.end(), matched.begin(), matched.end());
      }
      threshold_sum += InterpolatedAp(std::move(detections), num_gt);
    }
    group_sum += threshold_sum / kNumThresholds;
    ++valid_groups;
  }
  return valid_groups > 0 ? group_sum / valid_groups : 0.0;
}

}  // namespace posterlay
