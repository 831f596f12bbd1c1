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
#include "posterlay/metrics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "posterlay/assignment.h"
#include "posterlay/error.h"

namespace posterlay {

namespace {

constexpr double kAlignmentEpsilon = 1e-6;

std::array<std::vector<int>, 6> IndicesByMergedCategory(const Layout& layout) {
  std::array<std::vector<int>, 6> groups;
  for (int i = 0; i < static_cast<int>(layout.elements.size()); ++i) {
    groups[MergedCategoryIndex(layout.elements[i].category)].push_back(i);
  }
  return groups;
}

MatchResult MatchByCategory(const Layout& a, const Layout& b) {
  const auto groups_a = IndicesByMergedCategory(a);
  const auto groups_b = IndicesByMergedCategory(b);
  MatchResult result;
  for (std::size_t k = 0; k < groups_a.size(); ++k) {
    const std::vector<int>& ia = groups_a[k];
    const std::vector<int>& ib = groups_b[k];
    if (ia.empty() || ib.empty()) continue;
    WeightMatrix w(static_cast<int>(ia.size()), static_cast<int>(ib.size()));
    for (int r = 0; r < w.rows; ++r) {
      for (int c = 0; c < w.cols; ++c) {
        w.at(r, c) = Iou(a.elements[ia[r]].bbox, b.elements[ib[c]].bbox);
      }
    }
    const std::vector<int> assignment = MaxWeightAssignment(w);
    for (int r = 0; r < w.rows; ++r) {
      if (assignment[r] < 0) continue;
      const double iou = w.at(r, assignment[r]);
      result.pairs.push_back({ia[r], ib[assignment[r]], iou});
      result.total += iou;
    }
  }
  return result;
}

// Six alignment anchors per box: left, x-center, right, top, y-center, bottom.
std::array<double, 6> AlignmentAnchors(const BBox& b) {
  return {b.x, b.x + b.w / 2.0, b.right(), b.y, b.y + b.h / 2.0, b.bottom()};
}

double Mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::pair<double, MatchResult> LayoutMatchScore(const Layout& a,
                                                const Layout& b,
                                                Normalizer normalizer) {
  if (a.empty() && b.empty()) return {1.0, MatchResult{}};
  if (a.empty() || b.empty()) return {0.0, MatchResult{}};
  MatchResult match = MatchByCategory(a, b);
  double denom = 0.0;
  switch (normalizer) {
    case Normalizer::kMax:
      denom = static_cast<double>(std::max(a.size(), b.size()));
      break;
    case Normalizer::kLeft:
      denom = static_cast<double>(a.size());
      break;
    case Normalizer::kMatched:
      denom = static_cast<double>(match.pairs.size());
      break;
  }
  const double score = denom > 0.0 ? match.total / denom : 0.0;
  return {std::clamp(score, 0.0, 1.0), std::move(match)};
}

double Miou(const Layout& pred, const Layout& gold) {
  return LayoutMatchScore(gold, pred, Normalizer::kMax).first;
}

double MaxIou(const Layout& candidate, std::span<const Layout> references,
              Normalizer normalizer) {
  if (references.empty()) {
    throw Error(ErrorCode::kEmptyReferenceSet, "max_iou needs references");
  }
  double best = 0.0;
  for (const Layout& ref : references) {
    best = std::max(best, LayoutMatchScore(candidate, ref, normalizer).first);
  }
  return best;
}

double Ltsim(const Layout& a, const Layout& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  // Single assignment over all cross pairs; cross-category similarity is 0.
  WeightMatrix w(static_cast<int>(a.size()), static_cast<int>(b.size()));
  for (int r = 0; r < w.rows; ++r) {
    for (int c = 0; c < w.cols; ++c) {
      const Element& ea = a.elements[r];
      const Element& eb = b.elements[c];
      if (MergeCategory(ea.category) == MergeCategory(eb.category)) {
        w.at(r, c) = Iou(ea.bbox, eb.bbox);
      }
    }
  }
  const std::vector<int> assignment = MaxWeightAssignment(w);
  double total = 0.0;
  for (int r = 0; r < w.rows; ++r) {
    if (assignment[r] >= 0) total += w.at(r, assignment[r]);
  }
  const double score =
      2.0 * total / static_cast<double>(a.size() + b.size());
  return std::clamp(score, 0.0, 1.0);
}

TypeCount TcMetrics(const Layout& pred, const Layout& gold,
                    std::span<const ElementCategory> categories) {
  if (categories.empty()) {
    throw Error(ErrorCode::kEmptyCategorySet, "tc metrics need categories");
  }
  const auto count = [](const Layout& layout, ElementCategory k) {
    return std::count_if(
        layout.elements.begin(), layout.elements.end(),
        [&](const Element& e) { return MergeCategory(e.category) == k; });
  };
  std::vector<double> deltas;
  deltas.reserve(categories.size());
  for (ElementCategory k : categories) {
    const ElementCategory merged = MergeCategory(k);
    deltas.push_back(static_cast<double>(count(gold, merged)) -
                     static_cast<double>(count(pred, merged)));
  }
  TypeCount tc;
  tc.mean = Mean(deltas);
  double ss = 0.0;
  for (double d : deltas) ss += (d - tc.mean) * (d - tc.mean);
  tc.std = std::sqrt(ss / static_cast<double>(deltas.size()));
  return tc;
}

double Overlap(const Layout& layout) {
  const auto& el = layout.elements;
  if (el.size() < 2) return 0.0;
  double inter = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < el.size(); ++i) {
    area += el[i].bbox.Area();
    for (std::size_t j = i + 1; j < el.size(); ++j) {
      inter += IntersectionArea(el[i].bbox, el[j].bbox);
    }
  }
  return area > 0.0 ? inter / area : 0.0;
}

double Alignment(const Layout& layout) {
  const auto& el = layout.elements;
  if (el.size() < 2) return 0.0;
  std::vector<std::array<double, 6>> anchors;
  anchors.reserve(el.size());
  for (const Element& e : el) anchors.push_back(AlignmentAnchors(e.bbox));
  double sum = 0.0;
  for (std::size_t i = 0; i < el.size(); ++i) {
    double d = 1.0;
    for (std::size_t j = 0; j < el.size(); ++j) {
      if (i == j) continue;
      for (int axis = 0; axis < 6; ++axis) {
        d = std::min(d, std::abs(anchors[i][axis] - anchors[j][axis]));
      }
    }
    sum += -std::log(1.0 - std::min(d, 1.0 - kAlignmentEpsilon));
  }
  return sum / static_cast<double>(el.size());
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double Spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(xs.size()) + " vs " + std::to_string(ys.size()));
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "need at least two observations");
  }
  const std::vector<double> rx = AverageRanks(xs);
  const std::vector<double> ry = AverageRanks(ys);
  const double mx = Mean(rx);
  const double my = Mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateInput, "constant input vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricsReport Evaluate(const Layout& pred, const Layout& gold,
                       std::span<const Layout> references) {
  MetricsReport report;
  report.miou = Miou(pred, gold);
  report.ltsim = Ltsim(pred, gold);
  const TypeCount tc = TcMetrics(pred, gold);
  report.tc_mean = tc.mean;
  report.tc_std = tc.std;
  report.overlap = Overlap(pred);
  report.alignment = Alignment(pred);
  if (!references.empty()) report.max_iou = MaxIou(pred, references);
  return report;
}

}  // namespace posterlay
