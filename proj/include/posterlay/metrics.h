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
// Layout comparison metrics. Every metric compares layouts under the merged
// six-category scheme; inputs are merged on the fly, so callers may pass
// either scheme.
#ifndef POSTERLAY_METRICS_H_
#define POSTERLAY_METRICS_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "posterlay/layout.h"

namespace posterlay {

struct MatchedPair {
  int a_index = 0;
  int b_index = 0;
  double iou = 0.0;
};

// Result of the category-constrained optimal assignment. Every same-category
// assignment is listed, including pairs whose IoU is 0.
struct MatchResult {
  std::vector<MatchedPair> pairs;
  double total = 0.0;
};

enum class Normalizer {
  kMax,      // max(|a|, |b|)
  kLeft,     // |a|
  kMatched,  // number of matched pairs
};

// Maximum-weight bipartite matching on IoU, solved exactly per merged
// category; score = total matched IoU / normalizer. Both empty -> 1, exactly
// one empty -> 0.
std::pair<double, MatchResult> LayoutMatchScore(const Layout& a,
                                                const Layout& b,
                                                Normalizer normalizer);

// Mean IoU against the gold layout, normalized by max(|gold|, |pred|).
double Miou(const Layout& pred, const Layout& gold);

// Max over references of LayoutMatchScore(candidate, ref, normalizer).
// Throws Error{kEmptyReferenceSet}.
double MaxIou(const Layout& candidate, std::span<const Layout> references,
              Normalizer normalizer = Normalizer::kMax);

// 2 * (max total of [same category] * IoU over all cross pairs)
//   / (|a| + |b|); both empty -> 1.
double Ltsim(const Layout& a, const Layout& b);

struct TypeCount {
  double mean = 0.0;
  double std = 0.0;
};

// Per category k: delta_k = count_gold(k) - count_pred(k); returns mean and
// population standard deviation over the category set. Throws
// Error{kEmptyCategorySet}.
TypeCount TcMetrics(const Layout& pred, const Layout& gold,
                    std::span<const ElementCategory> categories =
                        std::span<const ElementCategory>(kMergedCategories));

// Sum over unordered pairs of intersection area divided by summed area.
double Overlap(const Layout& layout);

// Mean of -log(1 - d_i) where d_i is the smallest distance between element
// i and any other element along the same axis line (left, center, right for
// x; top, middle, bottom for y).
double Alignment(const Layout& layout);

// Silver-vs-gold COCO-style mAP over IoU thresholds 0.50:0.05:0.95 and the
// element groups {figure, table, other text}. Silver elements are ranked by
// area. Throws Error{kEmptyInput}.
struct LayoutPair {
  Layout silver;
  Layout gold;
};
double MapSilverGold(std::span<const LayoutPair> pairs);

// Spearman rank correlation with average ranks for ties. Throws
// Error{kLengthMismatch} or Error{kDegenerateInput}.
double Spearman(std::span<const double> xs, std::span<const double> ys);

// Average ranks (1-based, ties share the mean rank).
std::vector<double> AverageRanks(std::span<const double> values);

struct MetricsReport {
  double miou = 0.0;
  double ltsim = 0.0;
  double tc_mean = 0.0;
  double tc_std = 0.0;
  double overlap = 0.0;
  double alignment = 0.0;
  std::optional<double> max_iou;
};

MetricsReport Evaluate(const Layout& pred, const Layout& gold,
                       std::span<const Layout> references = {});

}  // namespace posterlay

#endif  // POSTERLAY_METRICS_H_
