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
#include <random>

#include <gtest/gtest.h>
#include "posterlay/error.h"
#include "posterlay/metrics.h"
#include "test_util.h"

namespace posterlay {
namespace {

constexpr ElementCategory kText = ElementCategory::kText;
constexpr ElementCategory kSection = ElementCategory::kSection;
constexpr ElementCategory kFigure = ElementCategory::kFigure;
constexpr ElementCategory kTable = ElementCategory::kTable;
constexpr ElementCategory kCaption = ElementCategory::kCaption;

TEST(MapSilverGold, PerfectSilverIsOne) {
  std::mt19937_64 rng(1);
  std::vector<LayoutPair> pairs;
  for (int i = 0; i < 10; ++i) {
    const Layout gold = testing::RandomLayout(rng, 8);
    pairs.push_back({gold, gold});
  }
  EXPECT_DOUBLE_EQ(MapSilverGold(pairs), 1.0);
}

TEST(MapSilverGold, EmptySilverIsZero) {
  std::mt19937_64 rng(2);
  std::vector<LayoutPair> pairs;
  for (int i = 0; i < 5; ++i) {
    pairs.push_back({Layout{100, 100, {}}, testing::RandomLayout(rng, 6)});
  }
  EXPECT_EQ(MapSilverGold(pairs), 0.0);
}

TEST(MapSilverGold, EmptyInputThrows) {
  try {
    MapSilverGold({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

// Three-pair fixture tabulated by hand.
//
// Figure group (3 gold): silver detections ranked by area are
//   C (0.09, false positive, pair 2) then A' (0.0288, IoU 0.72 with A).
//   Thresholds 0.50..0.70: P/R after C = 0/0, after A' = 1/2 and 1/3.
//   Interpolated precision is 0.5 for recall points 0.00..0.33 (34 of 101)
//   -> AP = 17/101. Thresholds 0.75..0.95: no true positive -> 0.
//   Group AP = (5 * 17/101) / 10 = 8.5/101.
// Table group (1 gold): exact match -> AP 1 at every threshold.
// Other-text group (2 gold: Text X and Section Y in pair 2): one silver
//   Caption exactly on X -> P = 1 at R = 0.5 -> 51 of 101 points -> 51/101.
// mAP = (8.5/101 + 1 + 51/101) / 3.
TEST(MapSilverGold, HandTabulatedFixture) {
  const BBox a{0.0, 0.0, 0.2, 0.2};
  const BBox a_silver{0.0, 0.0, 0.2, 0.144};
  const BBox b{0.5, 0.5, 0.2, 0.2};
  const BBox c{0.0, 0.5, 0.3, 0.3};
  const BBox d{0.6, 0.0, 0.3, 0.3};
  const BBox t{0.3, 0.3, 0.2, 0.1};
  const BBox x{0.0, 0.0, 0.4, 0.1};
  const BBox y{0.0, 0.2, 0.4, 0.05};

  std::vector<LayoutPair> pairs(3);
  pairs[0].gold = {100, 100, {{kFigure, a}, {kTable, t}}};
  pairs[0].silver = {100, 100, {{kFigure, a_silver}, {kTable, t}}};
  pairs[1].gold = {100, 100, {{kFigure, b}, {kText, x}, {kSection, y}}};
  pairs[1].silver = {100, 100, {{kFigure, c}, {kCaption, x}}};
  pairs[2].gold = {100, 100, {{kFigure, d}}};
  pairs[2].silver = {100, 100, {}};

  ASSERT_NEAR(Iou(a, a_silver), 0.72, 1e-12);
  const double expected = (8.5 / 101.0 + 1.0 + 51.0 / 101.0) / 3.0;
  EXPECT_NEAR(MapSilverGold(pairs), expected, 1e-12);
}

TEST(MapSilverGold, LowerRankedDuplicateIsFalsePositive) {
  // Two detections on one gold: the larger one matches, the smaller is a
  // false positive after the single gold is consumed.
  const BBox g{0.1, 0.1, 0.4, 0.4};
  std::vector<LayoutPair> pairs(1);
  pairs[0].gold = {100, 100, {{kFigure, g}}};
  pairs[0].silver = {100, 100, {{kFigure, {0.1, 0.1, 0.1, 0.1}}, {kFigure, g}}};
  // Ranked: g (TP, P=1, R=1), small (FP) -> envelope keeps P=1 everywhere.
  EXPECT_DOUBLE_EQ(MapSilverGold(pairs), 1.0);
}

}  // namespace
}  // namespace posterlay
