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

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include "posterlay/assignment.h"
#include "posterlay/error.h"
#include "posterlay/report.h"
#include "test_util.h"

namespace posterlay {
namespace {

using testing::OracleLtsim;
using testing::OracleMatchTotal;
using testing::OracleMiou;

constexpr ElementCategory kTitle = ElementCategory::kTitle;
constexpr ElementCategory kSection = ElementCategory::kSection;
constexpr ElementCategory kText = ElementCategory::kText;
constexpr ElementCategory kFigure = ElementCategory::kFigure;
constexpr ElementCategory kTable = ElementCategory::kTable;
constexpr ElementCategory kCaption = ElementCategory::kCaption;

Layout Shuffled(Layout layout, std::mt19937_64& rng) {
  std::shuffle(layout.elements.begin(), layout.elements.end(), rng);
  return layout;
}

TEST(Assignment, MatchesBruteForceOnRectangularMatrices) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = dim(rng), cols = dim(rng);
    WeightMatrix w(rows, cols);
    std::vector<std::vector<double>> dense(rows, std::vector<double>(cols));
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        // Sprinkle exact zeros to exercise ties.
        dense[r][c] = w.at(r, c) = val(rng) < 0.3 ? 0.0 : val(rng);
      }
    }
    const std::vector<int> assignment = MaxWeightAssignment(w);
    std::set<int> used;
    double total = 0.0;
    int matched = 0;
    for (int r = 0; r < rows; ++r) {
      if (assignment[r] < 0) continue;
      EXPECT_TRUE(used.insert(assignment[r]).second);
      total += w.at(r, assignment[r]);
      ++matched;
    }
    EXPECT_EQ(matched, std::min(rows, cols));
    EXPECT_NEAR(total, testing::BruteForceAssignment(dense), 1e-12);
  }
}

TEST(LayoutMatchScore, IdenticalIsOneUnderAllNormalizers) {
  std::mt19937_64 rng(2);
  const Layout layout = testing::RandomLayout(rng, 10);
  for (Normalizer n : {Normalizer::kMax, Normalizer::kLeft, Normalizer::kMatched}) {
    EXPECT_EQ(LayoutMatchScore(layout, layout, n).first, 1.0);
  }
}

TEST(LayoutMatchScore, DisjointCategoriesScoreZero) {
  const Layout figures{100, 100, {{kFigure, {0, 0, 0.5, 0.5}},
                                  {kFigure, {0.5, 0.5, 0.5, 0.5}}}};
  const Layout texts{100, 100, {{kText, {0, 0, 0.5, 0.5}},
                                {kText, {0.5, 0.5, 0.5, 0.5}}}};
  const auto [score, match] = LayoutMatchScore(figures, texts, Normalizer::kMax);
  EXPECT_EQ(score, 0.0);
  EXPECT_TRUE(match.pairs.empty());
  EXPECT_EQ(LayoutMatchScore(figures, texts, Normalizer::kMatched).first, 0.0);
}

TEST(LayoutMatchScore, EmptyCases) {
  const Layout empty{100, 100, {}};
  const Layout one{100, 100, {{kText, {0, 0, 0.5, 0.5}}}};
  EXPECT_EQ(LayoutMatchScore(empty, empty, Normalizer::kMax).first, 1.0);
  EXPECT_EQ(LayoutMatchScore(empty, one, Normalizer::kMax).first, 0.0);
  EXPECT_EQ(LayoutMatchScore(one, empty, Normalizer::kLeft).first, 0.0);
  EXPECT_EQ(Miou(empty, one), 0.0);
  EXPECT_EQ(Miou(one, empty), 0.0);
  EXPECT_EQ(Ltsim(empty, empty), 1.0);
}

TEST(LayoutMatchScore, NormalizersDifferOnCountMismatch) {
  const Layout a{100, 100, {{kText, {0, 0, 0.5, 0.5}}}};
  const Layout b{100, 100, {{kText, {0, 0, 0.5, 0.5}}, {kFigure, {0.5, 0.5, 0.2, 0.2}}}};
  EXPECT_DOUBLE_EQ(LayoutMatchScore(a, b, Normalizer::kMax).first, 0.5);
  EXPECT_DOUBLE_EQ(LayoutMatchScore(a, b, Normalizer::kLeft).first, 1.0);
  EXPECT_DOUBLE_EQ(LayoutMatchScore(a, b, Normalizer::kMatched).first, 1.0);
}

TEST(LayoutMatchScore, MatchResultInvariants) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Layout a = testing::RandomLayout(rng, 8);
    const Layout b = testing::RandomLayout(rng, 9);
    const auto [score, match] = LayoutMatchScore(a, b, Normalizer::kMax);
    std::set<int> ia, ib;
    double sum = 0.0;
    for (const MatchedPair& p : match.pairs) {
      EXPECT_TRUE(ia.insert(p.a_index).second);
      EXPECT_TRUE(ib.insert(p.b_index).second);
      EXPECT_EQ(MergeCategory(a.elements[p.a_index].category),
                MergeCategory(b.elements[p.b_index].category));
      EXPECT_EQ(p.iou, Iou(a.elements[p.a_index].bbox, b.elements[p.b_index].bbox));
      sum += p.iou;
    }
    EXPECT_NEAR(sum, match.total, 1e-12);
    EXPECT_GE(score, 0.0);
    EXPECT_LE(score, 1.0);
  }
}

TEST(Miou, MatchesPermutationOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 250; ++trial) {
    const Layout pred = testing::RandomLayoutPerCategory(rng, 6, 6);
    const Layout gold = testing::RandomLayoutPerCategory(rng, 6, 6);
    EXPECT_NEAR(Miou(pred, gold), OracleMiou(pred, gold), 1e-12);
    EXPECT_NEAR(Ltsim(pred, gold), OracleLtsim(pred, gold), 1e-12);
  }
}

TEST(Miou, InvariantUnderElementOrder) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Layout pred = testing::RandomLayout(rng, 12);
    const Layout gold = testing::RandomLayout(rng, 10);
    const double base = Miou(pred, gold);
    EXPECT_NEAR(Miou(Shuffled(pred, rng), Shuffled(gold, rng)), base, 1e-12);
  }
}

TEST(Miou, MergedCategoriesCompareEqual) {
  const Layout pred{100, 100, {{ElementCategory::kList, {0, 0, 0.5, 0.5}}}};
  const Layout gold{100, 100, {{kText, {0, 0, 0.5, 0.5}}}};
  EXPECT_EQ(Miou(pred, gold), 1.0);
}

TEST(Ltsim, MatchesUnconstrainedOracleOnSmallLayouts) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> count(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const Layout a = testing::RandomLayout(rng, count(rng), true);
    const Layout b = testing::RandomLayout(rng, count(rng), true);
    double expected = 1.0;
    if (!a.empty() || !b.empty()) {
      expected = (a.empty() || b.empty())
                     ? 0.0
                     : 2.0 * testing::OracleFullMatchTotal(a, b) /
                           static_cast<double>(a.size() + b.size());
    }
    EXPECT_NEAR(Ltsim(a, b), expected, 1e-12);
  }
}

TEST(Ltsim, IdenticalAndDisjoint) {
  std::mt19937_64 rng(7);
  const Layout layout = testing::RandomLayout(rng, 15);
  EXPECT_EQ(Ltsim(layout, layout), 1.0);
  const Layout figs{100, 100, {{kFigure, {0, 0, 0.5, 0.5}}}};
  const Layout tabs{100, 100, {{kTable, {0, 0, 0.5, 0.5}}}};
  EXPECT_EQ(Ltsim(figs, tabs), 0.0);
}

TEST(MaxIou, Behaviour) {
  std::mt19937_64 rng(8);
  const Layout cand = testing::RandomLayout(rng, 5);
  std::vector<Layout> refs = {testing::RandomLayout(rng, 5),
                              testing::RandomLayout(rng, 7),
                              testing::RandomLayout(rng, 4)};
  double expected = 0.0;
  for (const Layout& r : refs) {
    expected = std::max(expected, OracleMatchTotal(cand, r) /
                                      std::max(cand.size(), r.size()));
  }
  EXPECT_NEAR(MaxIou(cand, refs), expected, 1e-12);
  EXPECT_EQ(MaxIou(cand, std::span<const Layout>(refs.data(), 1)),
            LayoutMatchScore(cand, refs[0], Normalizer::kMax).first);
  refs.push_back(cand);
  EXPECT_EQ(MaxIou(cand, refs), 1.0);
  EXPECT_THROW(MaxIou(cand, std::span<const Layout>()), Error);
}

Layout WithCounts(const std::array<int, 6>& counts) {
  Layout layout{100, 100, {}};
  for (int k = 0; k < 6; ++k) {
    for (int i = 0; i < counts[k]; ++i) {
      layout.elements.push_back({kMergedCategories[k], {0.01 * i, 0.0, 0.01, 0.01}});
    }
  }
  return layout;
}

TEST(TcMetrics, IdenticalIsZero) {
  const Layout layout = WithCounts({1, 3, 4, 2, 1, 2});
  const TypeCount tc = TcMetrics(layout, layout);
  EXPECT_EQ(tc.mean, 0.0);
  EXPECT_EQ(tc.std, 0.0);
}

TEST(TcMetrics, HandComputedDeltas) {
  // Delta = gold - pred = (0, 0, 1, -1, 0, 2) over
  // (Title, Section, Text, Figure, Table, Caption).
  const Layout gold = WithCounts({1, 2, 3, 1, 1, 2});
  const Layout pred = WithCounts({1, 2, 2, 2, 1, 0});
  const TypeCount tc = TcMetrics(pred, gold);
  // mean = 2/6; variance = (1+1+4+16+1+25)/9/6 = 8/9.
  EXPECT_NEAR(tc.mean, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(tc.std, std::sqrt(8.0 / 9.0), 1e-12);
  EXPECT_NEAR(tc.std, 0.9428090415820634, 1e-12);
}

TEST(TcMetrics, SixTextAgainstEmpty) {
  const Layout gold = WithCounts({0, 0, 6, 0, 0, 0});
  const TypeCount tc = TcMetrics(Layout{100, 100, {}}, gold);
  EXPECT_NEAR(tc.mean, 1.0, 1e-12);
  EXPECT_NEAR(tc.std, std::sqrt(5.0), 1e-12);
}

TEST(TcMetrics, SwapAndPositionProperties) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Layout a = testing::RandomLayout(rng, 10);
    const Layout b = testing::RandomLayout(rng, 7);
    const TypeCount ab = TcMetrics(a, b);
    const TypeCount ba = TcMetrics(b, a);
    EXPECT_EQ(ab.mean, -ba.mean);
    EXPECT_NEAR(ab.std, ba.std, 1e-12);
    Layout moved = a;
    for (Element& e : moved.elements) e.bbox = testing::RandomBox(rng);
    const TypeCount mb = TcMetrics(moved, b);
    EXPECT_EQ(mb.mean, ab.mean);
    EXPECT_EQ(mb.std, ab.std);
  }
}

TEST(TcMetrics, EmptyCategorySet) {
  const Layout layout{100, 100, {}};
  EXPECT_THROW(TcMetrics(layout, layout, std::span<const ElementCategory>()),
               Error);
}

TEST(Overlap, Cases) {
  const Layout grid{100, 100, {{kText, {0, 0, 0.5, 0.5}},
                               {kText, {0.5, 0, 0.5, 0.5}},
                               {kFigure, {0, 0.5, 0.5, 0.5}},
                               {kFigure, {0.5, 0.5, 0.5, 0.5}}}};
  EXPECT_EQ(Overlap(grid), 0.0);
  const Layout twins{100, 100, {{kText, {0.1, 0.1, 0.3, 0.3}},
                                {kFigure, {0.1, 0.1, 0.3, 0.3}}}};
  EXPECT_NEAR(Overlap(twins), 0.5, 1e-15);
  EXPECT_EQ(Overlap(Layout{100, 100, {{kText, {0, 0, 1, 1}}}}), 0.0);
  EXPECT_EQ(Overlap(Layout{100, 100, {}}), 0.0);
}

TEST(Alignment, Cases) {
  const Layout column{100, 100, {{kText, {0.1, 0.0, 0.3, 0.2}},
                                 {kText, {0.1, 0.3, 0.3, 0.2}},
                                 {kFigure, {0.1, 0.6, 0.3, 0.2}}}};
  EXPECT_EQ(Alignment(column), 0.0);
  EXPECT_EQ(Alignment(Layout{100, 100, {{kText, {0.2, 0.2, 0.1, 0.1}}}}), 0.0);
  const Layout offset{100, 100, {{kText, {0.1, 0.1, 0.2, 0.2}},
                                 {kText, {0.2, 0.2, 0.2, 0.2}}}};
  EXPECT_NEAR(Alignment(offset), -std::log(0.9), 1e-12);
  EXPECT_NEAR(Alignment(offset), 0.10536051565782628, 1e-12);
}

TEST(OverlapAlignment, ScaleInvariant) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Layout layout = testing::RandomLayout(rng, 8);
    const double ov = Overlap(layout), al = Alignment(layout);
    layout.canvas_w *= 3;
    layout.canvas_h *= 2;
    EXPECT_EQ(Overlap(layout), ov);
    EXPECT_EQ(Alignment(layout), al);
  }
}

TEST(Spearman, PerfectAndReversed) {
  const std::vector<double> xs = {1, 2, 3};
  const std::vector<double> ys = {10, 20, 30};
  const std::vector<double> rev = {30, 20, 10};
  EXPECT_NEAR(Spearman(xs, ys), 1.0, 1e-15);
  EXPECT_NEAR(Spearman(xs, rev), -1.0, 1e-15);
}

// Direct definition: average ranks by counting, then Pearson.
double BruteForceSpearman(const std::vector<double>& xs,
                          const std::vector<double>& ys) {
  const auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double u : v) {
        if (u < v[i]) ++less;
        if (u == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(xs), ry = ranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(Spearman, TiesMatchBruteForceRanks) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> small(0, 4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(15), ys(15);
    for (auto& x : xs) x = small(rng);
    for (auto& y : ys) y = small(rng);
    xs[0] = -1;  // never constant
    ys[1] = -1;
    EXPECT_NEAR(Spearman(xs, ys), BruteForceSpearman(xs, ys), 1e-9);
  }
  const std::vector<double> tied = {1, 2, 2, 3};
  const std::vector<double> ranks = AverageRanks(tied);
  EXPECT_EQ(ranks, (std::vector<double>{1.0, 2.5, 2.5, 4.0}));
}

TEST(Spearman, MonotoneTransformIsOne) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal;
  std::vector<double> xs(200), ys(200);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = normal(rng);
    ys[i] = std::exp(3.0 * xs[i]) + 5.0;
  }
  EXPECT_NEAR(Spearman(xs, ys), 1.0, 1e-12);
}

TEST(Spearman, Errors) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {1, 2};
  const std::vector<double> constant = {4, 4, 4};
  try {
    Spearman(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
  try {
    Spearman(a, constant);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateInput);
  }
}

TEST(Evaluate, IdenticalLayoutsAndReportFormat) {
  const Layout layout{100, 100, {{kTitle, {0, 0, 1, 0.1}},
                                 {kSection, {0, 0.1, 0.5, 0.05}},
                                 {kCaption, {0.5, 0.1, 0.5, 0.05}}}};
  const MetricsReport r = Evaluate(layout, layout);
  EXPECT_EQ(r.miou, 1.0);
  EXPECT_EQ(r.ltsim, 1.0);
  EXPECT_EQ(r.tc_mean, 0.0);
  EXPECT_EQ(r.tc_std, 0.0);
  EXPECT_FALSE(r.max_iou.has_value());
  EXPECT_EQ(ReportToJson(r).dump(),
            R"({"miou":1.0,"ltsim":1.0,"tc_mean":0.0,"tc_std":0.0,"overlap":0.0,"alignment":0.0})");
  EXPECT_EQ(ReportCsvRow("p1", r), "p1,1,1,0,0,0,0,");
}

}  // namespace
}  // namespace posterlay
