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
// Random generators and brute-force oracles shared by the test binaries.
// The oracles deliberately avoid the library's matcher and IoU code.
#ifndef POSTERLAY_TESTS_TEST_UTIL_H_
#define POSTERLAY_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <array>
#include <numeric>
#include <random>
#include <vector>

#include "posterlay/layout.h"

namespace posterlay::testing {

inline BBox RandomBox(std::mt19937_64& rng, double min_size = 0.02) {
  std::uniform_real_distribution<double> size(min_size, 0.6);
  const double w = size(rng);
  const double h = size(rng);
  std::uniform_real_distribution<double> px(0.0, 1.0 - w);
  std::uniform_real_distribution<double> py(0.0, 1.0 - h);
  return BBox{px(rng), py(rng), w, h};
}

inline ElementCategory RandomCategory(std::mt19937_64& rng,
                                      bool merged_only = false) {
  if (merged_only) {
    std::uniform_int_distribution<int> pick(0, 5);
    return kMergedCategories[pick(rng)];
  }
  std::uniform_int_distribution<int> pick(0, 7);
  return kAllCategories[pick(rng)];
}

inline Layout RandomLayout(std::mt19937_64& rng, int n,
                           bool merged_only = false, int canvas_w = 5120,
                           int canvas_h = 2560) {
  Layout layout{canvas_w, canvas_h, {}};
  for (int i = 0; i < n; ++i) {
    layout.elements.push_back({RandomCategory(rng, merged_only), RandomBox(rng)});
  }
  return layout;
}

// Layout with up to `max_per_category` elements in each of the given number
// of merged categories (drawn from the first `num_categories`).
inline Layout RandomLayoutPerCategory(std::mt19937_64& rng,
                                      int max_per_category,
                                      int num_categories) {
  Layout layout{3456, 2304, {}};
  std::uniform_int_distribution<int> count(0, max_per_category);
  for (int k = 0; k < num_categories; ++k) {
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      layout.elements.push_back({kMergedCategories[k], RandomBox(rng)});
    }
  }
  std::shuffle(layout.elements.begin(), layout.elements.end(), rng);
  return layout;
}

// IoU from explicit corner clipping.
inline double OracleIou(const BBox& a, const BBox& b) {
  const double ax2 = a.x + a.w, ay2 = a.y + a.h;
  const double bx2 = b.x + b.w, by2 = b.y + b.h;
  const double ix = std::max(0.0, std::min(ax2, bx2) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(ay2, by2) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter == 0.0) return 0.0;
  return inter / ((ax2 - a.x) * (ay2 - a.y) + (bx2 - b.x) * (by2 - b.y) - inter);
}

// Best total weight over all injective maps between the smaller and larger
// side, by enumerating permutations of the larger side.
inline double BruteForceAssignment(const std::vector<std::vector<double>>& w) {
  const int rows = static_cast<int>(w.size());
  if (rows == 0) return 0.0;
  const int cols = static_cast<int>(w[0].size());
  if (cols == 0) return 0.0;
  const bool transpose = rows > cols;
  const int small = transpose ? cols : rows;
  const int large = transpose ? rows : cols;
  std::vector<int> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (int s = 0; s < small; ++s) {
      total += transpose ? w[perm[s]][s] : w[s][perm[s]];
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Category-respecting brute-force matching total between two layouts.
inline double OracleMatchTotal(const Layout& a, const Layout& b) {
  double total = 0.0;
  for (ElementCategory k : kMergedCategories) {
    std::vector<const BBox*> ea, eb;
    for (const Element& e : a.elements) {
      if (MergeCategory(e.category) == k) ea.push_back(&e.bbox);
    }
    for (const Element& e : b.elements) {
      if (MergeCategory(e.category) == k) eb.push_back(&e.bbox);
    }
    if (ea.empty() || eb.empty()) continue;
    std::vector<std::vector<double>> w(ea.size(),
                                       std::vector<double>(eb.size()));
    for (std::size_t i = 0; i < ea.size(); ++i) {
      for (std::size_t j = 0; j < eb.size(); ++j) {
        w[i][j] = OracleIou(*ea[i], *eb[j]);
      }
    }
    total += BruteForceAssignment(w);
  }
  return total;
}

// Unconstrained brute force over all cross pairs with similarity
// [same category] * IoU. Only practical for small layouts.
inline double OracleFullMatchTotal(const Layout& a, const Layout& b) {
  std::vector<std::vector<double>> w(a.size(), std::vector<double>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const bool same = MergeCategory(a.elements[i].category) ==
                        MergeCategory(b.elements[j].category);
      w[i][j] = same ? OracleIou(a.elements[i].bbox, b.elements[j].bbox) : 0.0;
    }
  }
  return BruteForceAssignment(w);
}

inline double OracleMiou(const Layout& pred, const Layout& gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  return OracleMatchTotal(gold, pred) /
         static_cast<double>(std::max(pred.size(), gold.size()));
}

inline double OracleLtsim(const Layout& a, const Layout& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  return 2.0 * OracleMatchTotal(a, b) / static_cast<double>(a.size() + b.size());
}

}  // namespace posterlay::testing

#endif  // POSTERLAY_TESTS_TEST_UTIL_H_
