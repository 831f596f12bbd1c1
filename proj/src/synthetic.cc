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
#include "posterlay/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace posterlay {
namespace {

constexpr double kMargin = 0.02;
constexpr double kColumnGap = 0.015;
constexpr double kBlockGap = 0.008;
constexpr double kBodyTop = 0.14;
constexpr double kBodyBottom = 0.98;
constexpr double kSectionHeight = 0.025;
constexpr double kCaptionHeight = 0.018;

const char* const kSectionNames[] = {
    "Introduction", "Related Work", "Method",     "Experiments",
    "Results",      "Discussion",   "Analysis",   "Limitations",
    "Conclusion",   "Background",   "Evaluation", "Ablation"};

struct Block {
  ElementCategory category;
  double height;
};

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

int Perturb(std::mt19937_64& rng, int value, double noise, int lo) {
  if (Uniform(rng, 0.0, 1.0) >= noise) return value;
  const int delta = Uniform(rng, 0.0, 1.0) < 0.5 ? -1 : 1;
  return std::max(lo, value + delta);
}

PaperStructure SynthesizePaper(std::mt19937_64& rng, double t) {
  PaperStructure p;
  p.n_sections = UniformInt(rng, 3, 8);
  const double fig_level = 0.6 * (1.0 - t) + 0.4 * Uniform(rng, 0.0, 1.0);
  p.n_figures = std::clamp(static_cast<int>(std::lround(1 + 7 * fig_level)), 1, 8);
  p.n_tables = UniformInt(rng, 0, 3);
  p.n_captions = p.n_figures + p.n_tables;
  p.title_chars = UniformInt(rng, 40, 150);
  p.author_chars = UniformInt(rng, 30, 300);
  p.abstract_chars =
      static_cast<int>(800 + 1200 * t + Uniform(rng, -100.0, 100.0));
  const double body = (4000 + 26000 * t) * std::exp(Uniform(rng, -0.15, 0.15));
  std::vector<double> weights(p.n_sections);
  for (double& w : weights) w = Uniform(rng, 0.5, 1.5);
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> name_order(std::size(kSectionNames));
  std::iota(name_order.begin(), name_order.end(), 0);
  std::shuffle(name_order.begin(), name_order.end(), rng);
  for (int i = 0; i < p.n_sections; ++i) {
    p.section_chars.push_back(
        {kSectionNames[name_order[i]],
         std::max(1, static_cast<int>(body * weights[i] / wsum))});
  }
  for (int i = 0; i < p.n_figures; ++i) {
    p.figure_aspects.push_back(std::exp(Uniform(rng, -0.5, 0.8)));
    p.figure_areas.push_back(Uniform(rng, 0.03, 0.3));
  }
  for (int i = 0; i < p.n_tables; ++i) {
    p.table_aspects.push_back(std::exp(Uniform(rng, 0.2, 1.2)));
    p.table_areas.push_back(Uniform(rng, 0.05, 0.25));
  }
  return p;
}

// Packs blocks top-to-bottom into columns, scaling heights down until the
// last column fits.
std::vector<Element> PackColumns(const std::vector<Block>& blocks, int cols) {
  const double col_w = (1.0 - 2 * kMargin - (cols - 1) * kColumnGap) / cols;
  double scale = 1.0;
  for (int attempt = 0;; ++attempt) {
    std::vector<Element> out;
    int col = 0;
    double y = kBodyTop;
    bool overflow = false;
    for (const Block& b : blocks) {
      const double h = b.height * scale;
      if (y + h > kBodyBottom + 1e-12 && y > kBodyTop && col + 1 < cols) {
        ++col;
        y = kBodyTop;
      }
      if (y + h > kBodyBottom + 1e-12) overflow = true;
      const double x = kMargin + col * (col_w + kColumnGap);
      out.push_back({b.category, {x, y, col_w, std::min(h, kBodyBottom - y)}});
      y += h + kBlockGap;
    }
    if (!overflow || attempt >= 40) return out;
    scale *= 0.93;
  }
}

Layout SynthesizeGold(std::mt19937_64& rng, const PaperStructure& paper,
                      double t, const SynthOptions& options) {
  const bool portrait = Uniform(rng, 0.0, 1.0) < options.portrait_fraction;
  Layout layout;
  layout.canvas_w = portrait ? 2560 : 5120;
  layout.canvas_h = portrait ? 3620 : 2560;
  const int cols = portrait ? 2 : 4;
  const double canvas_aspect =
      static_cast<double>(layout.canvas_w) / layout.canvas_h;
  const double col_w = (1.0 - 2 * kMargin - (cols - 1) * kColumnGap) / cols;

  const int n_sections = Perturb(rng, paper.n_sections, options.count_noise, 1);
  const int n_figures = Perturb(rng, paper.n_figures, options.count_noise, 0);
  const int n_tables = Perturb(rng, paper.n_tables, options.count_noise, 0);

  const double capacity = cols * (kBodyBottom - kBodyTop) * 0.85;
  const double text_share = 0.2 + 0.6 * t;
  const double fixed = n_sections * (kSectionHeight + kBlockGap) +
                       (n_figures + n_tables) * (kCaptionHeight + kBlockGap);
  const double free_space = std::max(0.1, capacity - fixed);

  std::vector<double> text_weights(n_sections);
  for (double& w : text_weights) w = Uniform(rng, 0.6, 1.4);
  const double tw = std::accumulate(text_weights.begin(), text_weights.end(), 0.0);

  std::vector<double> visual_h;
  std::vector<ElementCategory> visual_cat;
  for (int i = 0; i < n_figures; ++i) {
    const double aspect = i < static_cast<int>(paper.figure_aspects.size())
                              ? paper.figure_aspects[i]
                              : 1.3;
    visual_h.push_back(col_w * canvas_aspect / aspect);
    visual_cat.push_back(ElementCategory::kFigure);
  }
  for (int i = 0; i < n_tables; ++i) {
    const double aspect = i < static_cast<int>(paper.table_aspects.size())
                              ? paper.table_aspects[i]
                              : 2.0;
    visual_h.push_back(col_w * canvas_aspect / aspect);
    visual_cat.push_back(ElementCategory::kTable);
  }
  const double natural = std::accumulate(visual_h.begin(), visual_h.end(), 0.0);
  const double visual_space =
      visual_h.empty() ? 0.0 : free_space * (1.0 - text_share);
  const double text_space =
      visual_h.empty() ? free_space : free_space * text_share;

  // Visuals are distributed round-robin after the sections' text.
  std::vector<std::vector<int>> visuals_of(n_sections);
  for (std::size_t v = 0; v < visual_h.size(); ++v) {
    visuals_of[v % n_sections].push_back(static_cast<int>(v));
  }
  std::vector<Block> blocks;
  for (int s = 0; s < n_sections; ++s) {
    blocks.push_back({ElementCategory::kSection, kSectionHeight});
    const double h = text_space * text_weights[s] / tw;
    if (h > 0.06 && Uniform(rng, 0.0, 1.0) < 0.3) {
      const double split = Uniform(rng, 0.4, 0.7);
      blocks.push_back({ElementCategory::kText, h * split});
      blocks.push_back({ElementCategory::kList, h * (1.0 - split) - kBlockGap});
    } else {
      blocks.push_back({ElementCategory::kText, h});
    }
    for (int v : visuals_of[s]) {
      blocks.push_back({visual_cat[v], visual_space * visual_h[v] / natural});
      blocks.push_back({ElementCategory::kCaption, kCaptionHeight});
    }
  }
  layout.elements.push_back(
      {ElementCategory::kTitle, {0.1, 0.02, 0.8, 0.06}});
  layout.elements.push_back(
      {ElementCategory::kAuthorInfo, {0.2, 0.09, 0.6, 0.035}});
  for (Element& e : PackColumns(blocks, cols)) {
    if (e.bbox.h > 1e-4) layout.elements.push_back(e);
  }
  return layout;
}

// Detector-style noise: jittered boxes, a few misses and some Text blocks
// detected as two stacked fragments.
Layout SynthesizeSilver(std::mt19937_64& rng, const Layout& gold) {
  Layout silver{gold.canvas_w, gold.canvas_h, {}};
  for (const Element& e : gold.elements) {
    if (Uniform(rng, 0.0, 1.0) < 0.05) continue;
    BBox b = e.bbox;
    b.x = std::clamp(b.x + Uniform(rng, -0.004, 0.004), 0.0, 1.0 - b.w);
    b.y = std::clamp(b.y + Uniform(rng, -0.004, 0.004), 0.0, 1.0 - b.h);
    b.w = std::min(b.w * Uniform(rng, 0.97, 1.03), 1.0 - b.x);
    b.h = std::min(b.h * Uniform(rng, 0.97, 1.03), 1.0 - b.y);
    if (e.category == ElementCategory::kText && b.h > 0.05 &&
        Uniform(rng, 0.0, 1.0) < 0.3) {
      const double top = b.h * Uniform(rng, 0.3, 0.7);
      silver.elements.push_back({e.category, {b.x, b.y, b.w, top - 0.003}});
      silver.elements.push_back(
          {e.category, {b.x, b.y + top, b.w, b.h - top}});
      continue;
    }
    silver.elements.push_back({e.category, b});
  }
  return silver;
}

}  // namespace

PairRecord SynthesizeRecord(std::mt19937_64& rng, const std::string& id,
                            Split split, const SynthOptions& options) {
  PairRecord r;
  r.id = id;
  r.conference = "SYN";
  r.split = split;
  const double t = Uniform(rng, 0.0, 1.0);
  r.paper = SynthesizePaper(rng, t);
  const Layout gold = SynthesizeGold(rng, r.paper, t, options);
  r.silver_layout = SynthesizeSilver(rng, gold);
  if (split != Split::kTrain) r.gold_layout = gold;
  return r;
}

std::vector<PairRecord> SynthesizeCorpus(const SynthOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<PairRecord> out;
  const auto emit = [&](Split split, int n) {
    for (int i = 0; i < n; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "%s-%05d",
                    std::string(SplitName(split)).c_str(), i);
      out.push_back(SynthesizeRecord(rng, id, split, options));
    }
  };
  emit(Split::kTrain, options.n_train);
  emit(Split::kValid, options.n_valid);
  emit(Split::kTest, options.n_test);
  std::sort(out.begin(), out.end(),
            [](const PairRecord& a, const PairRecord& b) { return a.id < b.id; });
  return out;
}

}  // namespace posterlay
