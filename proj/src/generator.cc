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
#include "posterlay/generator.h"

#include <cstdio>
#include <sstream>

#include "posterlay/error.h"
#include "posterlay/html_codec.h"
#include "posterlay/metrics.h"

namespace posterlay {

namespace {

constexpr char kAutomaticTask[] =
    "Task: Layout generation conditioned on paper statistics.";
constexpr char kSemiAutomaticTask[] =
    "Task: Layout completion conditioned on partial layout and paper "
    "statistics.";
constexpr char kCategoryLine[] =
    "Please use layout element types: Title, Section, Text, Figure, Table, "
    "Caption.";
constexpr char kTargetLine[] = "Please generate a layout.";

std::string Aspect(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ", ";
    out += parts[i];
  }
  return out;
}

void AppendInput(std::ostringstream& os, int canvas_w, int canvas_h,
                 const Layout& constraints, int constraint_canvas_w,
                 int constraint_canvas_h) {
  os << "Input: \n    <html><body>\n        "
     << SerializeCanvasDiv(canvas_w, canvas_h) << '\n';
  for (const Element& e : constraints.elements) {
    const Element merged{MergeCategory(e.category), e.bbox};
    os << "        "
       << SerializeElementDiv(merged, constraint_canvas_w, constraint_canvas_h)
       << '\n';
  }
  os << "    </body></html>\n";
}

}  // namespace

std::string_view GenerationModeName(GenerationMode mode) {
  return mode == GenerationMode::kAutomatic ? "automatic" : "semi-automatic";
}

std::string FormatPaperInfo(const PaperStructure& paper) {
  std::vector<std::string> counts;
  const auto count = [&](const char* name, int v) {
    if (v != 0) counts.push_back(std::string(name) + ": " + std::to_string(v));
  };
  count("Section", paper.n_sections);
  count("Caption", paper.n_captions);
  count("Figure", paper.n_figures);
  count("Table", paper.n_tables);

  std::vector<std::string> lengths = {
      "Title length: " + std::to_string(paper.title_chars),
      "Author length: " + std::to_string(paper.author_chars),
      "Abstract length: " + std::to_string(paper.abstract_chars)};
  for (const SectionLength& s : paper.section_chars) {
    lengths.push_back(s.name + " length: " + std::to_string(s.chars));
  }

  std::vector<std::string> aspects;
  for (std::size_t i = 0; i < paper.figure_aspects.size(); ++i) {
    aspects.push_back("Figure " + std::to_string(i + 1) + ": " +
                      Aspect(paper.figure_aspects[i]));
  }
  for (std::size_t i = 0; i < paper.table_aspects.size(); ++i) {
    aspects.push_back("Table " + std::to_string(i + 1) + ": " +
                      Aspect(paper.table_aspects[i]));
  }

  std::ostringstream os;
  os << "Paper Info: \n"
     << "    #Paper element counts\n"
     << "        " << (counts.empty() ? "None" : Join(counts)) << '\n'
     << "    #Paper element lengths in characters\n"
     << "        " << Join(lengths) << '\n'
     << "    #Paper figure/table aspect ratios (width/height)\n"
     << "        " << (aspects.empty() ? "None" : Join(aspects));
  return os.str();
}

std::string BuildPrompt(const GenerationRequest& request) {
  if (request.exemplars.empty()) {
    throw Error(ErrorCode::kNoExemplars, "generation needs at least one exemplar");
  }
  const bool semi = request.mode == GenerationMode::kSemiAutomatic;
  if (semi && request.constraints.empty()) {
    throw Error(ErrorCode::kMissingConstraints,
                "semi-automatic generation needs constraint elements");
  }
  if (request.canvas_w <= 0 || request.canvas_h <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "canvas must be positive");
  }

  std::ostringstream os;
  os << (semi ? kSemiAutomaticTask : kAutomaticTask) << '\n'
     << kCategoryLine << "\n\n";
  for (std::size_t i = 0; i < request.exemplars.size(); ++i) {
    const Exemplar& ex = request.exemplars[i];
    const Layout layout = NormalizeCategories(ex.layout);
    os << "Here is example " << (i + 1) << ".\n";
    if (ex.paper) os << FormatPaperInfo(*ex.paper) << '\n';
    const Layout own_constraints =
        semi ? LargestElements(layout, kExemplarConstraintCount)
             : Layout{layout.canvas_w, layout.canvas_h, {}};
    AppendInput(os, request.canvas_w, request.canvas_h, own_constraints,
                layout.canvas_w, layout.canvas_h);
    os << "Output: \n<html><body>\n" << SerializeHtml(layout)
       << "\n</html></body>\n\n";
  }
  os << kTargetLine << '\n';
  if (request.target_paper) os << FormatPaperInfo(*request.target_paper) << '\n';
  AppendInput(os, request.canvas_w, request.canvas_h,
              semi ? request.constraints : Layout{},
              request.canvas_w, request.canvas_h);
  os << "Output: ";
  return os.str();
}

Layout EnforceConstraints(const Layout& layout, const Layout& constraints) {
  Layout out{constraints.canvas_w, constraints.canvas_h, layout.elements};
  std::vector<bool> used(out.elements.size(), false);
  for (const Element& c : constraints.elements) {
    const ElementCategory cat = MergeCategory(c.category);
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t j = 0; j < out.elements.size(); ++j) {
      if (used[j] || MergeCategory(out.elements[j].category) != cat) continue;
      const double iou = Iou(out.elements[j].bbox, c.bbox);
      if (iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_iou >= kSnapIou) {
      out.elements[best] = c;
      used[best] = true;
    } else {
      out.elements.push_back(c);
      used.push_back(true);
    }
  }
  return out;
}

CandidateScores ScoreCandidate(const Layout& layout,
                               std::span<const Layout> exemplar_layouts,
                               const SelectionWeights& weights) {
  CandidateScores s;
  s.overlap = Overlap(layout);
  s.alignment = Alignment(layout);
  s.max_iou = exemplar_layouts.empty() ? 0.0 : MaxIou(layout, exemplar_layouts);
  s.combined = s.max_iou - weights.overlap * s.overlap -
               weights.alignment * s.alignment;
  return s;
}

std::size_t SelectTop1(std::span<const Candidate> candidates,
                       std::span<const Layout> exemplar_layouts,
                       const SelectionWeights& weights) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyCandidates, "no candidates");
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score =
        ScoreCandidate(candidates[i].layout, exemplar_layouts, weights).combined;
    if (i == 0 || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

GenerationResult Generate(const GenerationRequest& request,
                          const LlmProvider& provider,
                          const SelectionWeights& weights) {
  if (request.n_candidates < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_candidates must be >= 1");
  }
  GenerationResult result;
  result.prompt = BuildPrompt(request);
  const std::vector<std::string> completions =
      provider.Complete(result.prompt, request.n_candidates);
  if (completions.size() != static_cast<std::size_t>(request.n_candidates)) {
    throw Error(ErrorCode::kProviderError,
                "expected " + std::to_string(request.n_candidates) +
                    " completions, got " + std::to_string(completions.size()));
  }
  std::vector<Layout> exemplar_layouts;
  for (const Exemplar& ex : request.exemplars) {
    exemplar_layouts.push_back(NormalizeCategories(ex.layout));
  }
  const bool semi = request.mode == GenerationMode::kSemiAutomatic;
  for (std::size_t k = 0; k < completions.size(); ++k) {
    const int index = static_cast<int>(k);
    try {
      ParseResult parsed =
          ParseHtml(completions[k], {request.canvas_w, request.canvas_h});
      Candidate c;
      c.sample_index = index;
      c.layout = semi ? EnforceConstraints(parsed.layout, request.constraints)
                      : std::move(parsed.layout);
      c.raw_response = completions[k];
      c.warnings = std::move(parsed.warnings);
      c.scores = ScoreCandidate(c.layout, exemplar_layouts, weights);
      result.candidates.push_back(std::move(c));
    } catch (const Error& e) {
      result.failures.push_back({index, completions[k], e.what()});
    }
  }
  if (result.candidates.empty()) {
    throw Error(ErrorCode::kAllCandidatesUnparseable,
                std::to_string(result.failures.size()) + " responses, none parseable");
  }
  return result;
}

}  // namespace posterlay
