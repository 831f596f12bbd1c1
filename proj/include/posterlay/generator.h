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
// Few-shot layout generation: prompt construction from retrieved exemplars,
// candidate parsing, constraint enforcement and top-1 selection.
#ifndef POSTERLAY_GENERATOR_H_
#define POSTERLAY_GENERATOR_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posterlay/layout.h"
#include "posterlay/provider.h"

namespace posterlay {

enum class GenerationMode { kAutomatic, kSemiAutomatic };

std::string_view GenerationModeName(GenerationMode mode);

struct Exemplar {
  std::string id;
  Layout layout;
  // Withheld from the prompt when absent.
  std::optional<PaperStructure> paper;
};

struct GenerationRequest {
  GenerationMode mode = GenerationMode::kAutomatic;
  int canvas_w = 5120;
  int canvas_h = 2560;
  std::vector<Exemplar> exemplars;
  std::optional<PaperStructure> target_paper;
  // Semi-automatic only; boxes are fractions of the request canvas.
  Layout constraints;
  int n_candidates = 3;
};

// Number of exemplar elements shown as that exemplar's own constraints in
// semi-automatic prompts.
inline constexpr std::size_t kExemplarConstraintCount = 2;

// The "Paper Info: " block (without a trailing newline).
std::string FormatPaperInfo(const PaperStructure& paper);

// Throws Error{kNoExemplars} or Error{kMissingConstraints}.
std::string BuildPrompt(const GenerationRequest& request);

struct SelectionWeights {
  double overlap = 1.0;
  double alignment = 1.0;
};

struct CandidateScores {
  double overlap = 0.0;
  double alignment = 0.0;
  double max_iou = 0.0;
  double combined = 0.0;
};

struct Candidate {
  int sample_index = 0;
  Layout layout;
  std::string raw_response;
  CandidateScores scores;
  std::vector<std::string> warnings;
};

struct CandidateFailure {
  int sample_index = 0;
  std::string raw_response;
  std::string reason;
};

struct GenerationResult {
  std::string prompt;
  std::vector<Candidate> candidates;
  std::vector<CandidateFailure> failures;
};

// Parses every completion; semi-automatic candidates pass through
// EnforceConstraints. Throws Error{kProviderError} (propagated) or
// Error{kAllCandidatesUnparseable}.
GenerationResult Generate(const GenerationRequest& request,
                          const LlmProvider& provider,
                          const SelectionWeights& weights = {});

// Every constraint box appears in the output exactly: the best unused
// same-category element with IoU >= 0.5 is snapped onto it, otherwise the
// constraint is appended. The output uses the constraints' canvas.
Layout EnforceConstraints(const Layout& layout, const Layout& constraints);

inline constexpr double kSnapIou = 0.5;

CandidateScores ScoreCandidate(const Layout& layout,
                               std::span<const Layout> exemplar_layouts,
                               const SelectionWeights& weights);

// Index of the candidate with the largest combined score; ties go to the
// lowest index. Scores are recomputed. Throws Error{kEmptyCandidates}.
std::size_t SelectTop1(std::span<const Candidate> candidates,
                       std::span<const Layout> exemplar_layouts,
                       const SelectionWeights& weights = {});

}  // namespace posterlay

#endif  // POSTERLAY_GENERATOR_H_
