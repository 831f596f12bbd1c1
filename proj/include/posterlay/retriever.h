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
// Dual-encoder layout retrieval. Papers and layouts are mapped to
// structural feature vectors, standardized, and embedded by two small tanh
// MLPs trained with a temperature-scaled InfoNCE objective in which each
// paper's own layout is the positive among the batch.
#ifndef POSTERLAY_RETRIEVER_H_
#define POSTERLAY_RETRIEVER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "posterlay/dataset.h"
#include "posterlay/layout.h"

namespace posterlay {

using Embedding = Eigen::VectorXd;

inline constexpr int kPaperFeatureDim = 10;
inline constexpr int kLayoutFeatureDim = 13;

// log1p of title/author/abstract/section characters, log1p of section,
// caption, figure and table counts, mean figure and table aspect ratios.
Eigen::VectorXd PaperEncoderFeatures(const PaperStructure& paper);

// log1p count and summed area per merged category, then log canvas aspect.
Eigen::VectorXd LayoutEncoderFeatures(const Layout& layout);

// z = (raw - mean) .* scale; h = tanh(W1 z + b1); e = W2 h + b2.
struct Encoder {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
  int output_dim() const { return static_cast<int>(w2.rows()); }
  bool IsValid() const;

  // One row per sample.
  Eigen::MatrixXd Standardize(const Eigen::MatrixXd& raw) const;
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& standardized) const;
};

struct EncoderParams {
  Encoder paper;
  Encoder layout;

  int dim() const { return paper.output_dim(); }
  bool IsValid() const;
};

// Glorot-normal weights, zero biases, identity standardization.
EncoderParams InitParams(int hidden_dim, int dim, std::uint64_t seed);

Embedding EncodePaper(const EncoderParams& params, const PaperStructure& paper);
Embedding EncodeLayout(const EncoderParams& params, const Layout& layout);

struct LossResult {
  double loss = 0.0;
  Eigen::MatrixXd grad_paper;   // N x d
  Eigen::MatrixXd grad_layout;  // N x d
};

// loss = -(1/N) sum_i log softmax_j(cos(p_i, l_j) / tau)_i. With
// `symmetric`, the mean of that and the layout-to-paper direction.
// Throws Error{kZeroNormEmbedding} or Error{kNonPositiveTemperature}.
LossResult ContrastiveLoss(const Eigen::MatrixXd& paper_embs,
                           const Eigen::MatrixXd& layout_embs,
                           double temperature, bool symmetric = false);

struct TrainConfig {
  int batch_size = 32;
  double temperature = 0.07;
  int epochs = 60;
  double learning_rate = 3e-3;
  double weight_decay = 0.01;
  double warmup_ratio = 0.1;
  int hidden_dim = 64;
  int dim = 32;
  std::uint64_t seed = 0;
  bool symmetric = false;
  int recall_k = 3;
};

TrainConfig TrainConfigFromJson(const nlohmann::json& j);

struct TrainResult {
  EncoderParams params;
  std::vector<double> epoch_loss;  // mean batch loss per epoch
  std::optional<double> valid_recall;
};

// The layout a record contributes to training and to the index: gold when
// present, otherwise the post-processed silver layout.
Layout TrainingLayout(const PairRecord& record);

// Needs at least 2 * batch_size records. `valid` records (with gold
// layouts) are used only for the final recall report. Throws
// Error{kTooFewRecords} or Error{kDivergenceDetected}.
TrainResult Train(std::span<const PairRecord> train, const TrainConfig& config,
                  std::span<const PairRecord> valid = {});

// Fraction of queries whose own layout ranks in the top k when their paper
// embedding searches the pool. Every query id must occur in the pool.
double RecallAtK(const EncoderParams& params,
                 std::span<const PairRecord> queries,
                 std::span<const PairRecord> pool, int k);

struct IndexEntry {
  std::string id;
  Embedding embedding;
  Layout layout;
  PaperStructure paper;
};

// Immutable after construction; entries are kept sorted by id.
class RetrievalIndex {
 public:
  RetrievalIndex() = default;
  // Throws Error{kInvalidArgument} on duplicate ids or mixed dimensions.
  explicit RetrievalIndex(std::vector<IndexEntry> entries);

  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const IndexEntry* Find(std::string_view id) const;

 private:
  std::vector<IndexEntry> entries_;
};

RetrievalIndex BuildIndex(const EncoderParams& params,
                          std::span<const PairRecord> records);

// Index whose embeddings come from an external provider. Records without
// an embedding are skipped.
RetrievalIndex BuildIndexFromEmbeddings(
    std::span<const PairRecord> records,
    const std::map<std::string, Embedding>& embeddings);

struct ScoredId {
  std::string id;
  double score = 0.0;

  friend bool operator==(const ScoredId&, const ScoredId&) = default;
};

double Cosine(const Embedding& a, const Embedding& b);

// Descending cosine, ties by ascending id. Zero-norm entries are skipped.
// Throws Error{kEmptyIndex}, Error{kZeroNormEmbedding} or
// Error{kInvalidArgument} (k < 1).
std::vector<ScoredId> TopKByCosine(const RetrievalIndex& index,
                                   const Embedding& query, int k);

// Ranks by LayoutMatchScore(constraints, entry layout, kLeft). Throws
// Error{kEmptyIndex} or Error{kEmptyConstraints}.
std::vector<ScoredId> TopKByMaxIou(const RetrievalIndex& index,
                                   const Layout& constraints, int k);

// Top-m of `candidates` by cosine to `paper_embedding`. Throws
// Error{kUnknownCandidateId}.
std::vector<ScoredId> Rerank(std::span<const std::string> candidates,
                             const Embedding& paper_embedding,
                             const RetrievalIndex& index, int m);

// The first n ids of a seeded uniform permutation of the index, so smaller
// draws with the same seed are prefixes of larger ones. Throws
// Error{kPoolTooSmall}.
std::vector<std::string> RandomSamples(const RetrievalIndex& index, int n,
                                       std::uint64_t seed);

RetrievalIndex TruncatePool(const RetrievalIndex& index, int size,
                            std::uint64_t seed);

nlohmann::json ParamsToJson(const EncoderParams& params);
EncoderParams ParamsFromJson(const nlohmann::json& j);
void SaveParams(const std::filesystem::path& path, const EncoderParams& params);
EncoderParams LoadParams(const std::filesystem::path& path);

// {"dim": d, "embeddings": {"<id>": [..], ...}}
void WriteEmbeddingSidecar(const std::filesystem::path& path,
                           const std::map<std::string, Embedding>& embeddings);
std::map<std::string, Embedding> ReadEmbeddingSidecar(
    const std::filesystem::path& path);

// {"format": "posterlay-index", "version": 1,
//  "entries": [{"id", "embedding", "layout", "paper"}, ...]}
void SaveIndex(const std::filesystem::path& path, const RetrievalIndex& index);
RetrievalIndex LoadIndex(const std::filesystem::path& path);

}  // namespace posterlay

#endif  // POSTERLAY_RETRIEVER_H_
