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
#include "posterlay/retriever.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "posterlay/error.h"
#include "posterlay/json_io.h"
#include "posterlay/metrics.h"

namespace posterlay {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

constexpr char kParamsFormat[] = "posterlay-retriever";
constexpr char kIndexFormat[] = "posterlay-index";

double MeanOrZero(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

MatrixXd StackRows(const std::vector<VectorXd>& rows, int cols) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return out;
}

// Loss of one direction (rows of `scores` are queries, the diagonal holds
// the positives) and its gradient w.r.t. `scores`.
double DirectionalLoss(const MatrixXd& scores, MatrixXd& grad) {
  const Eigen::Index n = scores.rows();
  grad.resize(n, n);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = scores.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) sum += std::exp(scores(i, j) - m);
    const double lse = m + std::log(sum);
    loss += lse - scores(i, i);
    for (Eigen::Index j = 0; j < n; ++j) {
      grad(i, j) = std::exp(scores(i, j) - lse) * inv_n;
    }
    grad(i, i) -= inv_n;
  }
  return loss * inv_n;
}

// Gradient through row-wise normalization u = x / |x|.
MatrixXd NormalizationBackward(const MatrixXd& unit, const VectorXd& norms,
                               const MatrixXd& grad_unit) {
  MatrixXd out(unit.rows(), unit.cols());
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    const double proj = unit.row(i).dot(grad_unit.row(i));
    out.row(i) = (grad_unit.row(i) - proj * unit.row(i)) / norms(i);
  }
  return out;
}

VectorXd RowNorms(const MatrixXd& m, const char* what) {
  VectorXd norms = m.rowwise().norm();
  for (Eigen::Index i = 0; i < norms.size(); ++i) {
    if (!(norms(i) > 0.0) || !std::isfinite(norms(i))) {
      throw Error(ErrorCode::kZeroNormEmbedding,
                  std::string(what) + " row " + std::to_string(i));
    }
  }
  return norms;
}

struct ForwardCache {
  MatrixXd hidden;
  MatrixXd output;
};

ForwardCache ForwardWithCache(const Encoder& enc, const MatrixXd& z) {
  ForwardCache c;
  c.hidden = ((z * enc.w1.transpose()).rowwise() + enc.b1.transpose())
                 .array()
                 .tanh()
                 .matrix();
  c.output = (c.hidden * enc.w2.transpose()).rowwise() + enc.b2.transpose();
  return c;
}

struct EncoderGrad {
  MatrixXd w1;
  VectorXd b1;
  MatrixXd w2;
  VectorXd b2;
};

EncoderGrad Backward(const Encoder& enc, const MatrixXd& z,
                     const ForwardCache& c, const MatrixXd& grad_out) {
  EncoderGrad g;
  g.w2 = grad_out.transpose() * c.hidden;
  g.b2 = grad_out.colwise().sum().transpose();
  const MatrixXd grad_hidden = grad_out * enc.w2;
  const MatrixXd grad_pre =
      (grad_hidden.array() * (1.0 - c.hidden.array().square())).matrix();
  g.w1 = grad_pre.transpose() * z;
  g.b1 = grad_pre.colwise().sum().transpose();
  return g;
}

struct Moments {
  MatrixXd m;
  MatrixXd v;
};

struct AdamW {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;

  template <typename Param, typename Grad>
  void Update(Param& param, const Grad& grad, Moments& mom, double lr,
              double weight_decay) const {
    if (mom.m.size() == 0) {
      mom.m = MatrixXd::Zero(param.rows(), param.cols());
      mom.v = MatrixXd::Zero(param.rows(), param.cols());
    }
    mom.m = beta1 * mom.m + (1.0 - beta1) * grad;
    mom.v = beta2 * mom.v + (1.0 - beta2) * grad.array().square().matrix();
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    if (weight_decay > 0.0) param *= (1.0 - lr * weight_decay);
    param.array() -= lr * (mom.m.array() / c1) /
                     ((mom.v.array() / c2).sqrt() + eps);
  }
};

double ScheduledRate(const TrainConfig& config, long step, long total) {
  const long warmup = static_cast<long>(std::ceil(config.warmup_ratio * total));
  if (warmup > 0 && step <= warmup) {
    return config.learning_rate * static_cast<double>(step) / warmup;
  }
  const double progress = total > warmup
                              ? static_cast<double>(step - warmup) / (total - warmup)
                              : 1.0;
  return config.learning_rate * 0.5 * (1.0 + std::cos(M_PI * progress));
}

void FitStandardization(Encoder& enc, const MatrixXd& raw) {
  enc.mean = raw.colwise().mean().transpose();
  enc.scale.resize(raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double var = (raw.col(j).array() - enc.mean(j)).square().mean();
    const double sd = std::sqrt(var);
    enc.scale(j) = sd > 1e-9 ? 1.0 / sd : 1.0;
  }
}

std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  return order;
}

json MatrixToJson(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json VectorToJson(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

VectorXd VectorFromJson(const json& j, const char* what) {
  if (!j.is_array()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be an array");
  }
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " must hold numbers");
    }
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

MatrixXd MatrixFromJson(const json& j, const char* what) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " must be a non-empty array of rows");
  }
  MatrixXd m(static_cast<Eigen::Index>(j.size()),
             static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const VectorXd row = VectorFromJson(j[i], what);
    if (row.size() != m.cols()) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " is ragged");
    }
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

json EncoderToJson(const Encoder& enc) {
  return json{{"mean", VectorToJson(enc.mean)}, {"scale", VectorToJson(enc.scale)},
              {"w1", MatrixToJson(enc.w1)},     {"b1", VectorToJson(enc.b1)},
              {"w2", MatrixToJson(enc.w2)},     {"b2", VectorToJson(enc.b2)}};
}

Encoder EncoderFromJson(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "encoder must be an object");
  }
  const auto field = [&](const char* key) -> const json& {
    if (!j.contains(key)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("encoder missing '") + key + "'");
    }
    return j.at(key);
  };
  Encoder enc;
  enc.mean = VectorFromJson(field("mean"), "mean");
  enc.scale = VectorFromJson(field("scale"), "scale");
  enc.w1 = MatrixFromJson(field("w1"), "w1");
  enc.b1 = VectorFromJson(field("b1"), "b1");
  enc.w2 = MatrixFromJson(field("w2"), "w2");
  enc.b2 = VectorFromJson(field("b2"), "b2");
  return enc;
}

const IndexEntry& RequireEntry(const RetrievalIndex& index, std::string_view id) {
  const IndexEntry* e = index.Find(id);
  if (e == nullptr) {
    throw Error(ErrorCode::kUnknownCandidateId, std::string(id));
  }
  return *e;
}

void SortScored(std::vector<ScoredId>& scored) {
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredId& a, const ScoredId& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.id < b.id;
                   });
}

}  // namespace

VectorXd PaperEncoderFeatures(const PaperStructure& paper) {
  long section_total = 0;
  for (const SectionLength& s : paper.section_chars) section_total += s.chars;
  VectorXd f(kPaperFeatureDim);
  f << std::log1p(paper.title_chars), std::log1p(paper.author_chars),
      std::log1p(paper.abstract_chars),
      std::log1p(static_cast<double>(section_total)),
      std::log1p(paper.n_sections), std::log1p(paper.n_captions),
      std::log1p(paper.n_figures), std::log1p(paper.n_tables),
      MeanOrZero(paper.figure_aspects), MeanOrZero(paper.table_aspects);
  return f;
}

VectorXd LayoutEncoderFeatures(const Layout& layout) {
  const auto fractions = ElementAreaFractions(layout);
  VectorXd f(kLayoutFeatureDim);
  for (int c = 0; c < 6; ++c) {
    f(2 * c) = std::log1p(fractions[c].count);
    f(2 * c + 1) = fractions[c].area;
  }
  f(12) = layout.canvas_w > 0 && layout.canvas_h > 0
              ? std::log(static_cast<double>(layout.canvas_w) / layout.canvas_h)
              : 0.0;
  return f;
}

bool Encoder::IsValid() const {
  const auto finite = [](const auto& m) { return m.allFinite(); };
  return w1.rows() > 0 && w1.cols() > 0 && w2.rows() > 0 &&
         mean.size() == w1.cols() && scale.size() == w1.cols() &&
         b1.size() == w1.rows() && w2.cols() == w1.rows() &&
         b2.size() == w2.rows() && finite(mean) && finite(scale) &&
         finite(w1) && finite(b1) && finite(w2) && finite(b2);
}

MatrixXd Encoder::Standardize(const MatrixXd& raw) const {
  return ((raw.rowwise() - mean.transpose()).array().rowwise() *
          scale.transpose().array())
      .matrix();
}

MatrixXd Encoder::Forward(const MatrixXd& standardized) const {
  return ForwardWithCache(*this, standardized).output;
}

bool EncoderParams::IsValid() const {
  return paper.IsValid() && layout.IsValid() &&
         paper.input_dim() == kPaperFeatureDim &&
         layout.input_dim() == kLayoutFeatureDim &&
         paper.output_dim() == layout.output_dim();
}

EncoderParams InitParams(int hidden_dim, int dim, std::uint64_t seed) {
  if (hidden_dim < 1 || dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "hidden and embedding dims must be >= 1");
  }
  std::mt19937_64 rng(seed);
  const auto glorot = [&](int rows, int cols) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (rows + cols)));
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
    }
    return m;
  };
  const auto make = [&](int input) {
    Encoder e;
    e.mean = VectorXd::Zero(input);
    e.scale = VectorXd::Ones(input);
    e.w1 = glorot(hidden_dim, input);
    e.b1 = VectorXd::Zero(hidden_dim);
    e.w2 = glorot(dim, hidden_dim);
    e.b2 = VectorXd::Zero(dim);
    return e;
  };
  EncoderParams p;
  p.paper = make(kPaperFeatureDim);
  p.layout = make(kLayoutFeatureDim);
  return p;
}

Embedding EncodePaper(const EncoderParams& params, const PaperStructure& paper) {
  const MatrixXd raw = PaperEncoderFeatures(paper).transpose();
  return params.paper.Forward(params.paper.Standardize(raw)).row(0).transpose();
}

Embedding EncodeLayout(const EncoderParams& params, const Layout& layout) {
  const MatrixXd raw = LayoutEncoderFeatures(layout).transpose();
  return params.layout.Forward(params.layout.Standardize(raw)).row(0).transpose();
}

LossResult ContrastiveLoss(const MatrixXd& paper_embs, const MatrixXd& layout_embs,
                           double temperature, bool symmetric) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kNonPositiveTemperature, std::to_string(temperature));
  }
  if (paper_embs.rows() < 1 || paper_embs.rows() != layout_embs.rows() ||
      paper_embs.cols() != layout_embs.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding matrices must be N x d, N >= 1");
  }
  const VectorXd p_norms = RowNorms(paper_embs, "paper embedding");
  const VectorXd l_norms = RowNorms(layout_embs, "layout embedding");
  const MatrixXd p_unit = p_norms.cwiseInverse().asDiagonal() * paper_embs;
  const MatrixXd l_unit = l_norms.cwiseInverse().asDiagonal() * layout_embs;
  const MatrixXd scores = (p_unit * l_unit.transpose()) / temperature;

  LossResult result;
  MatrixXd grad_scores;
  result.loss = DirectionalLoss(scores, grad_scores);
  if (symmetric) {
    MatrixXd grad_t;
    const double reverse = DirectionalLoss(scores.transpose(), grad_t);
    result.loss = 0.5 * (result.loss + reverse);
    grad_scores = 0.5 * (grad_scores + grad_t.transpose());
  }
  const MatrixXd grad_p_unit = grad_scores * l_unit / temperature;
  const MatrixXd grad_l_unit = grad_scores.transpose() * p_unit / temperature;
  result.grad_paper = NormalizationBackward(p_unit, p_norms, grad_p_unit);
  result.grad_layout = NormalizationBackward(l_unit, l_norms, grad_l_unit);
  return result;
}

TrainConfig TrainConfigFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, "train config must be an object");
  TrainConfig c;
  static const std::set<std::string> known = {
      "batch_size", "temperature", "epochs",     "learning_rate",
      "weight_decay", "warmup_ratio", "hidden_dim", "dim",
      "seed",       "symmetric",   "recall_k"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::kConfigError, "unknown retriever key '" + key + "'");
    }
  }
  try {
    c.batch_size = j.value("batch_size", c.batch_size);
    c.temperature = j.value("temperature", c.temperature);
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.warmup_ratio = j.value("warmup_ratio", c.warmup_ratio);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.dim = j.value("dim", c.dim);
    c.seed = j.value("seed", c.seed);
    c.symmetric = j.value("symmetric", c.symmetric);
    c.recall_k = j.value("recall_k", c.recall_k);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  if (c.batch_size < 2 || c.epochs < 1 || c.dim < 1 || c.hidden_dim < 1 ||
      c.learning_rate < 0.0 || c.weight_decay < 0.0 || c.warmup_ratio < 0.0 ||
      c.warmup_ratio > 1.0 || c.recall_k < 1) {
    throw Error(ErrorCode::kConfigError, "retriever config out of range");
  }
  if (!(c.temperature > 0.0)) {
    throw Error(ErrorCode::kNonPositiveTemperature, std::to_string(c.temperature));
  }
  return c;
}

Layout TrainingLayout(const PairRecord& record) {
  if (record.gold_layout) return NormalizeCategories(*record.gold_layout);
  return NormalizeCategories(PostprocessSilver(record.silver_layout));
}

TrainResult Train(std::span<const PairRecord> train, const TrainConfig& config,
                  std::span<const PairRecord> valid) {
  if (!(config.temperature > 0.0)) {
    throw Error(ErrorCode::kNonPositiveTemperature, std::to_string(config.temperature));
  }
  if (config.batch_size < 2) {
    throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 2");
  }
  std::vector<VectorXd> paper_rows, layout_rows;
  for (const PairRecord& r : train) {
    const Layout layout = TrainingLayout(r);
    if (layout.empty()) continue;
    paper_rows.push_back(PaperEncoderFeatures(r.paper));
    layout_rows.push_back(LayoutEncoderFeatures(layout));
  }
  const std::size_t n = paper_rows.size();
  if (n < 2 * static_cast<std::size_t>(config.batch_size)) {
    throw Error(ErrorCode::kTooFewRecords,
                std::to_string(n) + " usable records, need " +
                    std::to_string(2 * config.batch_size));
  }

  TrainResult result;
  EncoderParams& params = result.params;
  params = InitParams(config.hidden_dim, config.dim, config.seed);
  const MatrixXd paper_raw = StackRows(paper_rows, kPaperFeatureDim);
  const MatrixXd layout_raw = StackRows(layout_rows, kLayoutFeatureDim);
  FitStandardization(params.paper, paper_raw);
  FitStandardization(params.layout, layout_raw);
  const MatrixXd paper_z = params.paper.Standardize(paper_raw);
  const MatrixXd layout_z = params.layout.Standardize(layout_raw);

  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t batches_per_epoch =
      n / batch + (n % batch >= 2 ? 1 : 0);
  const long total_steps = static_cast<long>(batches_per_epoch) * config.epochs;

  AdamW adam;
  std::array<Moments, 8> moments;
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(shuffle_rng)]);
    }
    double epoch_sum = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      const std::size_t begin = b * batch;
      const std::size_t end = std::min(n, begin + batch);
      const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
      MatrixXd zp(rows, kPaperFeatureDim), zl(rows, kLayoutFeatureDim);
      for (std::size_t k = begin; k < end; ++k) {
        const Eigen::Index r = static_cast<Eigen::Index>(k - begin);
        zp.row(r) = paper_z.row(static_cast<Eigen::Index>(order[k]));
        zl.row(r) = layout_z.row(static_cast<Eigen::Index>(order[k]));
      }
      const ForwardCache fp = ForwardWithCache(params.paper, zp);
      const ForwardCache fl = ForwardWithCache(params.layout, zl);
      const LossResult loss = ContrastiveLoss(fp.output, fl.output,
                                              config.temperature, config.symmetric);
      if (!std::isfinite(loss.loss)) {
        throw Error(ErrorCode::kDivergenceDetected,
                    "non-finite loss at epoch " + std::to_string(epoch));
      }
      epoch_sum += loss.loss;
      const EncoderGrad gp = Backward(params.paper, zp, fp, loss.grad_paper);
      const EncoderGrad gl = Backward(params.layout, zl, fl, loss.grad_layout);

      ++adam.step;
      const double lr = ScheduledRate(config, adam.step, total_steps);
      const double wd = config.weight_decay;
      adam.Update(params.paper.w1, gp.w1, moments[0], lr, wd);
      adam.Update(params.paper.b1, gp.b1, moments[1], lr, 0.0);
      adam.Update(params.paper.w2, gp.w2, moments[2], lr, wd);
      adam.Update(params.paper.b2, gp.b2, moments[3], lr, 0.0);
      adam.Update(params.layout.w1, gl.w1, moments[4], lr, wd);
      adam.Update(params.layout.b1, gl.b1, moments[5], lr, 0.0);
      adam.Update(params.layout.w2, gl.w2, moments[6], lr, wd);
      adam.Update(params.layout.b2, gl.b2, moments[7], lr, 0.0);
      if (!params.paper.IsValid() || !params.layout.IsValid()) {
        throw Error(ErrorCode::kDivergenceDetected,
                    "non-finite parameters at epoch " + std::to_string(epoch));
      }
    }
    result.epoch_loss.push_back(epoch_sum / static_cast<double>(batches_per_epoch));
  }

  std::vector<PairRecord> valid_with_gold;
  for (const PairRecord& r : valid) {
    if (r.gold_layout) valid_with_gold.push_back(r);
  }
  if (!valid_with_gold.empty()) {
    result.valid_recall =
        RecallAtK(params, valid_with_gold, valid_with_gold, config.recall_k);
  }
  return result;
}

double RecallAtK(const EncoderParams& params, std::span<const PairRecord> queries,
                 std::span<const PairRecord> pool, int k) {
  if (queries.empty()) throw Error(ErrorCode::kEmptyInput, "no queries");
  const RetrievalIndex index = BuildIndex(params, pool);
  int hits = 0;
  for (const PairRecord& q : queries) {
    if (index.Find(q.id) == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "query '" + q.id + "' not in pool");
    }
    for (const ScoredId& s : TopKByCosine(index, EncodePaper(params, q.paper), k)) {
      if (s.id == q.id) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(queries.size());
}

RetrievalIndex::RetrievalIndex(std::vector<IndexEntry> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i > 0 && entries_[i].id == entries_[i - 1].id) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate index id '" + entries_[i].id + "'");
    }
    if (entries_[i].embedding.size() != entries_[0].embedding.size()) {
      throw Error(ErrorCode::kInvalidArgument, "mixed embedding dimensions");
    }
    if (!entries_[i].embedding.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite embedding for '" + entries_[i].id + "'");
    }
  }
}

const IndexEntry* RetrievalIndex::Find(std::string_view id) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const IndexEntry& e, std::string_view key) { return e.id < key; });
  if (it == entries_.end() || it->id != id) return nullptr;
  return &*it;
}

RetrievalIndex BuildIndex(const EncoderParams& params,
                          std::span<const PairRecord> records) {
  std::vector<IndexEntry> entries;
  entries.reserve(records.size());
  for (const PairRecord& r : records) {
    Layout layout = TrainingLayout(r);
    Embedding emb = EncodeLayout(params, layout);
    entries.push_back({r.id, std::move(emb), std::move(layout), r.paper});
  }
  return RetrievalIndex(std::move(entries));
}

RetrievalIndex BuildIndexFromEmbeddings(
    std::span<const PairRecord> records,
    const std::map<std::string, Embedding>& embeddings) {
  std::vector<IndexEntry> entries;
  for (const PairRecord& r : records) {
    const auto it = embeddings.find(r.id);
    if (it == embeddings.end()) continue;
    entries.push_back({r.id, it->second, TrainingLayout(r), r.paper});
  }
  return RetrievalIndex(std::move(entries));
}

double Cosine(const Embedding& a, const Embedding& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(ErrorCode::kZeroNormEmbedding, "cosine of a zero vector");
  }
  return a.dot(b) / (na * nb);
}

std::vector<ScoredId> TopKByCosine(const RetrievalIndex& index,
                                   const Embedding& query, int k) {
  if (index.empty()) throw Error(ErrorCode::kEmptyIndex, "index has no entries");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (query.size() != index.entries()[0].embedding.size()) {
    throw Error(ErrorCode::kInvalidArgument, "query dimension does not match index");
  }
  const double qn = query.norm();
  if (!(qn > 0.0)) throw Error(ErrorCode::kZeroNormEmbedding, "query embedding");
  std::vector<ScoredId> scored;
  scored.reserve(index.size());
  for (const IndexEntry& e : index.entries()) {
    const double en = e.embedding.norm();
    if (!(en > 0.0)) continue;
    scored.push_back({e.id, query.dot(e.embedding) / (qn * en)});
  }
  SortScored(scored);
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(k);
  return scored;
}

std::vector<ScoredId> TopKByMaxIou(const RetrievalIndex& index,
                                   const Layout& constraints, int k) {
  if (index.empty()) throw Error(ErrorCode::kEmptyIndex, "index has no entries");
  if (constraints.empty()) throw Error(ErrorCode::kEmptyConstraints, "no constraint elements");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  std::vector<ScoredId> scored;
  scored.reserve(index.size());
  for (const IndexEntry& e : index.entries()) {
    scored.push_back(
        {e.id, LayoutMatchScore(constraints, e.layout, Normalizer::kLeft).first});
  }
  SortScored(scored);
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(k);
  return scored;
}

std::vector<ScoredId> Rerank(std::span<const std::string> candidates,
                             const Embedding& paper_embedding,
                             const RetrievalIndex& index, int m) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  std::vector<ScoredId> scored;
  std::set<std::string_view> seen;
  for (const std::string& id : candidates) {
    const IndexEntry& e = RequireEntry(index, id);
    if (!seen.insert(e.id).second) continue;
    scored.push_back({e.id, Cosine(paper_embedding, e.embedding)});
  }
  SortScored(scored);
  if (scored.size() > static_cast<std::size_t>(m)) scored.resize(m);
  return scored;
}

std::vector<std::string> RandomSamples(const RetrievalIndex& index, int n,
                                       std::uint64_t seed) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
  if (static_cast<std::size_t>(n) > index.size()) {
    throw Error(ErrorCode::kPoolTooSmall,
                std::to_string(n) + " > pool size " + std::to_string(index.size()));
  }
  const std::vector<std::size_t> order = SeededPermutation(index.size(), seed);
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(index.entries()[order[i]].id);
  return out;
}

RetrievalIndex TruncatePool(const RetrievalIndex& index, int size,
                            std::uint64_t seed) {
  if (size < 1) throw Error(ErrorCode::kInvalidArgument, "pool size must be >= 1");
  std::vector<IndexEntry> entries;
  for (const std::string& id : RandomSamples(index, size, seed)) {
    entries.push_back(*index.Find(id));
  }
  return RetrievalIndex(std::move(entries));
}

json ParamsToJson(const EncoderParams& params) {
  return json{{"format", kParamsFormat},
              {"version", 1},
              {"dim", params.dim()},
              {"paper", EncoderToJson(params.paper)},
              {"layout", EncoderToJson(params.layout)}};
}

EncoderParams ParamsFromJson(const json& j) {
  if (!j.is_object() || j.value("format", "") != kParamsFormat) {
    throw Error(ErrorCode::kInvalidArgument, "not a retriever checkpoint");
  }
  if (j.value("version", 0) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported checkpoint version");
  }
  EncoderParams p;
  p.paper = EncoderFromJson(j.at("paper"));
  p.layout = EncoderFromJson(j.at("layout"));
  if (!p.IsValid()) {
    throw Error(ErrorCode::kInvalidArgument, "checkpoint shapes are inconsistent");
  }
  return p;
}

void SaveParams(const std::filesystem::path& path, const EncoderParams& params) {
  WriteJsonFile(path, ParamsToJson(params));
}

EncoderParams LoadParams(const std::filesystem::path& path) {
  return ParamsFromJson(ReadJsonFile(path));
}

void WriteEmbeddingSidecar(const std::filesystem::path& path,
                           const std::map<std::string, Embedding>& embeddings) {
  json emb = json::object();
  long dim = embeddings.empty() ? 0 : embeddings.begin()->second.size();
  for (const auto& [id, v] : embeddings) {
    if (v.size() != dim) {
      throw Error(ErrorCode::kInvalidArgument, "mixed embedding dimensions");
    }
    emb[id] = VectorToJson(v);
  }
  WriteJsonFile(path, json{{"dim", dim}, {"embeddings", emb}});
}

std::map<std::string, Embedding> ReadEmbeddingSidecar(
    const std::filesystem::path& path) {
  const json j = ReadJsonFile(path);
  if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer() ||
      !j.contains("embeddings") || !j["embeddings"].is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sidecar must be {\"dim\": int, \"embeddings\": {...}}");
  }
  const long dim = j["dim"].get<long>();
  std::map<std::string, Embedding> out;
  for (const auto& [id, v] : j["embeddings"].items()) {
    Embedding e = VectorFromJson(v, "embedding");
    if (e.size() != dim) {
      throw Error(ErrorCode::kInvalidArgument, "embedding '" + id + "' has wrong dimension");
    }
    out.emplace(id, std::move(e));
  }
  return out;
}

void SaveIndex(const std::filesystem::path& path, const RetrievalIndex& index) {
  json entries = json::array();
  for (const IndexEntry& e : index.entries()) {
    entries.push_back(json{{"id", e.id},
                           {"embedding", VectorToJson(e.embedding)},
                           {"layout", e.layout},
                           {"paper", e.paper}});
  }
  WriteJsonFile(path, json{{"format", kIndexFormat}, {"version", 1}, {"entries", entries}});
}

RetrievalIndex LoadIndex(const std::filesystem::path& path) {
  const json j = ReadJsonFile(path);
  if (!j.is_object() || j.value("format", "") != kIndexFormat ||
      !j.contains("entries") || !j["entries"].is_array()) {
    throw Error(ErrorCode::kInvalidArgument, "not a retrieval index file");
  }
  std::vector<IndexEntry> entries;
  for (const json& e : j["entries"]) {
    if (!e.is_object() || !e.contains("id") || !e["id"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "index entry without id");
    }
    entries.push_back({e["id"].get<std::string>(),
                       VectorFromJson(e.value("embedding", json()), "embedding"),
                       LayoutFromJson(e.value("layout", json())),
                       PaperFromJson(e.value("paper", json()))});
  }
  return RetrievalIndex(std::move(entries));
}

}  // namespace posterlay
