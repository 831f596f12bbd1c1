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

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include "posterlay/error.h"
#include "posterlay/synthetic.h"
#include "test_util.h"

namespace posterlay {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

constexpr ElementCategory kText = ElementCategory::kText;
constexpr ElementCategory kFigure = ElementCategory::kFigure;
constexpr ElementCategory kTitle = ElementCategory::kTitle;

void ExpectCode(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << ErrorCodeName(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

MatrixXd RandomMatrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
  }
  return m;
}

// Direct evaluation of the loss with no stabilization tricks.
double OracleLoss(const MatrixXd& p, const MatrixXd& l, double tau) {
  const int n = static_cast<int>(p.rows());
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
      denom += std::exp(p.row(i).dot(l.row(j)) /
                        (p.row(i).norm() * l.row(j).norm()) / tau);
    }
    const double pos =
        std::exp(p.row(i).dot(l.row(i)) / (p.row(i).norm() * l.row(i).norm()) / tau);
    loss -= std::log(pos / denom);
  }
  return loss / n;
}

double RelativeError(const MatrixXd& a, const MatrixXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

MatrixXd FiniteDifference(const std::function<double(const MatrixXd&)>& f,
                          const MatrixXd& x, double h) {
  MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      MatrixXd plus = x, minus = x;
      plus(i, j) += h;
      minus(i, j) -= h;
      g(i, j) = (f(plus) - f(minus)) / (2 * h);
    }
  }
  return g;
}

TEST(ContrastiveLossTest, SingleRowIsExactlyZero) {
  std::mt19937_64 rng(1);
  const LossResult r =
      ContrastiveLoss(RandomMatrix(rng, 1, 5), RandomMatrix(rng, 1, 5), 0.07);
  EXPECT_EQ(r.loss, 0.0);
}

TEST(ContrastiveLossTest, IdenticalEmbeddingsGiveLogN) {
  for (int n : {2, 4, 7}) {
    const MatrixXd e = MatrixXd::Constant(n, 6, 0.3);
    EXPECT_NEAR(ContrastiveLoss(e, e, 0.07).loss, std::log(n), 1e-9);
    EXPECT_NEAR(ContrastiveLoss(e, e, 0.07, true).loss, std::log(n), 1e-9);
  }
  const MatrixXd e4 = MatrixXd::Constant(4, 3, 1.0);
  EXPECT_NEAR(ContrastiveLoss(e4, e4, 0.07).loss, 1.386294, 1e-6);
}

TEST(ContrastiveLossTest, OrthonormalAlignedPairs) {
  const MatrixXd e = MatrixXd::Identity(2, 2);
  const LossResult r = ContrastiveLoss(e, e, 0.07);
  // -log(e^{1/t} / (e^{1/t} + 1)) = log1p(e^{-1/t}).
  EXPECT_NEAR(r.loss, std::log1p(std::exp(-1.0 / 0.07)), 1e-15);
  EXPECT_NEAR(r.loss, 6.2e-7, 0.1e-7);
}

TEST(ContrastiveLossTest, MatchesDirectOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd p = RandomMatrix(rng, 5, 4);
    const MatrixXd l = RandomMatrix(rng, 5, 4);
    EXPECT_NEAR(ContrastiveLoss(p, l, 0.5).loss, OracleLoss(p, l, 0.5), 1e-12);
  }
}

TEST(ContrastiveLossTest, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> rows(1, 8), cols(1, 16);
  std::uniform_real_distribution<double> tau(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rows(rng), d = cols(rng);
    const double t = tau(rng);
    const bool symmetric = trial % 2 == 1;
    const MatrixXd p = RandomMatrix(rng, n, d);
    const MatrixXd l = RandomMatrix(rng, n, d);
    const LossResult r = ContrastiveLoss(p, l, t, symmetric);
    const MatrixXd fd_p = FiniteDifference(
        [&](const MatrixXd& x) { return ContrastiveLoss(x, l, t, symmetric).loss; },
        p, 1e-5);
    const MatrixXd fd_l = FiniteDifference(
        [&](const MatrixXd& x) { return ContrastiveLoss(p, x, t, symmetric).loss; },
        l, 1e-5);
    if (n == 1) {
      EXPECT_LT(r.grad_paper.norm(), 1e-12);
      continue;
    }
    EXPECT_LT(RelativeError(r.grad_paper, fd_p), 1e-4) << "trial " << trial;
    EXPECT_LT(RelativeError(r.grad_layout, fd_l), 1e-4) << "trial " << trial;
  }
}

TEST(ContrastiveLossTest, InvariantToPerRowRescaling) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> s(0.01, 100.0);
  for (int t = 0; t < 20; ++t) {
    const MatrixXd p = RandomMatrix(rng, 6, 5);
    const MatrixXd l = RandomMatrix(rng, 6, 5);
    MatrixXd p2 = p, l2 = l;
    for (int i = 0; i < 6; ++i) {
      p2.row(i) *= s(rng);
      l2.row(i) *= s(rng);
    }
    EXPECT_NEAR(ContrastiveLoss(p, l, 0.07).loss,
                ContrastiveLoss(p2, l2, 0.07).loss, 1e-12);
  }
}

TEST(ContrastiveLossTest, Errors) {
  MatrixXd p = MatrixXd::Ones(3, 2);
  MatrixXd l = MatrixXd::Ones(3, 2);
  ExpectCode(ErrorCode::kNonPositiveTemperature,
             [&] { ContrastiveLoss(p, l, 0.0); });
  ExpectCode(ErrorCode::kNonPositiveTemperature,
             [&] { ContrastiveLoss(p, l, -1.0); });
  l.row(1).setZero();
  ExpectCode(ErrorCode::kZeroNormEmbedding,
             [&] { ContrastiveLoss(p, l, 0.07); });
}

TEST(FeaturesTest, PaperFeaturesByHand) {
  PaperStructure p;
  p.n_sections = 2;
  p.n_captions = 3;
  p.n_figures = 2;
  p.n_tables = 1;
  p.title_chars = 9;
  p.author_chars = 0;
  p.abstract_chars = 99;
  p.section_chars = {{"A", 100}, {"B", 899}};
  p.figure_aspects = {1.0, 2.0};
  p.table_aspects = {3.0};
  const VectorXd f = PaperEncoderFeatures(p);
  ASSERT_EQ(f.size(), kPaperFeatureDim);
  EXPECT_DOUBLE_EQ(f(0), std::log(10.0));
  EXPECT_DOUBLE_EQ(f(1), 0.0);
  EXPECT_DOUBLE_EQ(f(2), std::log(100.0));
  EXPECT_DOUBLE_EQ(f(3), std::log(1000.0));
  EXPECT_DOUBLE_EQ(f(4), std::log(3.0));
  EXPECT_DOUBLE_EQ(f(5), std::log(4.0));
  EXPECT_DOUBLE_EQ(f(6), std::log(3.0));
  EXPECT_DOUBLE_EQ(f(7), std::log(2.0));
  EXPECT_DOUBLE_EQ(f(8), 1.5);
  EXPECT_DOUBLE_EQ(f(9), 3.0);
}

TEST(FeaturesTest, LayoutFeaturesByHand) {
  const Layout l{200, 100,
                 {{kTitle, {0, 0, 1, 0.1}},
                  {ElementCategory::kList, {0, 0.2, 0.5, 0.2}},
                  {kText, {0.5, 0.2, 0.5, 0.4}}}};
  const VectorXd f = LayoutEncoderFeatures(l);
  ASSERT_EQ(f.size(), kLayoutFeatureDim);
  EXPECT_DOUBLE_EQ(f(0), std::log(2.0));  // title count
  EXPECT_DOUBLE_EQ(f(1), 0.1);
  EXPECT_DOUBLE_EQ(f(4), std::log(3.0));  // text count (List merged)
  EXPECT_NEAR(f(5), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(f(12), std::log(2.0));
}

TEST(EncoderTest, ZeroParamsGiveZeroEmbedding) {
  EncoderParams p = InitParams(4, 3, 1);
  p.layout.w1.setZero();
  p.layout.w2.setZero();
  const Embedding e = EncodeLayout(p, Layout{10, 10, {{kText, {0, 0, 1, 1}}}});
  EXPECT_EQ(e.norm(), 0.0);
}

TEST(EncoderTest, IdentityOutputLayerExposesHiddenFeatures) {
  EncoderParams p = InitParams(kPaperFeatureDim, kPaperFeatureDim, 2);
  p.paper.w1.setIdentity();
  p.paper.w2.setIdentity();
  PaperStructure paper;
  paper.title_chars = 20;
  paper.abstract_chars = 300;
  const Embedding e = EncodePaper(p, paper);
  const VectorXd expected = PaperEncoderFeatures(paper).array().tanh();
  EXPECT_LT((e - expected).norm(), 1e-15);
}

TEST(EncoderTest, DeterministicAcrossCalls) {
  const EncoderParams a = InitParams(16, 8, 7);
  const EncoderParams b = InitParams(16, 8, 7);
  std::mt19937_64 rng(5);
  const Layout l = testing::RandomLayout(rng, 9);
  EXPECT_EQ(EncodeLayout(a, l), EncodeLayout(b, l));
  EXPECT_EQ(EncodeLayout(a, l), EncodeLayout(a, l));
}

std::vector<PairRecord> SmallCorpus(int train, int valid, std::uint64_t seed) {
  SynthOptions o;
  o.n_train = train;
  o.n_valid = valid;
  o.n_test = 0;
  o.seed = seed;
  return SynthesizeCorpus(o);
}

TEST(TrainTest, ZeroLearningRateLeavesWeightsUnchanged) {
  const auto records = SmallCorpus(40, 0, 1);
  TrainConfig c;
  c.batch_size = 8;
  c.epochs = 3;
  c.learning_rate = 0.0;
  c.hidden_dim = 12;
  c.dim = 6;
  c.seed = 11;
  const TrainResult r = Train(records, c);
  const EncoderParams init = InitParams(12, 6, 11);
  EXPECT_EQ(r.params.paper.w1, init.paper.w1);
  EXPECT_EQ(r.params.paper.w2, init.paper.w2);
  EXPECT_EQ(r.params.layout.w1, init.layout.w1);
  EXPECT_EQ(r.params.layout.b2, init.layout.b2);
}

TEST(TrainTest, LossHistoryIsBitwiseReproducible) {
  const auto records = SmallCorpus(80, 0, 2);
  TrainConfig c;
  c.batch_size = 16;
  c.epochs = 8;
  c.seed = 3;
  const TrainResult a = Train(records, c);
  const TrainResult b = Train(records, c);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  EXPECT_EQ(a.params.layout.w2, b.params.layout.w2);
  c.seed = 4;
  EXPECT_NE(Train(records, c).epoch_loss, a.epoch_loss);
}

TEST(TrainTest, SeparableToySetConvergesToZeroLoss) {
  auto records = SmallCorpus(4, 0, 3);
  TrainConfig c;
  c.batch_size = 2;
  c.epochs = 400;
  c.learning_rate = 1e-2;
  c.weight_decay = 0.0;
  c.warmup_ratio = 0.0;
  const TrainResult r = Train(records, c);
  EXPECT_LT(r.epoch_loss.back(), 1e-3);
}

TEST(TrainTest, TooFewRecords) {
  const auto records = SmallCorpus(3, 0, 4);
  TrainConfig c;
  c.batch_size = 2;
  ExpectCode(ErrorCode::kTooFewRecords, [&] { Train(records, c); });
}

TEST(TrainTest, DivergenceIsDetected) {
  const auto records = SmallCorpus(20, 0, 5);
  TrainConfig c;
  c.batch_size = 4;
  c.epochs = 2;
  c.learning_rate = std::numeric_limits<double>::infinity();
  ExpectCode(ErrorCode::kDivergenceDetected, [&] { Train(records, c); });
}

TEST(TrainTest, PlantedCorpusIsLearned) {
  const auto records = SmallCorpus(500, 200, 6);
  const auto train = FilterSplit(records, Split::kTrain);
  const auto valid = FilterSplit(records, Split::kValid);
  TrainConfig c;
  c.seed = 6;
  const TrainResult trained = Train(train, c, valid);
  EXPECT_LT(trained.epoch_loss.back(), trained.epoch_loss.front());
  ASSERT_TRUE(trained.valid_recall.has_value());

  const std::span<const PairRecord> queries(valid.data(), 100);
  const double recall = RecallAtK(trained.params, queries, valid, 3);
  EXPECT_GE(recall, 5 * 3.0 / 200);
  c.learning_rate = 0.0;
  const TrainResult untrained = Train(train, c);
  EXPECT_GT(recall, RecallAtK(untrained.params, queries, valid, 3));
}

// Index with hand-set embeddings and random layouts.
RetrievalIndex RandomIndex(std::mt19937_64& rng, int n, int dim) {
  std::vector<IndexEntry> entries;
  for (int i = 0; i < n; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "e%02d", i);
    entries.push_back({id, RandomMatrix(rng, dim, 1).col(0),
                       testing::RandomLayout(rng, 1 + i % 6), PaperStructure{}});
  }
  return RetrievalIndex(std::move(entries));
}

std::vector<ScoredId> BruteForceRank(std::vector<ScoredId> all) {
  // Insertion order is ascending id; selection sort on (score desc, id asc).
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[j].score > all[best].score ||
          (all[j].score == all[best].score && all[j].id < all[best].id)) {
        best = j;
      }
    }
    std::swap(all[i], all[best]);
  }
  return all;
}

TEST(TopKByCosineTest, MatchesExhaustiveScan) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    std::vector<IndexEntry> entries = RandomIndex(rng, 10, 5).entries();
    entries[7].embedding = entries[3].embedding * 2.0;  // exact tie
    const RetrievalIndex index(entries);
    const Embedding q = RandomMatrix(rng, 5, 1).col(0);
    std::vector<ScoredId> all;
    for (const IndexEntry& e : index.entries()) {
      all.push_back({e.id, q.dot(e.embedding) / (q.norm() * e.embedding.norm())});
    }
    const auto oracle = BruteForceRank(all);
    const auto got = TopKByCosine(index, q, 10);
    ASSERT_EQ(got.size(), oracle.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].id, oracle[i].id);
      EXPECT_NEAR(got[i].score, oracle[i].score, 1e-15);
    }
    EXPECT_EQ(TopKByCosine(index, q, 4),
              std::vector<ScoredId>(got.begin(), got.begin() + 4));
  }
}

TEST(TopKByCosineTest, TrivialCases) {
  std::mt19937_64 rng(8);
  std::vector<IndexEntry> entries = RandomIndex(rng, 6, 4).entries();
  entries[2].embedding.setZero();
  const RetrievalIndex index(entries);
  const auto first = TopKByCosine(index, index.entries()[4].embedding, 1);
  EXPECT_EQ(first[0].id, index.entries()[4].id);
  EXPECT_NEAR(first[0].score, 1.0, 1e-15);
  const auto all = TopKByCosine(index, index.entries()[0].embedding, 100);
  EXPECT_EQ(all.size(), 5u);  // zero-norm entry skipped
  for (const ScoredId& s : all) EXPECT_NE(s.id, index.entries()[2].id);

  ExpectCode(ErrorCode::kEmptyIndex,
             [] { TopKByCosine(RetrievalIndex(), VectorXd::Ones(4), 3); });
  ExpectCode(ErrorCode::kZeroNormEmbedding,
             [&] { TopKByCosine(index, VectorXd::Zero(4), 3); });
  ExpectCode(ErrorCode::kInvalidArgument,
             [&] { TopKByCosine(index, VectorXd::Ones(4), 0); });
}

TEST(TopKByMaxIouTest, MatchesBruteForce) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const RetrievalIndex index = RandomIndex(rng, 12, 3);
    const Layout constraints = testing::RandomLayout(rng, 2, true);
    std::vector<ScoredId> all;
    for (const IndexEntry& e : index.entries()) {
      const double total = testing::OracleMatchTotal(constraints, e.layout);
      all.push_back({e.id, std::min(1.0, total / constraints.size())});
    }
    const auto oracle = BruteForceRank(all);
    const auto got = TopKByMaxIou(index, constraints, 12);
    ASSERT_EQ(got.size(), 12u);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].id, oracle[i].id);
      EXPECT_NEAR(got[i].score, oracle[i].score, 1e-12);
    }
  }
}

TEST(TopKByMaxIouTest, TrivialCases) {
  const Layout constraints{100, 100,
                           {{kFigure, {0.1, 0.1, 0.3, 0.3}},
                            {kTitle, {0, 0, 1, 0.1}}}};
  Layout holder = constraints;
  holder.elements.push_back({kText, {0.5, 0.5, 0.4, 0.4}});
  const Layout no_figure{100, 100, {{kText, {0.1, 0.1, 0.3, 0.3}}}};
  std::vector<IndexEntry> entries = {
      {"a", VectorXd::Ones(2), no_figure, {}},
      {"b", VectorXd::Ones(2), holder, {}}};
  const RetrievalIndex index(entries);
  const auto got = TopKByMaxIou(index, constraints, 5);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].id, "b");
  EXPECT_EQ(got[0].score, 1.0);
  EXPECT_EQ(got[1].score, 0.0);
  ExpectCode(ErrorCode::kEmptyConstraints,
             [&] { TopKByMaxIou(index, Layout{100, 100, {}}, 3); });
  ExpectCode(ErrorCode::kEmptyIndex,
             [&] { TopKByMaxIou(RetrievalIndex(), constraints, 3); });
}

TEST(RerankTest, MatchesExhaustiveCosineOracle) {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 20; ++t) {
    const RetrievalIndex index = RandomIndex(rng, 40, 6);
    const Layout constraints = testing::RandomLayout(rng, 2, true);
    std::vector<std::string> candidates;
    for (const ScoredId& s : TopKByMaxIou(index, constraints, 15)) {
      candidates.push_back(s.id);
    }
    const Embedding q = RandomMatrix(rng, 6, 1).col(0);
    std::vector<ScoredId> all;
    for (const std::string& id : candidates) {
      const Embedding& e = index.Find(id)->embedding;
      all.push_back({id, q.dot(e) / (q.norm() * e.norm())});
    }
    const auto oracle = BruteForceRank(all);
    const auto got = Rerank(candidates, q, index, 3);
    ASSERT_EQ(got.size(), 3u);
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(got[i].id, oracle[i].id);
      EXPECT_NE(std::find(candidates.begin(), candidates.end(), got[i].id),
                candidates.end());
    }
  }
}

TEST(RerankTest, TrivialCasesAndErrors) {
  std::mt19937_64 rng(11);
  const RetrievalIndex index = RandomIndex(rng, 8, 4);
  const Embedding q = VectorXd::Ones(4);
  const std::vector<std::string> cands = {"e05", "e01", "e03"};
  const auto all = Rerank(cands, q, index, 10);
  std::set<std::string> got_ids, want_ids(cands.begin(), cands.end());
  for (const ScoredId& s : all) got_ids.insert(s.id);
  EXPECT_EQ(got_ids, want_ids);
  const std::vector<std::string> single = {"e02"};
  EXPECT_EQ(Rerank(single, q, index, 3)[0].id, "e02");
  const std::vector<std::string> unknown = {"e01", "zzz"};
  ExpectCode(ErrorCode::kUnknownCandidateId,
             [&] { Rerank(unknown, q, index, 3); });
}

TEST(RandomSamplesTest, ReproducibleAndComplete) {
  std::mt19937_64 rng(12);
  const RetrievalIndex index = RandomIndex(rng, 20, 2);
  EXPECT_EQ(RandomSamples(index, 3, 42), RandomSamples(index, 3, 42));
  auto whole = RandomSamples(index, 20, 1);
  std::sort(whole.begin(), whole.end());
  std::vector<std::string> ids;
  for (const IndexEntry& e : index.entries()) ids.push_back(e.id);
  EXPECT_EQ(whole, ids);
  ExpectCode(ErrorCode::kPoolTooSmall, [&] { RandomSamples(index, 21, 1); });
}

TEST(RandomSamplesTest, DrawsAreUniform) {
  std::mt19937_64 rng(13);
  const RetrievalIndex index = RandomIndex(rng, 20, 2);
  std::map<std::string, int> counts;
  const int draws = 10000;
  for (int seed = 0; seed < draws; ++seed) {
    const auto s = RandomSamples(index, 3, static_cast<std::uint64_t>(seed));
    ASSERT_EQ(std::set<std::string>(s.begin(), s.end()).size(), 3u);
    for (const std::string& id : s) ++counts[id];
  }
  const double p = 3.0 / 20.0;
  const double expected = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  double chi2 = 0.0;
  for (const IndexEntry& e : index.entries()) {
    const int c = counts[e.id];
    EXPECT_LT(std::abs(c - expected), 3 * sigma) << e.id;
    chi2 += (c - expected) * (c - expected) / expected;
  }
  EXPECT_LT(chi2, 43.82);  // chi-square(19) at p = 0.001
}

TEST(TruncatePoolTest, IdentitySingletonAndNesting) {
  std::mt19937_64 rng(14);
  const RetrievalIndex index = RandomIndex(rng, 30, 3);
  const RetrievalIndex same = TruncatePool(index, 30, 5);
  ASSERT_EQ(same.size(), 30u);
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_EQ(same.entries()[i].id, index.entries()[i].id);
  }
  EXPECT_EQ(TruncatePool(index, 1, 5).size(), 1u);
  const RetrievalIndex big = TruncatePool(index, 20, 9);
  const RetrievalIndex small = TruncatePool(index, 8, 9);
  for (const IndexEntry& e : small.entries()) {
    EXPECT_NE(big.Find(e.id), nullptr) << e.id;
  }
  const auto ten = RandomSamples(index, 10, 9);
  const auto four = RandomSamples(index, 4, 9);
  EXPECT_TRUE(std::equal(four.begin(), four.end(), ten.begin()));
  ExpectCode(ErrorCode::kPoolTooSmall, [&] { TruncatePool(index, 31, 1); });
}

TEST(RetrievalIndexTest, DuplicateIdsRejected) {
  std::vector<IndexEntry> entries = {{"a", VectorXd::Ones(2), {}, {}},
                                     {"a", VectorXd::Ones(2), {}, {}}};
  ExpectCode(ErrorCode::kInvalidArgument,
             [&] { RetrievalIndex index(entries); });
}

class RetrieverIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("posterlay_retriever_io_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(RetrieverIoTest, ParamsRoundTripIsExact) {
  const auto records = SmallCorpus(40, 5, 15);
  TrainConfig c;
  c.batch_size = 8;
  c.epochs = 2;
  const EncoderParams params = Train(FilterSplit(records, Split::kTrain), c).params;
  SaveParams(dir_ / "params.json", params);
  const EncoderParams loaded = LoadParams(dir_ / "params.json");
  for (const PairRecord& r : records) {
    EXPECT_EQ(EncodePaper(params, r.paper), EncodePaper(loaded, r.paper));
  }
  nlohmann::json bad = ParamsToJson(params);
  bad["layout"]["w2"] = nlohmann::json::array({{1.0, 2.0}});
  ExpectCode(ErrorCode::kInvalidArgument, [&] { ParamsFromJson(bad); });
}

TEST_F(RetrieverIoTest, IndexAndSidecarRoundTrip) {
  const auto records = SmallCorpus(12, 3, 16);
  const EncoderParams params = InitParams(8, 4, 1);
  const RetrievalIndex index = BuildIndex(params, records);
  SaveIndex(dir_ / "index.json", index);
  const RetrievalIndex loaded = LoadIndex(dir_ / "index.json");
  ASSERT_EQ(loaded.size(), index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    EXPECT_EQ(loaded.entries()[i].id, index.entries()[i].id);
    EXPECT_EQ(loaded.entries()[i].embedding, index.entries()[i].embedding);
    EXPECT_EQ(loaded.entries()[i].layout, index.entries()[i].layout);
    EXPECT_EQ(loaded.entries()[i].paper, index.entries()[i].paper);
  }

  std::map<std::string, Embedding> sidecar;
  for (const IndexEntry& e : index.entries()) sidecar[e.id] = e.embedding;
  sidecar.erase(index.entries()[0].id);
  WriteEmbeddingSidecar(dir_ / "emb.json", sidecar);
  const auto read = ReadEmbeddingSidecar(dir_ / "emb.json");
  EXPECT_EQ(read, sidecar);
  const RetrievalIndex external = BuildIndexFromEmbeddings(records, read);
  EXPECT_EQ(external.size(), index.size() - 1);
}

}  // namespace
}  // namespace posterlay
