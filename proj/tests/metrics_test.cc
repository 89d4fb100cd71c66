/*
 * Copyright 2026 The FOLTR Poisoning Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "foltr/metrics.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "foltr/error.h"
#include "foltr/synthetic.h"
#include "oracles.h"

namespace foltr {
namespace {

using Rels = std::vector<int>;

TEST(DcgTest, HandExamples) {
  EXPECT_EQ(dcg_at_k(Rels{0, 0, 0}, 10), 0.0);
  EXPECT_DOUBLE_EQ(dcg_at_k(Rels{3}, 10), 7.0);
  EXPECT_NEAR(dcg_at_k(Rels{0, 1, 2}, 10), 2.1309, 1e-4);
  EXPECT_NEAR(dcg_at_k(Rels{0, 1, 2}, 10), 1.0 / std::log2(3.0) + 1.5, 1e-12);
}

TEST(DcgTest, CutoffTruncates) {
  EXPECT_DOUBLE_EQ(dcg_at_k(Rels{1, 4, 4}, 1), 1.0);
  EXPECT_DOUBLE_EQ(dcg_at_k(Rels{}, 5), 0.0);
}

TEST(DcgTest, Errors) {
  EXPECT_THROW(dcg_at_k(Rels{1}, 0), Error);
  EXPECT_THROW(dcg_at_k(Rels{1, -1}, 5), Error);
}

TEST(NdcgTest, HandExample) {
  EXPECT_NEAR(ndcg_at_k(Rels{0, 1, 2}, Rels{0, 1, 2}, 10), 0.5869, 1e-4);
  EXPECT_DOUBLE_EQ(ndcg_at_k(Rels{2, 1, 0}, Rels{0, 1, 2}, 10), 1.0);
}

TEST(NdcgTest, ZeroIdealScoresZero) {
  EXPECT_EQ(ndcg_at_k(Rels{0, 0}, Rels{0, 0}, 10), 0.0);
}

TEST(NdcgTest, IdealUsesAllDocuments) {
  // The displayed list misses the only relevant document.
  EXPECT_EQ(ndcg_at_k(Rels{0, 0}, Rels{0, 0, 3}, 10), 0.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k(Rels{3}, Rels{0, 0, 3}, 10), 1.0);
}

TEST(NdcgTest, RandomListsMatchOracle) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> grade(0, 4);
  std::uniform_int_distribution<std::size_t> len(1, 12);
  std::uniform_int_distribution<std::size_t> cut(1, 12);
  for (int t = 0; t < 500; ++t) {
    Rels all(len(gen));
    for (int& r : all) r = grade(gen);
    Rels ranked = all;
    std::shuffle(ranked.begin(), ranked.end(), gen);
    const std::size_t k = cut(gen);
    const double got = ndcg_at_k(ranked, all, k);
    EXPECT_NEAR(got, oracle::ndcg(ranked, all, k), 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0 + 1e-12);
  }
}

TEST(NdcgTest, SwappingUpAHigherGradeNeverHurts) {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> grade(0, 4);
  for (int t = 0; t < 300; ++t) {
    Rels ranked(8);
    for (int& r : ranked) r = grade(gen);
    std::uniform_int_distribution<std::size_t> pos(0, 7);
    std::size_t i = pos(gen), j = pos(gen);
    if (i > j) std::swap(i, j);
    if (ranked[i] >= ranked[j]) continue;
    Rels better = ranked;
    std::swap(better[i], better[j]);
    EXPECT_GE(ndcg_at_k(better, ranked, 10), ndcg_at_k(ranked, ranked, 10));
  }
}

TEST(NdcgTest, OnlyTopKMatters) {
  const Rels all{4, 3, 0, 1, 2, 0, 0};
  EXPECT_DOUBLE_EQ(ndcg_at_k(Rels{4, 3, 0, 1}, all, 2), ndcg_at_k(Rels{4, 3, 2, 2}, all, 2));
}

TEST(RankByScoreTest, StableDescending) {
  EXPECT_EQ(rank_by_score(std::vector<double>{0.1, 0.5, 0.1, 0.9}),
            (std::vector<std::size_t>{3, 1, 0, 2}));
  EXPECT_EQ(rank_by_score(std::vector<double>{0, 0, 0}),
            (std::vector<std::size_t>{0, 1, 2}));
}

Dataset small_dataset() {
  return parse_letor(
      "2 qid:1 1:0.9 2:0.1\n0 qid:1 1:0.1 2:0.9\n1 qid:1 1:0.5 2:0.5\n"
      "0 qid:2 1:0.3 2:0.3\n0 qid:2 1:0.2 2:0.2\n"
      "0 qid:3 1:0.0 2:1.0\n3 qid:3 1:1.0 2:0.0\n");
}

TEST(OfflineEvalTest, ZeroModelKeepsInputOrder) {
  const auto data = small_dataset();
  const ModelSpec spec{ModelKind::kLinear, 2, 0};
  double expected = 0.0;
  for (const auto& q : data.queries) expected += oracle::ndcg(q.relevances(), q.relevances(), 10);
  expected /= static_cast<double>(data.queries.size());
  EXPECT_NEAR(offline_eval(spec, ParamVector{0, 0}, data), expected, 1e-12);
}

TEST(OfflineEvalTest, PerfectRankerScoresOneExceptZeroIdeal) {
  const auto data = small_dataset();
  const ModelSpec spec{ModelKind::kLinear, 2, 0};
  // Query 2 has no relevant documents and contributes 0.
  EXPECT_NEAR(offline_eval(spec, ParamVector{1, -1}, data), 2.0 / 3.0, 1e-12);
}

TEST(OfflineEvalTest, SyntheticTrueWeightsScoreOne) {
  const auto synth = make_separable_dataset({50, 10, 4, 5, 3});
  const ModelSpec spec{ModelKind::kLinear, 4, 0};
  double zero_ideal = 0.0;
  for (const auto& q : synth.dataset.queries) {
    const auto r = q.relevances();
    if (std::all_of(r.begin(), r.end(), [](int g) { return g == 0; })) zero_ideal += 1.0;
  }
  const double expected = 1.0 - zero_ideal / 50.0;
  EXPECT_NEAR(offline_eval(spec, synth.true_weights, synth.dataset), expected, 1e-12);
}

TEST(OfflineEvalTest, RandomModelsMatchBruteForce) {
  std::mt19937_64 gen(9);
  const auto synth = make_separable_dataset({30, 8, 3, 5, 4});
  for (const auto kind : {ModelKind::kLinear, ModelKind::kNeural}) {
    const ModelSpec spec{kind, 3, 4};
    for (int t = 0; t < 10; ++t) {
      const auto p = oracle::random_vec(gen, spec.param_count());
      double sum = 0.0;
      for (const auto& q : synth.dataset.queries) {
        std::vector<std::pair<double, std::size_t>> keyed;
        for (std::size_t d = 0; d < q.documents.size(); ++d) {
          keyed.emplace_back(-score(spec, p, q.documents[d].features), d);
        }
        std::sort(keyed.begin(), keyed.end());
        Rels ranked;
        for (const auto& kv : keyed) ranked.push_back(q.documents[kv.second].relevance);
        sum += oracle::ndcg(ranked, q.relevances(), 10);
      }
      EXPECT_NEAR(offline_eval(spec, p, synth.dataset), sum / 30.0, 1e-12);
    }
  }
}

TEST(OfflineEvalTest, EmptyTestSetThrows) {
  EXPECT_THROW(offline_eval({ModelKind::kLinear, 2, 0}, ParamVector{0, 0}, Dataset{}), Error);
}

}  // namespace
}  // namespace foltr
