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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "foltr/error.h"

namespace foltr {

double dcg_at_k(std::span<const int> relevances_in_rank_order, std::size_t k) {
  if (k == 0) throw Error("DCG cutoff must be at least 1");
  const std::size_t len = std::min(k, relevances_in_rank_order.size());
  double dcg = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const int rel = relevances_in_rank_order[i];
    if (rel < 0) throw Error("negative relevance label");
    dcg += (std::exp2(static_cast<double>(rel)) - 1.0) /
           std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg;
}

double ndcg_at_k(std::span<const int> ranked_relevances,
                 std::span<const int> all_relevances, std::size_t k) {
  std::vector<int> ideal(all_relevances.begin(), all_relevances.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double ideal_dcg = dcg_at_k(ideal, k);
  const double dcg = dcg_at_k(ranked_relevances, k);
  if (ideal_dcg <= 0.0) return 0.0;
  return dcg / ideal_dcg;
}

std::vector<std::size_t> rank_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

double offline_eval(const ModelSpec& spec, std::span<const double> params,
                    const Dataset& test, std::size_t k) {
  if (test.empty()) throw Error("offline evaluation needs a non-empty test set");
  double total = 0.0;
  std::vector<int> ranked;
  for (const auto& query : test.queries) {
    const auto scores = score_documents(spec, params, query);
    const auto order = rank_by_score(scores);
    const auto all = query.relevances();
    ranked.clear();
    for (std::size_t idx : order) ranked.push_back(all[idx]);
    total += ndcg_at_k(ranked, all, k);
  }
  return total / static_cast<double>(test.queries.size());
}

}  // namespace foltr
