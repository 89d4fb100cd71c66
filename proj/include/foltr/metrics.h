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

#ifndef FOLTR_METRICS_H_
#define FOLTR_METRICS_H_

// Offline ranking quality: DCG@k with exponential gain 2^rel - 1 and
// log2(i + 1) discount, and its normalized form.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "foltr/letor.h"
#include "foltr/ranking_model.h"

namespace foltr {

inline constexpr std::size_t kDefaultCutoff = 10;

double dcg_at_k(std::span<const int> relevances_in_rank_order, std::size_t k);

// Queries whose ideal DCG is zero score 0.
double ndcg_at_k(std::span<const int> ranked_relevances,
                 std::span<const int> all_relevances, std::size_t k);

// Document indices by descending score; equal scores keep input order.
std::vector<std::size_t> rank_by_score(std::span<const double> scores);

// Unweighted mean nDCG@k over the queries of `test`.
double offline_eval(const ModelSpec& spec, std::span<const double> params,
                    const Dataset& test, std::size_t k = kDefaultCutoff);

struct MetricRecord {
  std::size_t round = 0;
  double ndcg_at_10 = 0.0;
  std::string config_fingerprint;
  std::uint64_t seed = 0;

  bool operator==(const MetricRecord&) const = default;
};

}  // namespace foltr

#endif  // FOLTR_METRICS_H_
