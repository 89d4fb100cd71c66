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

#ifndef FOLTR_AGGREGATION_H_
#define FOLTR_AGGREGATION_H_

// Server-side aggregation rules over flat parameter vectors: FedAvg and the
// Byzantine-robust Krum, Multi-Krum, Trimmed Mean and coordinate Median.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "foltr/ranking_model.h"

namespace foltr {

enum class AggregationRule { kFedAvg, kKrum, kMultiKrum, kTrimmedMean, kMedian };

std::string_view to_string(AggregationRule rule);
AggregationRule parse_aggregation_rule(std::string_view name);

struct AggregatorSpec {
  AggregationRule rule = AggregationRule::kFedAvg;
  // Number of malicious clients the server assumes.
  std::size_t m = 0;
  // Multi-Krum selection count; defaults to n - m.
  std::optional<std::size_t> f;
  // Trimmed Mean trim count per side; defaults to m.
  std::optional<std::size_t> beta;

  std::size_t resolved_f(std::size_t n) const { return f.value_or(n - m); }
  std::size_t resolved_beta() const { return beta.value_or(m); }

  // Throws when the rule cannot run with n clients.
  void validate(std::size_t n) const;
  bool operator==(const AggregatorSpec&) const = default;
};

// N_u-weighted coordinate-wise mean.
ParamVector fedavg(std::span<const ClientUpdate> updates);

// Krum score s(i): sum of the Euclidean distances from update i to its
// `neighbors` closest other updates.
std::vector<double> krum_scores(std::span<const ParamVector> updates,
                                std::size_t neighbors);

// Index of the update with the smallest Krum score (n - m - 2 neighbors);
// ties go to the lowest index.
std::size_t krum_select(std::span<const ParamVector> updates, std::size_t m);

ParamVector krum(std::span<const ParamVector> updates, std::size_t m);

// Unweighted mean of the f updates with the smallest Krum scores.
ParamVector multi_krum(std::span<const ParamVector> updates, std::size_t m,
                       std::size_t f);

ParamVector trimmed_mean(std::span<const ParamVector> updates,
                         std::size_t beta);

// Even n averages the two middle values.
ParamVector coordinate_median(std::span<const ParamVector> updates);

struct AggregationResult {
  ParamVector params;
  // Krum / Multi-Krum only.
  std::vector<double> krum_scores;
  std::vector<std::size_t> selected;
};

// Dispatches on spec.rule. Robust rules ignore the interaction counts.
AggregationResult aggregate(const AggregatorSpec& spec,
                            std::span<const ClientUpdate> updates);

}  // namespace foltr

#endif  // FOLTR_AGGREGATION_H_
