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

#include "foltr/aggregation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "foltr/error.h"

namespace foltr {

namespace {

std::size_t common_dim(std::span<const ParamVector> updates) {
  if (updates.empty()) throw Error("aggregation needs at least one update");
  const std::size_t dim = updates.front().size();
  for (const auto& u : updates) {
    if (u.size() != dim) throw Error("client updates differ in length");
  }
  return dim;
}

double euclidean(const ParamVector& a, const ParamVector& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

void check_krum(std::size_t n, std::size_t m) {
  if (n < m + 3) {
    throw Error("Krum needs n >= m + 3 (n = " + std::to_string(n) +
                ", m = " + std::to_string(m) + ")");
  }
}

// Indices ordered by (score, index).
std::vector<std::size_t> ascending_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  return order;
}

ParamVector mean_of(std::span<const ParamVector> updates,
                    std::span<const std::size_t> chosen) {
  ParamVector out(updates.front().size(), 0.0);
  for (std::size_t idx : chosen) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += updates[idx][j];
  }
  for (double& v : out) v /= static_cast<double>(chosen.size());
  return out;
}

std::vector<ParamVector> params_of(std::span<const ClientUpdate> updates) {
  std::vector<ParamVector> out;
  out.reserve(updates.size());
  for (const auto& u : updates) out.push_back(u.params);
  return out;
}

}  // namespace

std::string_view to_string(AggregationRule rule) {
  switch (rule) {
    case AggregationRule::kFedAvg:
      return "fedavg";
    case AggregationRule::kKrum:
      return "krum";
    case AggregationRule::kMultiKrum:
      return "multi_krum";
    case AggregationRule::kTrimmedMean:
      return "trimmed_mean";
    case AggregationRule::kMedian:
      return "median";
  }
  return "unknown";
}

AggregationRule parse_aggregation_rule(std::string_view name) {
  for (auto rule : {AggregationRule::kFedAvg, AggregationRule::kKrum,
                    AggregationRule::kMultiKrum, AggregationRule::kTrimmedMean,
                    AggregationRule::kMedian}) {
    if (to_string(rule) == name) return rule;
  }
  throw Error("unknown aggregation rule '" + std::string(name) + "'");
}

void AggregatorSpec::validate(std::size_t n) const {
  switch (rule) {
    case AggregationRule::kFedAvg:
    case AggregationRule::kMedian:
      if (n == 0) throw Error("aggregation needs at least one client");
      return;
    case AggregationRule::kKrum:
      check_krum(n, m);
      return;
    case AggregationRule::kMultiKrum: {
      check_krum(n, m);
      const std::size_t sel = resolved_f(n);
      if (sel < 1 || sel > n) {
        throw Error("Multi-Krum f must lie in [1, n]");
      }
      return;
    }
    case AggregationRule::kTrimmedMean:
      if (n < 2 * resolved_beta() + 1) {
        throw Error("Trimmed Mean needs n - 2*beta >= 1 (n = " +
                    std::to_string(n) +
                    ", beta = " + std::to_string(resolved_beta()) + ")");
      }
      return;
  }
}

ParamVector fedavg(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw Error("aggregation needs at least one update");
  const std::size_t dim = updates.front().params.size();
  double total = 0.0;
  for (const auto& u : updates) {
    if (u.params.size() != dim) throw Error("client updates differ in length");
    total += static_cast<double>(u.num_interactions);
  }
  if (total <= 0.0) throw Error("FedAvg needs a positive interaction count");

  ParamVector out(dim, 0.0);
  for (const auto& u : updates) {
    const double w = static_cast<double>(u.num_interactions) / total;
    for (std::size_t j = 0; j < dim; ++j) out[j] += w * u.params[j];
  }
  return out;
}

std::vector<double> krum_scores(std::span<const ParamVector> updates,
                                std::size_t neighbors) {
  common_dim(updates);
  const std::size_t n = updates.size();
  if (neighbors == 0 || neighbors >= n) {
    throw Error("Krum neighbor count must lie in [1, n - 1]");
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = euclidean(updates[i], updates[j]);
    }
  }
  std::vector<double> scores(n, 0.0);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(dist[i * n + j]);
    }
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(neighbors),
                      row.end());
    // Summed in ascending order so the result does not depend on client order.
    for (std::size_t k = 0; k < neighbors; ++k) scores[i] += row[k];
  }
  return scores;
}

std::size_t krum_select(std::span<const ParamVector> updates, std::size_t m) {
  check_krum(updates.size(), m);
  const auto scores = krum_scores(updates, updates.size() - m - 2);
  return ascending_order(scores).front();
}

ParamVector krum(std::span<const ParamVector> updates, std::size_t m) {
  return updates[krum_select(updates, m)];
}

ParamVector multi_krum(std::span<const ParamVector> updates, std::size_t m,
                       std::size_t f) {
  const std::size_t n = updates.size();
  check_krum(n, m);
  if (f < 1 || f > n) throw Error("Multi-Krum f must lie in [1, n]");
  const auto order = ascending_order(krum_scores(updates, n - m - 2));
  return mean_of(updates, std::span(order).first(f));
}

ParamVector trimmed_mean(std::span<const ParamVector> updates,
                         std::size_t beta) {
  const std::size_t dim = common_dim(updates);
  const std::size_t n = updates.size();
  if (n < 2 * beta + 1) throw Error("Trimmed Mean needs n - 2*beta >= 1");
  ParamVector out(dim);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i][j];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (std::size_t i = beta; i < n - beta; ++i) sum += column[i];
    out[j] = sum / static_cast<double>(n - 2 * beta);
  }
  return out;
}

ParamVector coordinate_median(std::span<const ParamVector> updates) {
  const std::size_t dim = common_dim(updates);
  const std::size_t n = updates.size();
  ParamVector out(dim);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = updates[i][j];
    std::sort(column.begin(), column.end());
    out[j] = n % 2 == 1 ? column[n / 2]
                        : (column[n / 2 - 1] + column[n / 2]) / 2.0;
  }
  return out;
}

AggregationResult aggregate(const AggregatorSpec& spec,
                            std::span<const ClientUpdate> updates) {
  const std::size_t n = updates.size();
  spec.validate(n);
  AggregationResult result;
  if (spec.rule == AggregationRule::kFedAvg) {
    result.params = fedavg(updates);
    return result;
  }

  const auto params = params_of(updates);
  switch (spec.rule) {
    case AggregationRule::kKrum:
    case AggregationRule::kMultiKrum: {
      result.krum_scores = krum_scores(params, n - spec.m - 2);
      const auto order = ascending_order(result.krum_scores);
      const std::size_t take =
          spec.rule == AggregationRule::kKrum ? 1 : spec.resolved_f(n);
      result.selected.assign(order.begin(),
                             order.begin() + static_cast<std::ptrdiff_t>(take));
      result.params = mean_of(params, result.selected);
      break;
    }
    case AggregationRule::kTrimmedMean:
      result.params = trimmed_mean(params, spec.resolved_beta());
      break;
    case AggregationRule::kMedian:
      result.params = coordinate_median(params);
      break;
    case AggregationRule::kFedAvg:
      break;
  }
  return result;
}

}  // namespace foltr
