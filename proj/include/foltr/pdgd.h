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

#ifndef FOLTR_PDGD_H_
#define FOLTR_PDGD_H_

// Pairwise Differentiable Gradient Descent: the local online update each
// client performs per simulated query.
//
//  1. Sample a result page from a Plackett-Luce distribution over the
//     ranker's scores.
//  2. Simulate clicks with an SDBN click model.
//  3. Infer pairwise preferences from the clicks.
//  4. Weight each pair by rho = P(R*) / (P(R) + P(R*)), R* being the page
//     with the pair swapped, and ascend the pairwise sigmoid
//     e^{s_i} / (e^{s_i} + e^{s_j}).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "foltr/click_model.h"
#include "foltr/letor.h"
#include "foltr/ranking_model.h"
#include "foltr/rng.h"

namespace foltr {

inline constexpr std::size_t kDefaultSerpLength = 10;

struct Interaction {
  std::string query_id;
  // Document indices into the query group, in display order.
  std::vector<std::size_t> displayed;
  std::vector<std::uint8_t> clicks;
};

struct PreferencePair {
  std::size_t preferred = 0;
  std::size_t dispreferred = 0;
  double weight = 0.0;

  bool operator==(const PreferencePair&) const = default;
};

// Plackett-Luce sampling without replacement; returns min(k, |scores|)
// indices. Ties are broken by the random draws only.
std::vector<std::size_t> sample_ranking(std::span<const double> scores,
                                        std::size_t k, Rng& rng);

std::vector<std::size_t> sample_serp(const ModelSpec& spec,
                                     std::span<const double> params,
                                     const QueryGroup& query, std::size_t k,
                                     Rng& rng);

// log P(ranking) under Plackett-Luce for a (possibly partial) top-k ranking.
// Denominators range over every candidate not yet placed, displayed or not.
double plackett_luce_log_prob(std::span<const double> scores,
                              std::span<const std::size_t> ranking);

// Each clicked document is preferred over every unclicked document displayed
// above it and over the first unclicked document below the last click.
// Weights are left at zero.
std::vector<PreferencePair> infer_preferences(const Interaction& interaction);

// rho = P(R*) / (P(R) + P(R*)), where both members of the pair appear in
// `serp` and `scores` covers every candidate of the query.
double pair_weight(std::span<const double> scores,
                   std::span<const std::size_t> serp,
                   const PreferencePair& pair);

double pair_weight(const ModelSpec& spec, std::span<const double> params,
                   const QueryGroup& query, std::span<const std::size_t> serp,
                   const PreferencePair& pair);

// Gradient of e^{s_p} / (e^{s_p} + e^{s_d}) with respect to params.
ParamVector pair_gradient(const ModelSpec& spec, std::span<const double> params,
                          std::span<const double> preferred_features,
                          std::span<const double> dispreferred_features);

struct PdgdStep {
  ParamVector params;
  Interaction interaction;
  std::vector<PreferencePair> pairs;
};

PdgdStep pdgd_update(const ModelSpec& spec, std::span<const double> params,
                     const QueryGroup& query, const ClickModel& click_model,
                     double eta, Rng& rng,
                     std::size_t serp_length = kDefaultSerpLength);

// Runs n_queries PDGD steps on queries drawn uniformly with replacement
// from `train`, starting from `params`.
ClientUpdate client_update(const ModelSpec& spec, std::span<const double> params,
                           const Dataset& train, const ClickModel& click_model,
                           std::size_t n_queries, double eta, Rng& rng,
                           std::size_t serp_length = kDefaultSerpLength);

}  // namespace foltr

#endif  // FOLTR_PDGD_H_
