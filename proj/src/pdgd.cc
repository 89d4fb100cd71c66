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

#include "foltr/pdgd.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "foltr/error.h"

namespace foltr {

namespace {

double log_sum_exp(std::span<const double> scores,
                   const std::vector<bool>& placed) {
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!placed[i]) max = std::max(max, scores[i]);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!placed[i]) sum += std::exp(scores[i] - max);
  }
  return max + std::log(sum);
}

}  // namespace

std::vector<std::size_t> sample_ranking(std::span<const double> scores,
                                        std::size_t k, Rng& rng) {
  if (k == 0) throw Error("result page length must be at least 1");
  if (scores.empty()) throw Error("cannot rank a query without documents");
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error("non-finite ranking score");
  }

  const std::size_t n = scores.size();
  const std::size_t len = std::min(k, n);
  std::vector<std::size_t> remaining(n);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = i;
  std::vector<double> weights(n);
  std::vector<std::size_t> ranking;
  ranking.reserve(len);

  for (std::size_t slot = 0; slot < len; ++slot) {
    double max = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : remaining) max = std::max(max, scores[idx]);
    double total = 0.0;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      weights[r] = std::exp(scores[remaining[r]] - max);
      total += weights[r];
    }
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    std::size_t chosen = remaining.size() - 1;
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      cumulative += weights[r];
      if (target < cumulative) {
        chosen = r;
        break;
      }
    }
    ranking.push_back(remaining[chosen]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return ranking;
}

std::vector<std::size_t> sample_serp(const ModelSpec& spec,
                                     std::span<const double> params,
                                     const QueryGroup& query, std::size_t k,
                                     Rng& rng) {
  const auto scores = score_documents(spec, params, query);
  return sample_ranking(scores, k, rng);
}

double plackett_luce_log_prob(std::span<const double> scores,
                              std::span<const std::size_t> ranking) {
  std::vector<bool> placed(scores.size(), false);
  double log_p = 0.0;
  for (std::size_t idx : ranking) {
    if (idx >= scores.size() || placed[idx]) {
      throw Error("ranking must hold distinct valid document indices");
    }
    log_p += scores[idx] - log_sum_exp(scores, placed);
    placed[idx] = true;
  }
  return log_p;
}

std::vector<PreferencePair> infer_preferences(const Interaction& interaction) {
  const auto& clicks = interaction.clicks;
  if (clicks.size() != interaction.displayed.size()) {
    throw Error("clicks and displayed documents differ in length");
  }
  std::vector<PreferencePair> pairs;
  const auto last_click = std::find(clicks.rbegin(), clicks.rend(), 1);
  if (last_click == clicks.rend()) return pairs;
  const auto last =
      static_cast<std::size_t>(clicks.rend() - last_click) - 1;
  const bool has_next = last + 1 < clicks.size();

  for (std::size_t c = 0; c <= last; ++c) {
    if (!clicks[c]) continue;
    const std::size_t winner = interaction.displayed[c];
    for (std::size_t u = 0; u < c; ++u) {
      if (!clicks[u]) pairs.push_back({winner, interaction.displayed[u], 0.0});
    }
    if (has_next) {
      pairs.push_back({winner, interaction.displayed[last + 1], 0.0});
    }
  }
  return pairs;
}

double pair_weight(std::span<const double> scores,
                   std::span<const std::size_t> serp,
                   const PreferencePair& pair) {
  const auto a = std::find(serp.begin(), serp.end(), pair.preferred);
  const auto b = std::find(serp.begin(), serp.end(), pair.dispreferred);
  if (a == serp.end() || b == serp.end()) {
    throw Error("preference pair is not part of the result page");
  }
  std::vector<std::size_t> swapped(serp.begin(), serp.end());
  std::swap(swapped[static_cast<std::size_t>(a - serp.begin())],
            swapped[static_cast<std::size_t>(b - serp.begin())]);
  const double log_p = plackett_luce_log_prob(scores, serp);
  const double log_p_swapped = plackett_luce_log_prob(scores, swapped);
  // P(R*) / (P(R) + P(R*)) = 1 / (1 + P(R) / P(R*))
  return 1.0 / (1.0 + std::exp(log_p - log_p_swapped));
}

double pair_weight(const ModelSpec& spec, std::span<const double> params,
                   const QueryGroup& query, std::span<const std::size_t> serp,
                   const PreferencePair& pair) {
  const auto scores = score_documents(spec, params, query);
  return pair_weight(scores, serp, pair);
}

ParamVector pair_gradient(const ModelSpec& spec, std::span<const double> params,
                          std::span<const double> preferred_features,
                          std::span<const double> dispreferred_features) {
  const double s_p = score(spec, params, preferred_features);
  const double s_d = score(spec, params, dispreferred_features);
  const double sigma = 1.0 / (1.0 + std::exp(s_d - s_p));
  const double slope = sigma * (1.0 - sigma);
  ParamVector grad(params.size(), 0.0);
  accumulate_score_gradient(spec, params, preferred_features, slope, grad);
  accumulate_score_gradient(spec, params, dispreferred_features, -slope, grad);
  return grad;
}

PdgdStep pdgd_update(const ModelSpec& spec, std::span<const double> params,
                     const QueryGroup& query, const ClickModel& click_model,
                     double eta, Rng& rng, std::size_t serp_length) {
  if (!(eta > 0.0)) throw Error("learning rate must be positive");
  const auto scores = score_documents(spec, params, query);

  PdgdStep step;
  step.params.assign(params.begin(), params.end());
  step.interaction.query_id = query.query_id;
  step.interaction.displayed = sample_ranking(scores, serp_length, rng);

  std::vector<int> shown_relevance;
  shown_relevance.reserve(step.interaction.displayed.size());
  for (std::size_t idx : step.interaction.displayed) {
    shown_relevance.push_back(query.documents[idx].relevance);
  }
  step.interaction.clicks =
      simulate_session(click_model, shown_relevance, rng).clicks;

  step.pairs = infer_preferences(step.interaction);
  if (step.pairs.empty()) return step;

  ParamVector grad(params.size(), 0.0);
  for (auto& pair : step.pairs) {
    pair.weight = pair_weight(scores, step.interaction.displayed, pair);
    const double s_p = scores[pair.preferred];
    const double s_d = scores[pair.dispreferred];
    const double sigma = 1.0 / (1.0 + std::exp(s_d - s_p));
    const double coeff = pair.weight * sigma * (1.0 - sigma);
    accumulate_score_gradient(spec, params,
                              query.documents[pair.preferred].features, coeff,
                              grad);
    accumulate_score_gradient(spec, params,
                              query.documents[pair.dispreferred].features,
                              -coeff, grad);
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    step.params[i] += eta * grad[i];
  }
  return step;
}

ClientUpdate client_update(const ModelSpec& spec, std::span<const double> params,
                           const Dataset& train, const ClickModel& click_model,
                           std::size_t n_queries, double eta, Rng& rng,
                           std::size_t serp_length) {
  if (n_queries == 0) throw Error("a client must issue at least one query");
  if (train.empty()) throw Error("client training split is empty");
  ClientUpdate update{ParamVector(params.begin(), params.end()), n_queries};
  for (std::size_t i = 0; i < n_queries; ++i) {
    const auto& query = train.queries[rng.index(train.queries.size())];
    update.params = pdgd_update(spec, update.params, query, click_model, eta,
                                rng, serp_length)
                        .params;
  }
  return update;
}

}  // namespace foltr
