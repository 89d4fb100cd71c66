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

#include "foltr/attacks.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "foltr/error.h"

namespace foltr {

namespace {

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double distance(const ParamVector& a, const ParamVector& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double norm(const ParamVector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void check_known(const AttackContext& ctx, std::size_t n, std::size_t m) {
  if (m == 0) throw Error("attack crafting needs at least one attacker");
  const std::size_t expected = ctx.knowledge == Knowledge::kFull ? n : m;
  if (ctx.known_updates.size() != expected) {
    throw Error("attack context holds " +
                std::to_string(ctx.known_updates.size()) +
                " known updates, expected " + std::to_string(expected));
  }
  for (const auto& u : ctx.known_updates) {
    if (u.size() != ctx.global_params.size()) {
      throw Error("known update length differs from the global model");
    }
  }
}

}  // namespace

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return "none";
    case AttackKind::kDataPoison:
      return "data_poison";
    case AttackKind::kLie:
      return "lie";
    case AttackKind::kFangKrum:
      return "fang_krum";
    case AttackKind::kFangTrimmedMean:
      return "fang_trmean";
  }
  return "unknown";
}

std::string_view to_string(Knowledge knowledge) {
  return knowledge == Knowledge::kFull ? "full" : "partial";
}

AttackKind parse_attack_kind(std::string_view name) {
  for (auto kind : {AttackKind::kNone, AttackKind::kDataPoison, AttackKind::kLie,
                    AttackKind::kFangKrum, AttackKind::kFangTrimmedMean}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error("unknown attack '" + std::string(name) + "'");
}

Knowledge parse_knowledge(std::string_view name) {
  if (name == "full") return Knowledge::kFull;
  if (name == "partial") return Knowledge::kPartial;
  throw Error("unknown knowledge level '" + std::string(name) + "'");
}

bool is_model_poisoning(AttackKind kind) {
  return kind == AttackKind::kLie || kind == AttackKind::kFangKrum ||
         kind == AttackKind::kFangTrimmedMean;
}

void ThreatModel::validate() const {
  if (n == 0) throw Error("the federation needs at least one client");
  if (2 * m >= n) {
    throw Error("malicious clients must be fewer than half of n (n = " +
                std::to_string(n) + ", m = " + std::to_string(m) + ")");
  }
}

AttackContext make_attack_context(const ThreatModel& threat,
                                  std::span<const ParamVector> before_attack,
                                  std::span<const double> global_params,
                                  const AggregatorSpec& aggregator) {
  if (before_attack.size() != threat.n) {
    throw Error("expected one before-attack update per client");
  }
  AttackContext ctx;
  const std::size_t visible =
      threat.knowledge == Knowledge::kFull ? threat.n : threat.m;
  ctx.known_updates.assign(before_attack.begin(),
                           before_attack.begin() + static_cast<std::ptrdiff_t>(visible));
  ctx.global_params.assign(global_params.begin(), global_params.end());
  ctx.aggregator = aggregator;
  ctx.knowledge = threat.knowledge;
  return ctx;
}

std::vector<ClickModel> apply_data_poison(const ThreatModel& threat,
                                          const ClickModel& benign) {
  threat.validate();
  const ClickModel poison = builtin_model("poison", benign.grade_levels());
  std::vector<ClickModel> models;
  models.reserve(threat.n);
  for (std::size_t c = 0; c < threat.n; ++c) {
    models.push_back(threat.is_malicious(c) ? poison : benign);
  }
  return models;
}

MomentEstimate coordinate_moments(std::span<const ParamVector> updates) {
  if (updates.empty()) throw Error("moments of an empty update list");
  const std::size_t dim = updates.front().size();
  const double count = static_cast<double>(updates.size());
  MomentEstimate est{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
  for (const auto& u : updates) {
    if (u.size() != dim) throw Error("updates differ in length");
    for (std::size_t j = 0; j < dim; ++j) est.mean[j] += u[j];
  }
  for (double& v : est.mean) v /= count;
  for (const auto& u : updates) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = u[j] - est.mean[j];
      est.stddev[j] += d * d;
    }
  }
  for (double& v : est.stddev) v = std::sqrt(v / count);
  return est;
}

double lie_z(std::size_t n, std::size_t m) {
  if (m == 0) throw Error("LIE needs at least one attacker");
  if (n <= m) throw Error("LIE needs at least one benign client");
  const auto supporters =
      static_cast<long>(n / 2 + 1) - static_cast<long>(m);
  const double benign = static_cast<double>(n - m);
  const double p = (benign - static_cast<double>(supporters)) / benign;
  if (!(p > 0.0 && p < 1.0)) {
    throw Error("LIE quantile argument outside (0, 1) for n = " +
                std::to_string(n) + ", m = " + std::to_string(m));
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

ParamVector lie_craft(std::span<const ParamVector> attacker_updates,
                      std::size_t n, std::size_t m) {
  if (attacker_updates.size() != m) {
    throw Error("LIE expects exactly m attacker updates");
  }
  const double z = lie_z(n, m);
  const auto est = coordinate_moments(attacker_updates);
  ParamVector crafted(est.mean.size());
  for (std::size_t j = 0; j < crafted.size(); ++j) {
    crafted[j] = est.mean[j] - z * est.stddev[j];
  }
  return crafted;
}

std::vector<double> deviation_direction(const AttackContext& ctx) {
  const auto est = coordinate_moments(ctx.known_updates);
  std::vector<double> s(est.mean.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    s[j] = -sign_of(est.mean[j] - ctx.global_params[j]);
  }
  return s;
}

FangKrumResult fang_krum_craft(const AttackContext& ctx, std::size_t n,
                               std::size_t m, Rng& rng,
                               const FangKrumOptions& options) {
  check_known(ctx, n, m);
  const auto direction = deviation_direction(ctx);
  const std::size_t dim = ctx.global_params.size();

  double diameter = 0.0;
  for (std::size_t i = 0; i < ctx.known_updates.size(); ++i) {
    for (std::size_t j = i + 1; j < ctx.known_updates.size(); ++j) {
      diameter = std::max(diameter,
                          distance(ctx.known_updates[i], ctx.known_updates[j]));
    }
  }
  double lambda = options.initial_lambda.value_or(diameter > 0.0 ? diameter : 1.0);

  // Jitter directions are drawn once so every candidate lambda is judged on
  // the same supporter layout.
  std::vector<std::vector<double>> jitter(m - 1, std::vector<double>(dim));
  for (auto& row : jitter) {
    for (double& v : row) v = rng.uniform(-1.0, 1.0);
  }

  // Updates Krum is simulated on: m malicious slots first, then the updates
  // the attacker believes the benign clients will send. Under partial
  // knowledge the colluders' own before-attack updates stand in for those.
  const std::size_t others_begin = ctx.knowledge == Knowledge::kFull ? m : 0;
  std::vector<ParamVector> assembled(m);
  for (std::size_t i = others_begin; i < ctx.known_updates.size(); ++i) {
    assembled.push_back(ctx.known_updates[i]);
  }
  const std::size_t total = assembled.size();
  const std::size_t neighbors = std::clamp<long>(
      static_cast<long>(total) - static_cast<long>(m) - 2, 1,
      static_cast<long>(total) - 1);

  FangKrumResult result;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.lambda_trace.push_back(lambda);
    ParamVector crafted(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      crafted[j] = ctx.global_params[j] + lambda * direction[j];
    }
    const double eps = options.jitter_scale * norm(crafted);
    assembled[0] = crafted;
    for (std::size_t i = 1; i < m; ++i) {
      assembled[i] = crafted;
      for (std::size_t j = 0; j < dim; ++j) assembled[i][j] += eps * jitter[i - 1][j];
    }
    result.lambda = lambda;

    const auto scores = krum_scores(assembled, neighbors);
    const auto best = static_cast<std::size_t>(
        std::min_element(scores.begin(), scores.end()) - scores.begin());
    if (best < m) {
      result.success = true;
      break;
    }
    if (iter + 1 == options.max_iterations || lambda / 2.0 < options.min_lambda) {
      break;
    }
    lambda /= 2.0;
    ++result.halvings;
  }
  result.crafted.assign(assembled.begin(),
                        assembled.begin() + static_cast<std::ptrdiff_t>(m));
  return result;
}

std::vector<ParamVector> fang_trmean_craft(const AttackContext& ctx,
                                           std::size_t n, std::size_t m,
                                           Rng& rng,
                                           const FangTrimOptions& options) {
  check_known(ctx, n, m);
  if (!(options.b > 1.0)) throw Error("Fang trim attack needs b > 1");
  const double b = options.b;
  const auto direction = deviation_direction(ctx);
  const auto est = coordinate_moments(ctx.known_updates);
  const std::size_t dim = ctx.global_params.size();

  std::vector<double> lo(dim), hi(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const double mu = est.mean[j];
    const double sd = est.stddev[j];
    if (direction[j] == 0.0) {
      lo[j] = hi[j] = mu;
    } else if (ctx.knowledge == Knowledge::kPartial) {
      lo[j] = direction[j] > 0.0 ? mu + 3.0 * sd : mu - 4.0 * sd;
      hi[j] = direction[j] > 0.0 ? mu + 4.0 * sd : mu - 3.0 * sd;
    } else if (direction[j] > 0.0) {
      double w_max = ctx.known_updates.front()[j];
      for (const auto& u : ctx.known_updates) w_max = std::max(w_max, u[j]);
      lo[j] = w_max;
      hi[j] = w_max > 0.0 ? b * w_max : w_max / b;
    } else {
      double w_min = ctx.known_updates.front()[j];
      for (const auto& u : ctx.known_updates) w_min = std::min(w_min, u[j]);
      lo[j] = w_min < 0.0 ? b * w_min : w_min / b;
      hi[j] = w_min;
    }
  }

  std::vector<ParamVector> crafted(m, ParamVector(dim));
  for (auto& vec : crafted) {
    for (std::size_t j = 0; j < dim; ++j) vec[j] = rng.uniform(lo[j], hi[j]);
  }
  return crafted;
}

}  // namespace foltr
