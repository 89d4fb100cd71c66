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

#ifndef FOLTR_ATTACKS_H_
#define FOLTR_ATTACKS_H_

// Untargeted poisoning attacks. The first m clients are malicious and
// collude: they share training data and before-attack model updates.
//
//  - data poisoning: malicious clients click with the "poison" SDBN model;
//    their model updates are computed honestly from those clicks.
//  - LIE: every malicious client submits mu - z * sigma computed over the
//    colluders' before-attack updates.
//  - Fang (Krum / Multi-Krum): w_g + lambda * s with s = -sign(mu - w_g),
//    lambda halved until Krum picks the crafted update.
//  - Fang (Trimmed Mean / Median): per coordinate, values sampled beyond the
//    benign extreme in the direction s.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "foltr/aggregation.h"
#include "foltr/click_model.h"
#include "foltr/ranking_model.h"
#include "foltr/rng.h"

namespace foltr {

enum class AttackKind { kNone, kDataPoison, kLie, kFangKrum, kFangTrimmedMean };
enum class Knowledge { kFull, kPartial };

std::string_view to_string(AttackKind kind);
std::string_view to_string(Knowledge knowledge);
AttackKind parse_attack_kind(std::string_view name);
Knowledge parse_knowledge(std::string_view name);

bool is_model_poisoning(AttackKind kind);

struct ThreatModel {
  std::size_t n = 10;
  std::size_t m = 0;
  Knowledge knowledge = Knowledge::kPartial;
  AttackKind attack = AttackKind::kNone;

  bool is_malicious(std::size_t client) const { return client < m; }
  // 0 <= m < n / 2.
  void validate() const;
  bool operator==(const ThreatModel&) const = default;
};

// What the colluding attackers can see in one round.
struct AttackContext {
  // All n before-attack updates under full knowledge; only the m attacker
  // updates under partial knowledge.
  std::vector<ParamVector> known_updates;
  ParamVector global_params;
  AggregatorSpec aggregator;
  Knowledge knowledge = Knowledge::kPartial;
};

AttackContext make_attack_context(const ThreatModel& threat,
                                  std::span<const ParamVector> before_attack,
                                  std::span<const double> global_params,
                                  const AggregatorSpec& aggregator);

// Click model per client: poison for the first m, `benign` otherwise.
std::vector<ClickModel> apply_data_poison(const ThreatModel& threat,
                                          const ClickModel& benign);

// Coordinate-wise mean and population standard deviation.
struct MomentEstimate {
  std::vector<double> mean;
  std::vector<double> stddev;
};
MomentEstimate coordinate_moments(std::span<const ParamVector> updates);

// z = Phi^{-1}((n - m - s) / (n - m)) with s = floor(n / 2 + 1) - m.
double lie_z(std::size_t n, std::size_t m);

// mu - z * sigma over the m attacker updates; every attacker submits it.
ParamVector lie_craft(std::span<const ParamVector> attacker_updates,
                      std::size_t n, std::size_t m);

// s = -sign(mean(known) - w_g), with sign(0) = 0.
std::vector<double> deviation_direction(const AttackContext& ctx);

struct FangKrumOptions {
  // Overrides the starting lambda (largest pairwise distance among the
  // known updates).
  std::optional<double> initial_lambda;
  double min_lambda = 1e-5;
  int max_iterations = 60;
  // Supporters are jittered by jitter_scale * ||crafted||; zero submits
  // identical copies.
  double jitter_scale = 1e-4;
};

struct FangKrumResult {
  std::vector<ParamVector> crafted;
  double lambda = 0.0;
  // Every lambda that was tried, in order.
  std::vector<double> lambda_trace;
  std::size_t halvings = 0;
  // False when the search ran out before Krum selected a crafted update.
  bool success = false;
};

FangKrumResult fang_krum_craft(const AttackContext& ctx, std::size_t n,
                               std::size_t m, Rng& rng,
                               const FangKrumOptions& options = {});

struct FangTrimOptions {
  double b = 2.0;
};

std::vector<ParamVector> fang_trmean_craft(const AttackContext& ctx,
                                           std::size_t n, std::size_t m,
                                           Rng& rng,
                                           const FangTrimOptions& options = {});

}  // namespace foltr

#endif  // FOLTR_ATTACKS_H_
