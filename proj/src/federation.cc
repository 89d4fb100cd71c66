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

#include "foltr/federation.h"

#include <cmath>
#include <string>

#include "foltr/error.h"

namespace foltr {

namespace {

constexpr std::uint64_t kAttackStream = 0xA77AC4;

double l2_norm(const ParamVector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

}  // namespace

std::string_view to_string(QueryPartition partition) {
  return partition == QueryPartition::kShared ? "shared" : "disjoint";
}

QueryPartition parse_query_partition(std::string_view name) {
  if (name == "shared") return QueryPartition::kShared;
  if (name == "disjoint") return QueryPartition::kDisjoint;
  throw Error("unknown query partition '" + std::string(name) + "'");
}

void FederationConfig::validate() const {
  model.validate();
  benign_clicks.validate();
  threat.validate();
  aggregator.validate(threat.n);
  if (!(eta > 0.0)) throw Error("eta must be positive");
  if (n_queries == 0) throw Error("n_queries must be at least 1");
  if (serp_length == 0) throw Error("serp_length must be at least 1");
}

FederationState init_federation(const FederationConfig& config,
                                std::uint64_t master_seed) {
  config.validate();
  FederationState state;
  state.global_params = init_params(config.model, mix_seed({master_seed, 0}));
  for (std::size_t c = 0; c < config.threat.n; ++c) {
    state.client_seeds.push_back(mix_seed({master_seed, 1, c}));
    state.roles.push_back(config.threat.is_malicious(c) ? ClientRole::kMalicious
                                                        : ClientRole::kBenign);
  }
  state.attack_seed = mix_seed({master_seed, kAttackStream});
  return state;
}

ClientShards::ClientShards(const Dataset& train, QueryPartition partition,
                           std::size_t n)
    : n_(n) {
  if (partition == QueryPartition::kShared) {
    shards_.push_back(train);
  } else {
    shards_ = partition_queries(train, n);
  }
}

const Dataset& ClientShards::for_client(std::size_t client) const {
  return shards_.size() == 1 ? shards_.front() : shards_.at(client);
}

RoundResult run_round(const FederationState& state, const ClientShards& shards,
                      const FederationConfig& config) {
  const ThreatModel& threat = config.threat;
  const std::size_t n = threat.n;
  if (state.client_seeds.size() != n || shards.size() != n) {
    throw Error("federation state does not match the configured n");
  }

  const bool poison_clicks =
      threat.attack == AttackKind::kDataPoison && threat.m > 0;
  const auto click_models = poison_clicks
                                ? apply_data_poison(threat, config.benign_clicks)
                                : std::vector<ClickModel>(n, config.benign_clicks);

  RoundResult out;
  RoundTrace& trace = out.trace;
  trace.round = state.round + 1;
  trace.submitted.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    Rng rng(mix_seed({state.client_seeds[c], state.round}));
    try {
      trace.submitted.push_back(client_update(
          config.model, state.global_params, shards.for_client(c),
          click_models[c], config.n_queries, config.eta, rng,
          config.serp_length));
    } catch (const Error& e) {
      throw Error("round " + std::to_string(trace.round) + ", client " +
                  std::to_string(c) + ": " + e.what());
    }
  }

  if (is_model_poisoning(threat.attack) && threat.m > 0) {
    std::vector<ParamVector> before;
    before.reserve(n);
    for (const auto& u : trace.submitted) before.push_back(u.params);
    const AttackContext ctx = make_attack_context(threat, before,
                                                  state.global_params,
                                                  config.aggregator);
    Rng rng(mix_seed({state.attack_seed, state.round}));
    std::vector<ParamVector> crafted;

    switch (threat.attack) {
      case AttackKind::kLie: {
        trace.lie_z = lie_z(n, threat.m);
        crafted.assign(threat.m,
                       lie_craft(std::span(before).first(threat.m), n, threat.m));
        break;
      }
      case AttackKind::kFangKrum: {
        auto result = fang_krum_craft(ctx, n, threat.m, rng, config.fang_krum);
        trace.fang_lambda = result.lambda;
        trace.lambda_trace = std::move(result.lambda_trace);
        trace.attack_flagged = !result.success;
        crafted = std::move(result.crafted);
        break;
      }
      case AttackKind::kFangTrimmedMean:
        crafted = fang_trmean_craft(ctx, n, threat.m, rng, config.fang_trim);
        break;
      default:
        break;
    }
    for (std::size_t c = 0; c < threat.m; ++c) {
      trace.submitted[c].params = std::move(crafted[c]);
      trace.crafted_norms.push_back(l2_norm(trace.submitted[c].params));
    }
  }

  AggregationResult agg = aggregate(config.aggregator, trace.submitted);
  for (double v : agg.params) {
    if (!std::isfinite(v)) {
      throw Error("round " + std::to_string(trace.round) +
                  ": aggregated parameters are not finite");
    }
  }
  trace.aggregated = agg.params;
  trace.krum_scores = std::move(agg.krum_scores);
  trace.krum_selected = std::move(agg.selected);

  out.state = state;
  out.state.round = trace.round;
  out.state.global_params = std::move(agg.params);
  return out;
}

ExperimentRun run_experiment(const FederationConfig& config,
                             const Dataset& train, const Dataset& test,
                             std::uint64_t seed, const RunOptions& options) {
  if (options.eval_interval == 0) throw Error("eval_interval must be positive");
  FederationState state = init_federation(config, seed);
  const ClientShards shards(train, config.partition, config.threat.n);

  ExperimentRun run;
  auto evaluate = [&](const FederationState& s) {
    run.records.push_back(
        {s.round,
         offline_eval(config.model, s.global_params, test, options.cutoff),
         options.fingerprint, seed});
  };

  evaluate(state);
  for (std::size_t t = 0; t < options.rounds; ++t) {
    RoundResult result = run_round(state, shards, config);
    if (options.on_round) options.on_round(result.trace);
    state = std::move(result.state);
    if (state.round % options.eval_interval == 0) evaluate(state);
  }
  run.final_params = std::move(state.global_params);
  return run;
}

}  // namespace foltr
