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

#ifndef FOLTR_FEDERATION_H_
#define FOLTR_FEDERATION_H_

// Synchronous federated PDGD. Each round every client starts from the same
// broadcast parameters, runs N_u local PDGD steps and reports back; model
// poisoning attackers then replace their reports, and the server aggregates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "foltr/aggregation.h"
#include "foltr/attacks.h"
#include "foltr/click_model.h"
#include "foltr/letor.h"
#include "foltr/metrics.h"
#include "foltr/pdgd.h"
#include "foltr/ranking_model.h"

namespace foltr {

enum class QueryPartition { kShared, kDisjoint };

std::string_view to_string(QueryPartition partition);
QueryPartition parse_query_partition(std::string_view name);

struct FederationConfig {
  ModelSpec model;
  ClickModel benign_clicks;
  ThreatModel threat;
  AggregatorSpec aggregator;
  double eta = 0.1;
  std::size_t n_queries = 5;
  std::size_t serp_length = kDefaultSerpLength;
  QueryPartition partition = QueryPartition::kShared;
  FangKrumOptions fang_krum;
  FangTrimOptions fang_trim;

  void validate() const;
};

enum class ClientRole { kBenign, kMalicious };

struct FederationState {
  std::size_t round = 0;
  ParamVector global_params;
  std::vector<std::uint64_t> client_seeds;
  std::vector<ClientRole> roles;
  std::uint64_t attack_seed = 0;
};

FederationState init_federation(const FederationConfig& config,
                                std::uint64_t master_seed);

// Training queries available to each client: one shared pool, or a disjoint
// round-robin partition of the training split.
class ClientShards {
 public:
  ClientShards(const Dataset& train, QueryPartition partition, std::size_t n);

  const Dataset& for_client(std::size_t client) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<Dataset> shards_;
};

struct RoundTrace {
  std::size_t round = 0;
  std::vector<ClientUpdate> submitted;
  ParamVector aggregated;
  std::vector<double> krum_scores;
  std::vector<std::size_t> krum_selected;
  std::optional<double> lie_z;
  std::optional<double> fang_lambda;
  std::vector<double> lambda_trace;
  std::vector<double> crafted_norms;
  // Set when the Fang-Krum search ended without Krum picking a crafted update.
  bool attack_flagged = false;
};

struct RoundResult {
  FederationState state;
  RoundTrace trace;
};

RoundResult run_round(const FederationState& state, const ClientShards& shards,
                      const FederationConfig& config);

struct RunOptions {
  std::size_t rounds = 0;
  std::size_t eval_interval = 10;
  std::size_t cutoff = kDefaultCutoff;
  std::string fingerprint;
  std::function<void(const RoundTrace&)> on_round;
};

struct ExperimentRun {
  std::vector<MetricRecord> records;
  ParamVector final_params;
};

// Evaluates at round 0 and after every eval_interval-th round.
ExperimentRun run_experiment(const FederationConfig& config,
                             const Dataset& train, const Dataset& test,
                             std::uint64_t seed, const RunOptions& options);

}  // namespace foltr

#endif  // FOLTR_FEDERATION_H_
