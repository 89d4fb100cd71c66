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

#ifndef FOLTR_RANKING_MODEL_H_
#define FOLTR_RANKING_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "foltr/letor.h"

namespace foltr {

// Flat view of all ranker weights. Federation, attacks and aggregation only
// ever see this representation.
using ParamVector = std::vector<double>;

// What a client sends to the server: its locally trained parameters and the
// number of interactions N_u they were trained on.
struct ClientUpdate {
  ParamVector params;
  std::size_t num_interactions = 0;

  bool operator==(const ClientUpdate&) const = default;
};

enum class ModelKind { kLinear, kNeural };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kLinear;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 64;

  // input_dim for linear; W (hidden x input), b_h, out_w, b_o for neural.
  std::size_t param_count() const;
  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

// Structured view of the neural ranker's flat parameters:
//   score(x) = out_w . relu(hidden_w * x + hidden_b) + out_b
// hidden_w is row-major, one row per hidden unit.
struct NeuralWeights {
  std::vector<double> hidden_w;
  std::vector<double> hidden_b;
  std::vector<double> out_w;
  double out_b = 0.0;

  static NeuralWeights unflatten(const ModelSpec& spec,
                                 std::span<const double> params);
  ParamVector flatten() const;
};

// Linear: zeros. Neural: weights uniform in +-1/sqrt(fan_in), biases zero.
ParamVector init_params(const ModelSpec& spec, std::uint64_t seed);

double score(const ModelSpec& spec, std::span<const double> params,
             std::span<const double> features);

// d score / d params.
ParamVector score_gradient(const ModelSpec& spec,
                           std::span<const double> params,
                           std::span<const double> features);

// out += scale * d score / d params, without allocating.
void accumulate_score_gradient(const ModelSpec& spec,
                               std::span<const double> params,
                               std::span<const double> features, double scale,
                               std::span<double> out);

std::vector<double> score_documents(const ModelSpec& spec,
                                    std::span<const double> params,
                                    const QueryGroup& query);

}  // namespace foltr

#endif  // FOLTR_RANKING_MODEL_H_
