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

#include "foltr/ranking_model.h"

#include <cmath>
#include <string>

#include "foltr/rng.h"

namespace foltr {

namespace {

void check_dims(const ModelSpec& spec, std::span<const double> params,
                std::span<const double> features) {
  if (features.size() != spec.input_dim) {
    throw Error("feature length " + std::to_string(features.size()) +
                " does not match model input_dim " +
                std::to_string(spec.input_dim));
  }
  if (params.size() != spec.param_count()) {
    throw Error("parameter length " + std::to_string(params.size()) +
                " does not match model size " +
                std::to_string(spec.param_count()));
  }
}

// Offsets into the flat neural layout.
struct NeuralLayout {
  std::size_t hidden_b, out_w, out_b;
  explicit NeuralLayout(const ModelSpec& s)
      : hidden_b(s.input_dim * s.hidden_dim),
        out_w(hidden_b + s.hidden_dim),
        out_b(out_w + s.hidden_dim) {}
};

double pre_activation(const ModelSpec& spec, std::span<const double> params,
                      std::span<const double> x, std::size_t h) {
  const NeuralLayout layout(spec);
  const double* row = params.data() + h * spec.input_dim;
  double a = params[layout.hidden_b + h];
  for (std::size_t i = 0; i < spec.input_dim; ++i) a += row[i] * x[i];
  return a;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kLinear ? "linear" : "neural";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::kLinear;
  if (name == "neural") return ModelKind::kNeural;
  throw Error("unknown model kind '" + std::string(name) + "'");
}

std::size_t ModelSpec::param_count() const {
  if (kind == ModelKind::kLinear) return input_dim;
  return input_dim * hidden_dim + 2 * hidden_dim + 1;
}

void ModelSpec::validate() const {
  if (input_dim == 0) throw Error("model input_dim must be positive");
  if (kind == ModelKind::kNeural && hidden_dim == 0) {
    throw Error("neural model hidden_dim must be positive");
  }
}

NeuralWeights NeuralWeights::unflatten(const ModelSpec& spec,
                                       std::span<const double> params) {
  if (spec.kind != ModelKind::kNeural || params.size() != spec.param_count()) {
    throw Error("parameters do not describe the given neural model");
  }
  const NeuralLayout layout(spec);
  NeuralWeights w;
  w.hidden_w.assign(params.begin(), params.begin() + layout.hidden_b);
  w.hidden_b.assign(params.begin() + layout.hidden_b,
                    params.begin() + layout.out_w);
  w.out_w.assign(params.begin() + layout.out_w, params.begin() + layout.out_b);
  w.out_b = params[layout.out_b];
  return w;
}

ParamVector NeuralWeights::flatten() const {
  ParamVector flat;
  flat.reserve(hidden_w.size() + hidden_b.size() + out_w.size() + 1);
  flat.insert(flat.end(), hidden_w.begin(), hidden_w.end());
  flat.insert(flat.end(), hidden_b.begin(), hidden_b.end());
  flat.insert(flat.end(), out_w.begin(), out_w.end());
  flat.push_back(out_b);
  return flat;
}

ParamVector init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector params(spec.param_count(), 0.0);
  if (spec.kind == ModelKind::kLinear) return params;

  Rng rng(seed);
  const NeuralLayout layout(spec);
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(spec.input_dim));
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
  for (std::size_t i = 0; i < layout.hidden_b; ++i) {
    params[i] = rng.uniform(-in_bound, in_bound);
  }
  for (std::size_t h = 0; h < spec.hidden_dim; ++h) {
    params[layout.out_w + h] = rng.uniform(-out_bound, out_bound);
  }
  return params;
}

double score(const ModelSpec& spec, std::span<const double> params,
             std::span<const double> features) {
  check_dims(spec, params, features);
  if (spec.kind == ModelKind::kLinear) {
    double s = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      s += params[i] * features[i];
    }
    return s;
  }
  const NeuralLayout layout(spec);
  double s = params[layout.out_b];
  for (std::size_t h = 0; h < spec.hidden_dim; ++h) {
    const double a = pre_activation(spec, params, features, h);
    if (a > 0.0) s += params[layout.out_w + h] * a;
  }
  return s;
}

void accumulate_score_gradient(const ModelSpec& spec,
                               std::span<const double> params,
                               std::span<const double> features, double scale,
                               std::span<double> out) {
  check_dims(spec, params, features);
  if (out.size() != params.size()) throw Error("gradient buffer size mismatch");
  if (spec.kind == ModelKind::kLinear) {
    for (std::size_t i = 0; i < features.size(); ++i) {
      out[i] += scale * features[i];
    }
    return;
  }
  const NeuralLayout layout(spec);
  for (std::size_t h = 0; h < spec.hidden_dim; ++h) {
    const double a = pre_activation(spec, params, features, h);
    // relu'(0) is taken as 0.
    if (a <= 0.0) continue;
    out[layout.out_w + h] += scale * a;
    const double upstream = scale * params[layout.out_w + h];
    out[layout.hidden_b + h] += upstream;
    double* row = out.data() + h * spec.input_dim;
    for (std::size_t i = 0; i < spec.input_dim; ++i) {
      row[i] += upstream * features[i];
    }
  }
  out[layout.out_b] += scale;
}

ParamVector score_gradient(const ModelSpec& spec,
                           std::span<const double> params,
                           std::span<const double> features) {
  ParamVector grad(params.size(), 0.0);
  accumulate_score_gradient(spec, params, features, 1.0, grad);
  return grad;
}

std::vector<double> score_documents(const ModelSpec& spec,
                                    std::span<const double> params,
                                    const QueryGroup& query) {
  std::vector<double> scores;
  scores.reserve(query.documents.size());
  for (const auto& doc : query.documents) {
    scores.push_back(score(spec, params, doc.features));
  }
  return scores;
}

}  // namespace foltr
