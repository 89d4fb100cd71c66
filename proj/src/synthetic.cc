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

#include "foltr/synthetic.h"

#include <algorithm>
#include <string>

#include "foltr/rng.h"

namespace foltr {

namespace {

// Cumulative grade quantiles; skewed towards low grades like real LTR data.
std::vector<double> grade_quantiles(int grade_levels) {
  if (grade_levels == 3) return {0.6, 0.9};
  if (grade_levels == 5) return {0.4, 0.7, 0.85, 0.95};
  throw Error("synthetic data supports 3 or 5 grade levels");
}

}  // namespace

SyntheticData make_separable_dataset(const SyntheticSpec& spec) {
  if (spec.queries == 0 || spec.docs_per_query == 0 || spec.features == 0) {
    throw Error("synthetic dataset dimensions must be positive");
  }
  const auto quantiles = grade_quantiles(spec.grade_levels);
  Rng rng(spec.seed);

  SyntheticData out;
  out.true_weights.resize(spec.features);
  for (auto& w : out.true_weights) w = rng.uniform(-1.0, 1.0);

  Dataset& ds = out.dataset;
  ds.feature_dim = spec.features;
  ds.grade_levels = spec.grade_levels;
  std::vector<double> scores;
  scores.reserve(spec.queries * spec.docs_per_query);
  for (std::size_t q = 0; q < spec.queries; ++q) {
    QueryGroup group{std::to_string(q + 1), {}};
    for (std::size_t d = 0; d < spec.docs_per_query; ++d) {
      Document doc;
      doc.features.resize(spec.features);
      double s = 0.0;
      for (std::size_t f = 0; f < spec.features; ++f) {
        doc.features[f] = rng.uniform();
        s += out.true_weights[f] * doc.features[f];
      }
      doc.doc_key = group.query_id + ":" + std::to_string(d);
      scores.push_back(s);
      group.documents.push_back(std::move(doc));
    }
    ds.queries.push_back(std::move(group));
  }

  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  for (double qt : quantiles) {
    const auto idx = static_cast<std::size_t>(qt * static_cast<double>(sorted.size()));
    out.thresholds.push_back(sorted[std::min(idx, sorted.size() - 1)]);
  }

  std::size_t i = 0;
  for (auto& group : ds.queries) {
    for (auto& doc : group.documents) {
      const double s = scores[i++];
      doc.relevance = static_cast<int>(
          std::upper_bound(out.thresholds.begin(), out.thresholds.end(), s) -
          out.thresholds.begin());
    }
  }
  return out;
}

}  // namespace foltr
