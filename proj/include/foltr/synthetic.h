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

#ifndef FOLTR_SYNTHETIC_H_
#define FOLTR_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "foltr/letor.h"

namespace foltr {

// Linearly separable ranking data: features are uniform in [0, 1] and the
// relevance grade is a noiseless step function of a fixed linear score
// w* . x, so a linear ranker with weights w* ranks every query ideally.
struct SyntheticSpec {
  std::size_t queries = 200;
  std::size_t docs_per_query = 10;
  std::size_t features = 5;
  int grade_levels = 5;
  std::uint64_t seed = 1;

  bool operator==(const SyntheticSpec&) const = default;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<double> true_weights;
  // Score thresholds separating consecutive grades (grade_levels - 1 values).
  std::vector<double> thresholds;
};

SyntheticData make_separable_dataset(const SyntheticSpec& spec);

}  // namespace foltr

#endif  // FOLTR_SYNTHETIC_H_
