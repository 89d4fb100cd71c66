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

#ifndef FOLTR_CLICK_MODEL_H_
#define FOLTR_CLICK_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "foltr/rng.h"

namespace foltr {

// Simplified DBN click model. The user scans the result page top to bottom,
// clicks a document of grade g with probability p_click[g] and, after a
// click, abandons the page with probability p_stop[g].
struct ClickModel {
  std::string name;
  std::vector<double> p_click;
  std::vector<double> p_stop;

  int grade_levels() const { return static_cast<int>(p_click.size()); }
  void validate() const;
  bool operator==(const ClickModel&) const = default;
};

// perfect, navigational, informational or poison; grade_levels is 3 or 5.
ClickModel builtin_model(std::string_view name, int grade_levels);

// Custom instantiation; throws when the tables are inconsistent.
ClickModel make_click_model(std::string name, std::vector<double> p_click,
                            std::vector<double> p_stop);

struct ClickResult {
  std::vector<std::uint8_t> clicks;
  // Display position at which the user abandoned the page, if any.
  std::optional<std::size_t> stopped_at;

  std::size_t click_count() const;
};

ClickResult simulate_session(const ClickModel& model,
                             std::span<const int> displayed_relevances,
                             Rng& rng);

}  // namespace foltr

#endif  // FOLTR_CLICK_MODEL_H_
