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

#include "foltr/click_model.h"

#include <algorithm>
#include <numeric>

#include "foltr/error.h"

namespace foltr {

namespace {

struct Table {
  std::vector<double> click;
  std::vector<double> stop;
};

// Values in brackets in the published tables are the 3-grade variants.
Table lookup(std::string_view name, int grade_levels) {
  const bool five = grade_levels == 5;
  if (name == "perfect") {
    return five ? Table{{0.0, 0.2, 0.4, 0.8, 1.0}, {0.0, 0.0, 0.0, 0.0, 0.0}}
                : Table{{0.0, 0.5, 1.0}, {0.0, 0.0, 0.0}};
  }
  if (name == "navigational") {
    return five ? Table{{0.05, 0.3, 0.5, 0.7, 0.95}, {0.2, 0.3, 0.5, 0.7, 0.9}}
                : Table{{0.05, 0.5, 0.95}, {0.2, 0.5, 0.9}};
  }
  if (name == "informational") {
    return five ? Table{{0.4, 0.6, 0.7, 0.8, 0.9}, {0.1, 0.2, 0.3, 0.4, 0.5}}
                : Table{{0.4, 0.7, 0.9}, {0.1, 0.3, 0.5}};
  }
  if (name == "poison") {
    return five ? Table{{1.0, 0.8, 0.4, 0.2, 0.0}, {0.0, 0.0, 0.0, 0.0, 0.0}}
                : Table{{1.0, 0.5, 0.0}, {0.0, 0.0, 0.0}};
  }
  throw Error("unknown click model '" + std::string(name) + "'");
}

}  // namespace

void ClickModel::validate() const {
  if (p_click.empty()) throw Error("click model '" + name + "' has no grades");
  if (p_click.size() != p_stop.size()) {
    throw Error("click model '" + name +
                "': p_click and p_stop lengths differ");
  }
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!std::all_of(p_click.begin(), p_click.end(), in_unit) ||
      !std::all_of(p_stop.begin(), p_stop.end(), in_unit)) {
    throw Error("click model '" + name + "': probabilities must be in [0, 1]");
  }
}

ClickModel builtin_model(std::string_view name, int grade_levels) {
  if (grade_levels != 3 && grade_levels != 5) {
    throw Error("click models are defined for 3 or 5 grade levels, got " +
                std::to_string(grade_levels));
  }
  Table t = lookup(name, grade_levels);
  return ClickModel{std::string(name), std::move(t.click), std::move(t.stop)};
}

ClickModel make_click_model(std::string name, std::vector<double> p_click,
                            std::vector<double> p_stop) {
  ClickModel model{std::move(name), std::move(p_click), std::move(p_stop)};
  model.validate();
  return model;
}

std::size_t ClickResult::click_count() const {
  return static_cast<std::size_t>(std::count(clicks.begin(), clicks.end(), 1));
}

ClickResult simulate_session(const ClickModel& model,
                             std::span<const int> displayed_relevances,
                             Rng& rng) {
  const int grades = model.grade_levels();
  for (int rel : displayed_relevances) {
    if (rel < 0 || rel >= grades) {
      throw Error("relevance grade " + std::to_string(rel) +
                  " outside click model '" + model.name + "' range");
    }
  }

  ClickResult result;
  result.clicks.assign(displayed_relevances.size(), 0);
  for (std::size_t pos = 0; pos < displayed_relevances.size(); ++pos) {
    const auto g = static_cast<std::size_t>(displayed_relevances[pos]);
    if (rng.uniform() >= model.p_click[g]) continue;
    result.clicks[pos] = 1;
    if (rng.uniform() < model.p_stop[g]) {
      result.stopped_at = pos;
      break;
    }
  }
  return result;
}

}  // namespace foltr
