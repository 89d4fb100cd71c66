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

#include <gtest/gtest.h>

#include "foltr/error.h"

namespace foltr {
namespace {

using Probs = std::vector<double>;

TEST(BuiltinModelTest, FiveLevelTables) {
  const auto perfect = builtin_model("perfect", 5);
  EXPECT_EQ(perfect.p_click, (Probs{0.0, 0.2, 0.4, 0.8, 1.0}));
  EXPECT_EQ(perfect.p_stop, (Probs{0, 0, 0, 0, 0}));
  const auto nav = builtin_model("navigational", 5);
  EXPECT_EQ(nav.p_click, (Probs{0.05, 0.3, 0.5, 0.7, 0.95}));
  EXPECT_EQ(nav.p_stop, (Probs{0.2, 0.3, 0.5, 0.7, 0.9}));
  const auto info = builtin_model("informational", 5);
  EXPECT_EQ(info.p_click, (Probs{0.4, 0.6, 0.7, 0.8, 0.9}));
  EXPECT_EQ(info.p_stop, (Probs{0.1, 0.2, 0.3, 0.4, 0.5}));
  const auto poison = builtin_model("poison", 5);
  EXPECT_EQ(poison.p_click, (Probs{1.0, 0.8, 0.4, 0.2, 0.0}));
  EXPECT_EQ(poison.p_stop, (Probs{0, 0, 0, 0, 0}));
}

TEST(BuiltinModelTest, ThreeLevelTables) {
  EXPECT_EQ(builtin_model("perfect", 3).p_click, (Probs{0.0, 0.5, 1.0}));
  EXPECT_EQ(builtin_model("navigational", 3).p_click, (Probs{0.05, 0.5, 0.95}));
  EXPECT_EQ(builtin_model("navigational", 3).p_stop, (Probs{0.2, 0.5, 0.9}));
  EXPECT_EQ(builtin_model("informational", 3).p_click, (Probs{0.4, 0.7, 0.9}));
  EXPECT_EQ(builtin_model("informational", 3).p_stop, (Probs{0.1, 0.3, 0.5}));
  const auto poison = builtin_model("poison", 3);
  EXPECT_EQ(poison.p_click, (Probs{1.0, 0.5, 0.0}));
  EXPECT_EQ(poison.p_stop, (Probs{0.0, 0.0, 0.0}));
}

TEST(BuiltinModelTest, RejectsUnknownNameOrScale) {
  EXPECT_THROW(builtin_model("lazy", 5), Error);
  EXPECT_THROW(builtin_model("perfect", 4), Error);
}

TEST(BuiltinModelTest, PoisonMirrorsPerfectOnFiveLevels) {
  const auto perfect = builtin_model("perfect", 5);
  const auto poison = builtin_model("poison", 5);
  for (std::size_t g = 0; g < 5; ++g) EXPECT_EQ(poison.p_click[g], perfect.p_click[4 - g]);
}

TEST(MakeClickModelTest, Validates) {
  EXPECT_NO_THROW(make_click_model("c", {0.1, 0.9}, {0.0, 0.5}));
  EXPECT_THROW(make_click_model("c", {0.1, 0.9}, {0.0}), Error);
  EXPECT_THROW(make_click_model("c", {1.1}, {0.0}), Error);
  EXPECT_THROW(make_click_model("c", {}, {}), Error);
}

TEST(SimulateSessionTest, PerfectIsDeterministic) {
  const auto model = builtin_model("perfect", 5);
  const std::vector<int> rels{4, 0, 4};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = simulate_session(model, rels, rng);
    EXPECT_EQ(r.clicks, (std::vector<std::uint8_t>{1, 0, 1}));
    EXPECT_FALSE(r.stopped_at.has_value());
    EXPECT_EQ(r.click_count(), 2u);
  }
}

TEST(SimulateSessionTest, PoisonClicksIrrelevantOnly) {
  const auto model = builtin_model("poison", 5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    EXPECT_EQ(simulate_session(model, std::vector<int>{0, 4}, rng).clicks,
              (std::vector<std::uint8_t>{1, 0}));
    EXPECT_EQ(simulate_session(model, std::vector<int>{0, 0, 4}, rng).clicks,
              (std::vector<std::uint8_t>{1, 1, 0}));
  }
}

TEST(SimulateSessionTest, InformationalFirstPositionRate) {
  const auto model = builtin_model("informational", 5);
  Rng rng(123);
  const std::vector<int> rels(10, 0);
  int clicks = 0;
  for (int i = 0; i < 100000; ++i) clicks += simulate_session(model, rels, rng).clicks[0];
  EXPECT_NEAR(clicks / 100000.0, 0.4, 0.01);
}

TEST(SimulateSessionTest, NothingAfterStop) {
  const auto model = builtin_model("navigational", 5);
  Rng rng(9);
  const std::vector<int> rels{4, 3, 4, 2, 4, 1, 4, 0, 4, 4};
  int stops = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto r = simulate_session(model, rels, rng);
    ASSERT_EQ(r.clicks.size(), rels.size());
    if (!r.stopped_at) continue;
    ++stops;
    EXPECT_EQ(r.clicks[*r.stopped_at], 1);
    for (std::size_t p = *r.stopped_at + 1; p < rels.size(); ++p) EXPECT_EQ(r.clicks[p], 0);
  }
  EXPECT_GT(stops, 0);
}

TEST(SimulateSessionTest, ReplaysPerSeed) {
  const auto model = builtin_model("informational", 5);
  const std::vector<int> rels{1, 2, 3, 4, 0, 1, 2, 3, 4, 0};
  Rng a(77), b(77);
  for (int i = 0; i < 200; ++i) {
    const auto x = simulate_session(model, rels, a);
    const auto y = simulate_session(model, rels, b);
    EXPECT_EQ(x.clicks, y.clicks);
    EXPECT_EQ(x.stopped_at, y.stopped_at);
  }
}

TEST(SimulateSessionTest, RejectsGradeOutOfRange) {
  Rng rng(1);
  EXPECT_THROW(simulate_session(builtin_model("perfect", 3), std::vector<int>{3}, rng), Error);
  EXPECT_THROW(simulate_session(builtin_model("perfect", 3), std::vector<int>{-1}, rng), Error);
}

}  // namespace
}  // namespace foltr
