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

// Acceptance checks. Prints one [PASS]/[FAIL] line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "foltr/aggregation.h"
#include "foltr/attacks.h"
#include "foltr/click_model.h"
#include "foltr/experiment.h"
#include "foltr/metrics.h"
#include "foltr/pdgd.h"
#include "foltr/ranking_model.h"
#include "oracles.h"

namespace {

using foltr::ParamVector;
using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double max_abs_diff(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Outcome ac1_aggregators() {
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<std::size_t> dim_d(1, 8);
  std::uniform_int_distribution<std::size_t> interactions(1, 20);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 10)(gen);
    const std::size_t dim = dim_d(gen);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(0, n - 3)(gen);
    const std::size_t f = std::uniform_int_distribution<std::size_t>(1, n)(gen);
    const std::size_t beta = std::uniform_int_distribution<std::size_t>(0, (n - 1) / 2)(gen);
    std::vector<ParamVector> u;
    std::vector<foltr::ClientUpdate> cu;
    std::vector<std::size_t> w;
    for (std::size_t i = 0; i < n; ++i) {
      u.push_back(oracle::random_vec(gen, dim, -5.0, 5.0));
      w.push_back(interactions(gen));
      cu.push_back({u.back(), w.back()});
    }
    worst = std::max(worst, max_abs_diff(foltr::krum(u, m), oracle::krum(u, m)));
    worst = std::max(worst, max_abs_diff(foltr::multi_krum(u, m, f), oracle::multi_krum(u, m, f)));
    worst = std::max(worst, max_abs_diff(foltr::trimmed_mean(u, beta), oracle::trimmed_mean(u, beta)));
    worst = std::max(worst, max_abs_diff(foltr::coordinate_median(u), oracle::median(u)));
    worst = std::max(worst, max_abs_diff(foltr::fedavg(cu), oracle::weighted_mean(u, w)));
  }
  return {worst <= 1e-12, fmt("1000 instances x 5 rules, max |diff| = %.3g", worst)};
}

Outcome ac2_click_calibration() {
  // Published SDBN click probabilities per grade.
  const std::vector<std::pair<std::string, std::vector<double>>> five{
      {"perfect", {0.0, 0.2, 0.4, 0.8, 1.0}},
      {"navigational", {0.05, 0.3, 0.5, 0.7, 0.95}},
      {"informational", {0.4, 0.6, 0.7, 0.8, 0.9}},
      {"poison", {1.0, 0.8, 0.4, 0.2, 0.0}}};
  const std::vector<std::pair<std::string, std::vector<double>>> three{
      {"perfect", {0.0, 0.5, 1.0}},
      {"navigational", {0.05, 0.5, 0.95}},
      {"informational", {0.4, 0.7, 0.9}},
      {"poison", {1.0, 0.5, 0.0}}};
  constexpr int kSessions = 100000;
  double worst = 0.0;
  std::string where;
  foltr::Rng rng(2002);
  for (const auto* table : {&five, &three}) {
    for (const auto& [name, expected] : *table) {
      const auto model = foltr::builtin_model(name, static_cast<int>(expected.size()));
      for (std::size_t g = 0; g < expected.size(); ++g) {
        // Grade g at position 1, followed by irrelevant filler.
        std::vector<int> rels(10, 0);
        rels[0] = static_cast<int>(g);
        int clicks = 0;
        for (int s = 0; s < kSessions; ++s) {
          clicks += foltr::simulate_session(model, rels, rng).clicks[0];
        }
        const double err = std::abs(clicks / static_cast<double>(kSessions) - expected[g]);
        if (err > worst) {
          worst = err;
          where = name + "/" + std::to_string(expected.size()) + " grade " + std::to_string(g);
        }
      }
    }
  }
  return {worst <= 0.01, fmt("worst |freq - table| = %.4f (%s)", worst, where.c_str())};
}

Outcome ac3_gradients() {
  std::mt19937_64 gen(3003);
  int failures = 0;
  double worst_ratio = 0.0;
  for (const auto kind : {foltr::ModelKind::kLinear, foltr::ModelKind::kNeural}) {
    const foltr::ModelSpec spec{kind, 6, 8};
    for (int t = 0; t < 100; ++t) {
      const auto p = oracle::random_vec(gen, spec.param_count());
      const auto a = oracle::random_vec(gen, 6, 0.0, 1.0);
      const auto b = oracle::random_vec(gen, 6, 0.0, 1.0);
      const auto objective = [&](const ParamVector& q) {
        const double sa = foltr::score(spec, q, a), sb = foltr::score(spec, q, b);
        return 1.0 / (1.0 + std::exp(sb - sa));
      };
      const auto numeric = oracle::central_difference(objective, p);
      const auto analytic = foltr::pair_gradient(spec, p, a, b);
      bool ok = true;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double tol = std::max(1e-5, 1e-4 * std::abs(numeric[i]));
        const double diff = std::abs(analytic[i] - numeric[i]);
        worst_ratio = std::max(worst_ratio, diff / tol);
        ok = ok && diff <= tol;
      }
      failures += ok ? 0 : 1;
    }
  }
  return {failures == 0, fmt("200 instances, %d outside tolerance, worst diff/tol = %.3g",
                             failures, worst_ratio)};
}

json desk_config(const std::string& click_model) {
  return {{"dataset",
           {{"name", "synthetic"},
            {"synthetic",
             {{"queries", 200}, {"docs_per_query", 10}, {"features", 5}, {"seed", 1}}}}},
          {"click_model", click_model},
          {"model", "linear"},
          {"n", 10},
          {"rounds", 500},
          {"eval_interval", 50},
          {"repeats", 5},
          {"seed", 2024}};
}

std::vector<foltr::RunSummary> run_cells(const json& doc, const std::string& tag) {
  const auto loaded = foltr::parse_config(doc);
  const fs::path dir = fs::temp_directory_path() / ("foltr_acceptance_" + tag);
  fs::remove_all(dir);
  const auto result = foltr::run_grid(loaded.configs, dir);
  if (result.exit_code() != 0) {
    for (const auto& f : result.failures) std::printf("    run failure: %s\n", f.c_str());
  }
  std::printf("%s", foltr::format_summary(result.summaries).c_str());
  return result.summaries;
}

const foltr::RunSummary* find_cell(const std::vector<foltr::RunSummary>& cells,
                                   const std::string& defense, std::size_t m) {
  for (const auto& c : cells) {
    if (c.defense == defense && c.m == m) return &c;
  }
  return nullptr;
}

Outcome ac4_honest_learning() {
  auto doc = desk_config("perfect");
  const auto cfg = foltr::parse_config(doc).configs.at(0);
  const auto data = foltr::prepare_data(cfg.data);
  bool ok = true;
  std::string gains;
  for (std::size_t run = 0; run < foltr::run_count(cfg, data); ++run) {
    const auto records = foltr::run_config(cfg, data, run);
    const double gain = records.back().ndcg_at_10 - records.front().ndcg_at_10;
    ok = ok && gain >= 0.15;
    gains += fmt("%s%.4f", gains.empty() ? "" : ", ", gain);
  }
  return {ok, "per-seed gain: " + gains};
}

Outcome ac5_poison_trend() {
  auto doc = desk_config("informational");
  doc["attack"] = "data_poison";
  doc["aggregator"] = "fedavg";
  doc["grid"] = {{"m", {0, 2, 4}}};
  const auto cells = run_cells(doc, "ac5");
  const auto* m0 = find_cell(cells, "fedavg", 0);
  const auto* m2 = find_cell(cells, "fedavg", 2);
  const auto* m4 = find_cell(cells, "fedavg", 4);
  if (!m0 || !m2 || !m4) return {false, "missing cells"};
  const bool ok = m0->mean > m2->mean && m2->mean > m4->mean && m0->mean - m4->mean > 0.02;
  return {ok, fmt("m=0: %.4f, m=2: %.4f, m=4: %.4f (drop %.4f)", m0->mean, m2->mean,
                  m4->mean, m0->mean - m4->mean)};
}

Outcome ac6_lie() {
  std::mt19937_64 gen(6006);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 10;
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 4)(gen);
    const std::size_t dim = std::uniform_int_distribution<std::size_t>(1, 16)(gen);
    std::vector<ParamVector> a;
    for (std::size_t i = 0; i < m; ++i) a.push_back(oracle::random_vec(gen, dim, -3, 3));
    const auto crafted = foltr::lie_craft(a, n, m);
    const auto [mu, sd] = oracle::mean_std(a);
    const double s = std::floor(n / 2.0 + 1.0) - static_cast<double>(m);
    const double z = oracle::inverse_normal_cdf((n - m - s) / (n - m));
    for (std::size_t j = 0; j < dim; ++j) {
      worst = std::max(worst, std::abs(crafted[j] - (mu[j] - z * sd[j])));
    }
  }
  const double z104 = foltr::lie_z(10, 4);
  const bool z_ok = std::abs(z104 - 0.4307) <= 1e-3 &&
                    std::abs(z104 - oracle::inverse_normal_cdf(2.0 / 3.0)) <= 1e-9;
  return {worst <= 1e-12 && z_ok,
          fmt("max |crafted - (mu - z sigma)| = %.3g, z(10,4) = %.6f", worst, z104)};
}

Outcome ac7_fang_krum() {
  // Benign updates: one shared local step away from the global model plus
  // client noise. The first m slots hold the attackers' own honest updates.
  std::mt19937_64 gen(7007);
  constexpr std::size_t n = 10, m = 4;
  int selected = 0;
  std::string failures;
  for (int t = 0; t < 50; ++t) {
    const std::size_t dim = std::uniform_int_distribution<std::size_t>(2, 8)(gen);
    const auto global = oracle::random_vec(gen, dim);
    const auto step = oracle::random_vec(gen, dim, -0.1, 0.1);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<ParamVector> updates;
    for (std::size_t i = 0; i < n; ++i) {
      ParamVector u(dim);
      for (std::size_t j = 0; j < dim; ++j) u[j] = global[j] + step[j] + noise(gen);
      updates.push_back(u);
    }
    const foltr::ThreatModel threat{n, m, foltr::Knowledge::kFull, foltr::AttackKind::kFangKrum};
    const foltr::AggregatorSpec agg{foltr::AggregationRule::kKrum, m, {}, {}};
    const auto ctx = foltr::make_attack_context(threat, updates, global, agg);
    foltr::Rng rng(static_cast<std::uint64_t>(t));
    const auto result = foltr::fang_krum_craft(ctx, n, m, rng);

    std::vector<ParamVector> submitted = result.crafted;
    submitted.insert(submitted.end(), updates.begin() + m, updates.end());
    const std::size_t chosen = foltr::krum_select(submitted, m);
    if (chosen < m) {
      ++selected;
    } else {
      failures += fmt("    instance %d (dim %zu): Krum chose benign %zu, lambda %.3g after %zu halvings\n",
                      t, dim, chosen, result.lambda, result.halvings);
    }
  }
  std::printf("%s", failures.c_str());
  return {selected >= 45, fmt("crafted update selected in %d/50 instances", selected)};
}

Outcome ac8_defense_efficacy() {
  auto doc = desk_config("navigational");
  doc["m"] = 3;
  doc["attack"] = "data_poison";
  doc["grid"] = {{"aggregator", {"fedavg", "krum"}}};
  const auto cells = run_cells(doc, "ac8");
  const auto* fedavg = find_cell(cells, "fedavg", 3);
  const auto* krum = find_cell(cells, "krum", 3);
  if (!fedavg || !krum) return {false, "missing cells"};
  return {krum->mean >= fedavg->mean,
          fmt("FedAvg %.4f, Krum %.4f", fedavg->mean, krum->mean)};
}

Outcome ac9_defense_cost() {
  auto doc = desk_config("perfect");
  doc["grid"] = {{"aggregator", {"fedavg", "krum", "median"}}};
  const auto cells = run_cells(doc, "ac9");
  const auto* fedavg = find_cell(cells, "fedavg", 0);
  const auto* krum = find_cell(cells, "krum", 0);
  const auto* median = find_cell(cells, "median", 0);
  if (!fedavg || !krum || !median) return {false, "missing cells"};
  return {krum->mean <= fedavg->mean + 0.005,
          fmt("FedAvg %.4f, Krum %.4f (delta %+.4f), Median %.4f (delta %+.4f)", fedavg->mean,
              krum->mean, krum->mean - fedavg->mean, median->mean,
              median->mean - fedavg->mean)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome ac10_determinism() {
  auto doc = desk_config("informational");
  doc["rounds"] = 60;
  doc["eval_interval"] = 10;
  doc["repeats"] = 2;
  doc["m"] = 3;
  doc["knowledge"] = "full";
  doc["grid"] = {{"attack", {"data_poison", "lie", "fang_krum", "fang_trmean"}},
                 {"aggregator", {"fedavg", "krum", "trimmed_mean"}},
                 {"model", {"linear", "neural"}}};
  doc["trace"] = true;
  const auto configs = foltr::parse_config(doc).configs;
  const fs::path a = fs::temp_directory_path() / "foltr_acceptance_ac10_a";
  const fs::path b = fs::temp_directory_path() / "foltr_acceptance_ac10_b";
  fs::remove_all(a);
  fs::remove_all(b);
  foltr::run_grid(configs, a, {1, {}});
  foltr::run_grid(configs, b, {2, {}});
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(entry.path(), a);
    if (slurp(entry.path()) != slurp(b / rel)) ++differing;
  }
  return {files > 0 && differing == 0,
          fmt("%zu configs, %zu output files compared, %zu differ", configs.size(), files,
              differing)};
}

Outcome ac11_ndcg() {
  std::mt19937_64 gen(1111);
  std::uniform_int_distribution<int> grade(0, 4);
  std::uniform_int_distribution<std::size_t> len(1, 30);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> all(len(gen));
    for (int& r : all) r = grade(gen);
    std::vector<int> ranked = all;
    std::shuffle(ranked.begin(), ranked.end(), gen);
    worst = std::max(worst, std::abs(foltr::ndcg_at_k(ranked, all, 10) -
                                     oracle::ndcg(ranked, all, 10)));
  }
  const double hand = foltr::ndcg_at_k(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}, 10);
  return {worst <= 1e-12 && std::abs(hand - 0.5869) <= 1e-4,
          fmt("1000 queries, max |diff| = %.3g; [0,1,2] -> %.4f", worst, hand)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "aggregator oracle equivalence", 10, ac1_aggregators},
      {"AC2", "click model calibration", 30, ac2_click_calibration},
      {"AC3", "pairwise gradient vs finite differences", 30, ac3_gradients},
      {"AC4", "honest federation learns", 300, ac4_honest_learning},
      {"AC5", "data poisoning degrades with m", 900, ac5_poison_trend},
      {"AC6", "LIE craft exactness", 0, ac6_lie},
      {"AC7", "Fang-Krum crafted update selected", 0, ac7_fang_krum},
      {"AC8", "Krum resists data poisoning", 1200, ac8_defense_efficacy},
      {"AC9", "defense cost without attack", 0, ac9_defense_cost},
      {"AC10", "byte-identical reruns", 0, ac10_determinism},
      {"AC11", "nDCG oracle", 0, ac11_ndcg},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(t0);
    if (c.budget_s > 0 && elapsed > c.budget_s) {
      out.pass = false;
      out.detail += fmt(" (over the %.0f s budget)", c.budget_s);
    }
    std::printf("[%s] %s %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), elapsed);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
