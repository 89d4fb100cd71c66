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

// Command-line front end: run experiment grids, validate configs, render
// charts from metric CSVs and generate synthetic LETOR data.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "foltr/charts.h"
#include "foltr/experiment.h"
#include "foltr/letor.h"
#include "foltr/synthetic.h"

namespace {

using nlohmann::json;

// Every ExperimentConfig field as an optional flag. Only flags given on the
// command line end up in the override document.
struct ConfigFlags {
  std::optional<std::string> config;
  std::optional<std::string> dataset_name, train, test, data;
  std::vector<std::string> folds;
  bool synthetic = false;
  std::optional<std::size_t> syn_queries, syn_docs, syn_features;
  std::optional<int> syn_grades;
  std::optional<std::uint64_t> syn_seed;
  std::optional<double> test_fraction;
  std::optional<std::uint64_t> split_seed;
  bool no_normalize = false;
  std::optional<int> grade_levels;
  std::optional<std::string> model;
  std::optional<std::size_t> hidden_dim;
  std::optional<std::string> click_model;
  std::optional<std::size_t> n, m;
  std::optional<std::string> attack, knowledge, aggregator;
  std::optional<std::size_t> defense_m, f, beta;
  std::optional<double> eta;
  std::optional<std::size_t> n_queries, k, serp_length, rounds, eval_interval,
      repeats, summary_window;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output, partition;
  bool trace = false;
  std::optional<double> fang_b, fang_jitter, fang_initial_lambda, fang_min_lambda;
  std::optional<int> fang_max_iterations;

  void add_to(CLI::App& app) {
    app.add_option("-c,--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--dataset-name", dataset_name, "Dataset label used in outputs");
    app.add_option("--train", train, "Training LETOR file");
    app.add_option("--test", test, "Test LETOR file");
    app.add_option("--data", data, "Single LETOR file split by --test-fraction");
    app.add_option("--fold", folds, "Fold as TRAIN,TEST (repeatable)");
    app.add_flag("--synthetic", synthetic, "Use a generated separable dataset");
    app.add_option("--synthetic-queries", syn_queries);
    app.add_option("--synthetic-docs", syn_docs, "Documents per query");
    app.add_option("--synthetic-features", syn_features);
    app.add_option("--synthetic-grades", syn_grades, "3 or 5");
    app.add_option("--synthetic-seed", syn_seed);
    app.add_option("--test-fraction", test_fraction);
    app.add_option("--split-seed", split_seed);
    app.add_flag("--no-normalize", no_normalize, "Skip global per-feature min-max scaling");
    app.add_option("--grade-levels", grade_levels, "Force the grade scale (3 or 5)");
    app.add_option("--model", model, "linear or neural");
    app.add_option("--hidden-dim", hidden_dim);
    app.add_option("--click-model", click_model,
                   "perfect, navigational, informational or poison");
    app.add_option("-n,--clients", n, "Number of clients");
    app.add_option("-m,--attackers", m, "Number of malicious clients");
    app.add_option("--attack", attack, "none, data_poison, lie, fang_krum, fang_trmean");
    app.add_option("--knowledge", knowledge, "full or partial");
    app.add_option("--aggregator", aggregator,
                   "fedavg, krum, multi_krum, trimmed_mean, median");
    app.add_option("--defense-m", defense_m, "Attacker count assumed by the server");
    app.add_option("--multi-krum-f", f, "Updates averaged by Multi-Krum");
    app.add_option("--trim-beta", beta, "Values trimmed per side by Trimmed Mean");
    app.add_option("--eta", eta, "Learning rate");
    app.add_option("--n-queries", n_queries, "Queries per client per round");
    app.add_option("-k,--cutoff", k, "nDCG cutoff");
    app.add_option("--serp-length", serp_length);
    app.add_option("-T,--rounds", rounds);
    app.add_option("--eval-interval", eval_interval);
    app.add_option("--repeats", repeats);
    app.add_option("--summary-window", summary_window,
                   "Evaluations averaged into the final score");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("-o,--output", output, "Output directory");
    app.add_option("--partition", partition, "shared or disjoint");
    app.add_flag("--trace", trace, "Write per-round trace JSONL");
    app.add_option("--fang-b", fang_b);
    app.add_option("--fang-jitter", fang_jitter);
    app.add_option("--fang-initial-lambda", fang_initial_lambda);
    app.add_option("--fang-min-lambda", fang_min_lambda);
    app.add_option("--fang-max-iterations", fang_max_iterations);
  }

  json overrides() const {
    json o = json::object();
    json ds = json::object();
    if (dataset_name) ds["name"] = *dataset_name;
    if (train) ds["train"] = *train;
    if (test) ds["test"] = *test;
    if (data) ds["path"] = *data;
    if (!folds.empty()) {
      ds["folds"] = json::array();
      for (const auto& f : folds) {
        const auto comma = f.find(',');
        if (comma == std::string::npos) {
          throw CLI::ValidationError("--fold", "expected TRAIN,TEST");
        }
        ds["folds"].push_back({{"train", f.substr(0, comma)}, {"test", f.substr(comma + 1)}});
      }
    }
    if (synthetic || syn_queries || syn_docs || syn_features || syn_grades || syn_seed) {
      json syn = json::object();
      if (syn_queries) syn["queries"] = *syn_queries;
      if (syn_docs) syn["docs_per_query"] = *syn_docs;
      if (syn_features) syn["features"] = *syn_features;
      if (syn_grades) syn["grade_levels"] = *syn_grades;
      if (syn_seed) syn["seed"] = *syn_seed;
      ds["synthetic"] = syn;
    }
    if (test_fraction) ds["test_fraction"] = *test_fraction;
    if (split_seed) ds["split_seed"] = *split_seed;
    if (no_normalize) ds["normalize"] = false;
    if (grade_levels) ds["grade_levels"] = *grade_levels;
    // A source given on the command line names the dataset unless labeled.
    if (!dataset_name) {
      if (data) {
        ds["name"] = std::filesystem::path(*data).stem().string();
      } else if (train) {
        ds["name"] = std::filesystem::path(*train).parent_path().filename().string();
      } else if (ds.contains("synthetic")) {
        ds["name"] = "synthetic";
      }
      if (ds.contains("name") && ds["name"].get<std::string>().empty()) ds.erase("name");
    }
    if (!ds.empty()) o["dataset"] = ds;

    json mdl = json::object();
    if (model) mdl["kind"] = *model;
    if (hidden_dim) mdl["hidden_dim"] = *hidden_dim;
    if (!mdl.empty()) o["model"] = mdl;

    if (click_model) o["click_model"] = *click_model;
    if (n) o["n"] = *n;
    if (m) o["m"] = *m;
    if (attack) o["attack"] = *attack;
    if (knowledge) o["knowledge"] = *knowledge;

    json agg = json::object();
    if (aggregator) agg["rule"] = *aggregator;
    if (defense_m) agg["m"] = *defense_m;
    if (f) agg["f"] = *f;
    if (beta) agg["beta"] = *beta;
    if (!agg.empty()) o["aggregator"] = agg;

    if (eta) o["eta"] = *eta;
    if (n_queries) o["n_queries"] = *n_queries;
    if (k) o["k"] = *k;
    if (serp_length) o["serp_length"] = *serp_length;
    if (rounds) o["rounds"] = *rounds;
    if (eval_interval) o["eval_interval"] = *eval_interval;
    if (repeats) o["repeats"] = *repeats;
    if (summary_window) o["summary_window"] = *summary_window;
    if (seed) o["seed"] = *seed;
    if (partition) o["partition"] = *partition;
    if (trace) o["trace"] = true;

    json fang = json::object();
    if (fang_b) fang["b"] = *fang_b;
    if (fang_jitter) fang["jitter_scale"] = *fang_jitter;
    if (fang_initial_lambda) fang["initial_lambda"] = *fang_initial_lambda;
    if (fang_min_lambda) fang["min_lambda"] = *fang_min_lambda;
    if (fang_max_iterations) fang["max_iterations"] = *fang_max_iterations;
    if (!fang.empty()) o["fang"] = fang;

    // Output directory: flag, then environment, then config.
    if (output) {
      o["output"] = *output;
    } else if (const char* env = std::getenv("FOLTR_OUTPUT_DIR"); env && *env) {
      o["output"] = env;
    }
    return o;
  }
};

// String shorthands become objects so that nested flags merge into them.
void expand_shorthands(json& doc) {
  if (doc.is_array()) {
    for (auto& d : doc) expand_shorthands(d);
    return;
  }
  if (!doc.is_object()) return;
  if (doc.contains("aggregator") && doc["aggregator"].is_string()) {
    doc["aggregator"] = {{"rule", doc["aggregator"]}};
  }
  if (doc.contains("model") && doc["model"].is_string()) {
    doc["model"] = {{"kind", doc["model"]}};
  }
}

foltr::LoadedConfigs resolve_configs(const ConfigFlags& flags) {
  json doc = json::object();
  std::filesystem::path base_dir;
  if (flags.config) {
    std::ifstream in(*flags.config);
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw foltr::ConfigError({*flags.config + ": " + e.what()});
    }
    base_dir = std::filesystem::path(*flags.config).parent_path();
  }
  expand_shorthands(doc);
  const json overrides = flags.overrides();
  if (doc.is_array()) {
    for (auto& d : doc) d.merge_patch(overrides);
  } else {
    doc.merge_patch(overrides);
  }
  return foltr::parse_config(doc, base_dir);
}

int run_command(const ConfigFlags& flags, std::size_t workers, bool charts) {
  const auto loaded = resolve_configs(flags);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';

  const std::filesystem::path out_dir = loaded.configs.front().output_dir;
  std::filesystem::create_directories(out_dir);
  {
    json resolved = json::array();
    for (const auto& c : loaded.configs) resolved.push_back(c.to_json());
    std::ofstream(out_dir / "config.resolved.json") << resolved.dump(2) << '\n';
  }

  foltr::GridOptions options;
  options.workers = workers;
  options.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  const foltr::GridResult result = foltr::run_grid(loaded.configs, out_dir, options);

  std::cout << foltr::format_summary(result.summaries);
  std::cout << "metrics: " << result.metrics_csv.string() << " (" << result.rows
            << " rows)\nsummary: " << result.summary_csv.string() << '\n';
  if (charts && result.rows > 0) {
    for (const auto& p : foltr::emit_charts({result.metrics_csv}, out_dir / "charts")) {
      std::cout << "chart: " << p.string() << '\n';
    }
  }
  for (const auto& f : result.failures) std::cerr << "failed: " << f << '\n';
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated online learning to rank: poisoning and defense experiments"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::size_t workers = 1;
  bool no_charts = false;
  auto* run = app.add_subcommand("run", "Run an experiment or grid");
  run->alias("grid");
  run_flags.add_to(*run);
  run->add_option("-j,--workers", workers, "Grid cells run concurrently")
      ->check(CLI::PositiveNumber);
  run->add_flag("--no-charts", no_charts, "Skip SVG chart emission");

  ConfigFlags check_flags;
  auto* check = app.add_subcommand("validate", "Validate a config and print it resolved");
  check_flags.add_to(*check);

  std::vector<std::string> csvs;
  std::string chart_dir = "charts";
  auto* charts = app.add_subcommand("charts", "Render SVG charts from metric CSVs");
  charts->add_option("csv", csvs, "Metric CSV files")->required()->check(CLI::ExistingFile);
  charts->add_option("-o,--output", chart_dir, "Chart directory");

  foltr::SyntheticSpec syn;
  std::string syn_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic separable LETOR file");
  synth->add_option("--queries", syn.queries);
  synth->add_option("--docs", syn.docs_per_query, "Documents per query");
  synth->add_option("--features", syn.features);
  synth->add_option("--grades", syn.grade_levels, "3 or 5")->check(CLI::IsMember({3, 5}));
  synth->add_option("--seed", syn.seed);
  synth->add_option("-o,--output", syn_out, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_flags, workers, !no_charts);
    if (*check) {
      const auto loaded = resolve_configs(check_flags);
      for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
      json resolved = json::array();
      for (const auto& c : loaded.configs) resolved.push_back(c.to_json());
      std::cout << resolved.dump(2) << '\n';
      return 0;
    }
    if (*charts) {
      std::vector<std::filesystem::path> paths(csvs.begin(), csvs.end());
      for (const auto& p : foltr::emit_charts(paths, chart_dir)) {
        std::cout << p.string() << '\n';
      }
      return 0;
    }
    if (*synth) {
      const auto data = foltr::make_separable_dataset(syn);
      std::ofstream out(syn_out);
      if (!out) throw foltr::Error("cannot write " + syn_out);
      foltr::write_letor(out, data.dataset);
      return 0;
    }
  } catch (const foltr::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
