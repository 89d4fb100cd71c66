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

#ifndef FOLTR_EXPERIMENT_H_
#define FOLTR_EXPERIMENT_H_

// Batch experiment runner: JSON configs (optionally expanded over a grid of
// click model x attack x defense x m), seeded repeats, CSV metrics, summary
// statistics, per-round traces and parameter checkpoints.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "foltr/aggregation.h"
#include "foltr/attacks.h"
#include "foltr/error.h"
#include "foltr/federation.h"
#include "foltr/metrics.h"
#include "foltr/ranking_model.h"
#include "foltr/synthetic.h"

namespace foltr {

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct FoldPaths {
  std::string train;
  std::string test;
  bool operator==(const FoldPaths&) const = default;
};

// Exactly one of: train + test files, a single file split by test_fraction,
// a list of pre-split folds, or a generated separable dataset.
struct DatasetSource {
  std::string name = "dataset";
  std::optional<std::string> train;
  std::optional<std::string> test;
  std::optional<std::string> path;
  std::vector<FoldPaths> folds;
  std::optional<SyntheticSpec> synthetic;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 0;
  bool normalize = true;
  std::optional<int> grade_levels;

  bool operator==(const DatasetSource&) const = default;
};

struct ExperimentConfig {
  DatasetSource data;
  ModelKind model_kind = ModelKind::kLinear;
  std::size_t hidden_dim = 64;
  std::string click_model = "perfect";
  std::optional<ClickModel> custom_click_model;
  std::size_t n = 10;
  std::size_t m = 0;
  AttackKind attack = AttackKind::kNone;
  Knowledge knowledge = Knowledge::kPartial;
  AggregationRule defense = AggregationRule::kFedAvg;
  // Server-side assumption about m; defaults to the true m.
  std::optional<std::size_t> defense_m;
  std::optional<std::size_t> f;
  std::optional<std::size_t> beta;
  double eta = 0.1;
  std::size_t n_queries = 5;
  std::size_t k = kDefaultCutoff;
  std::size_t serp_length = kDefaultSerpLength;
  std::size_t rounds = 1000;
  std::size_t eval_interval = 10;
  std::size_t repeats = 5;
  std::size_t summary_window = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "results";
  QueryPartition partition = QueryPartition::kShared;
  bool trace = false;
  FangKrumOptions fang_krum;
  FangTrimOptions fang_trim;

  AggregatorSpec aggregator() const;
  ThreatModel threat() const;
  std::string click_model_name() const;
  // Human-readable cell label, e.g. "synthetic/perfect/data_poison/krum/m=2".
  std::string label() const;
  nlohmann::json to_json() const;
  // Hex FNV-1a of the canonical JSON form (output directory excluded).
  std::string fingerprint() const;
};

struct LoadedConfigs {
  std::vector<ExperimentConfig> configs;
  std::vector<std::string> warnings;
};

// Parses one document (object or array of objects). Relative dataset paths
// resolve against base_dir. Unknown keys and invariant violations are
// reported together in a ConfigError.
LoadedConfigs parse_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});

// Reads a JSON config file; `overrides` is merge-patched into every
// experiment object before grid expansion.
LoadedConfigs load_config(const std::filesystem::path& file,
                          const nlohmann::json& overrides = nlohmann::json::object());

// Problems that make the config unrunnable; warnings are appended to
// `warnings` when given.
std::vector<std::string> validate_config(const ExperimentConfig& config,
                                         std::vector<std::string>* warnings = nullptr);

struct PreparedData {
  std::vector<std::pair<Dataset, Dataset>> folds;
  int grade_levels = 5;
  std::size_t feature_dim = 0;
};

PreparedData prepare_data(const DatasetSource& source);

FederationConfig make_federation_config(const ExperimentConfig& config,
                                        const PreparedData& data);

// Runs are numbered fold-major: run r uses fold r / repeats and the seed of
// repeat r % repeats.
std::size_t run_count(const ExperimentConfig& config, const PreparedData& data);
std::uint64_t run_seed(const ExperimentConfig& config, std::size_t run);

std::vector<MetricRecord> run_config(
    const ExperimentConfig& config, const PreparedData& data, std::size_t run,
    const std::function<void(const RoundTrace&)>& on_round = {},
    ParamVector* final_params = nullptr);

inline constexpr std::string_view kCsvHeader =
    "round,ndcg_at_10,dataset,click_model,attack,knowledge,defense,n,m,seed,"
    "repeat";

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const ExperimentConfig& config,
                    std::size_t run, const std::vector<MetricRecord>& records);

nlohmann::json trace_to_json(const RoundTrace& trace, std::size_t cell,
                             std::size_t run);

struct Checkpoint {
  ModelSpec model;
  std::size_t round = 0;
  std::uint64_t seed = 0;
  ParamVector params;
};
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct RunSummary {
  std::string label;
  std::string dataset;
  std::string click_model;
  std::string attack;
  std::string knowledge;
  std::string defense;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t runs = 0;
  double mean = 0.0;
  double stddev = 0.0;
  // mean minus the honest FedAvg cell (no attack, or m = 0) with the same
  // dataset and click model.
  std::optional<double> baseline_delta;
};

struct GridOptions {
  std::size_t workers = 1;
  std::function<void(const std::string&)> log;
};

struct GridResult {
  std::vector<RunSummary> summaries;
  std::vector<std::string> failures;
  std::filesystem::path metrics_csv;
  std::filesystem::path summary_csv;
  std::size_t rows = 0;
  int exit_code() const { return failures.empty() ? 0 : 1; }
};

GridResult run_grid(const std::vector<ExperimentConfig>& configs,
                    const std::filesystem::path& output_dir,
                    const GridOptions& options = {});

// Fixed-width table of the summaries.
std::string format_summary(const std::vector<RunSummary>& summaries);

}  // namespace foltr

#endif  // FOLTR_EXPERIMENT_H_
