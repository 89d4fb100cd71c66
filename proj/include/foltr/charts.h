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

#ifndef FOLTR_CHARTS_H_
#define FOLTR_CHARTS_H_

// SVG line charts of nDCG@10 against round, read back from metric CSVs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace foltr {

struct MetricRow {
  std::size_t round = 0;
  double ndcg = 0.0;
  std::string dataset;
  std::string click_model;
  std::string attack;
  std::string knowledge;
  std::string defense;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t repeat = 0;
};

// Throws ParseError when the header or a row does not match the schema.
std::vector<MetricRow> read_metrics_csv(std::istream& in);
std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path);

struct ChartSeries {
  std::string label;
  // (round, mean nDCG over every run reporting that round)
  std::vector<std::pair<std::size_t, double>> points;
  bool baseline = false;
};

// One series per (attack, knowledge, defense, m) for the given dataset and
// click model, sorted with the honest FedAvg baseline first.
std::vector<ChartSeries> chart_series(const std::vector<MetricRow>& rows,
                                      const std::string& dataset,
                                      const std::string& click_model);

struct ChartPanel {
  std::string title;
  std::vector<ChartSeries> series;
};

// Renders panels side by side in one SVG document.
std::string render_svg(const std::string& title,
                       const std::vector<ChartPanel>& panels);

// Writes <dataset>_<click_model>.svg for every pair present and
// <dataset>_panels.svg with one panel per click model. Returns the paths.
std::vector<std::filesystem::path> emit_charts(
    const std::vector<std::filesystem::path>& csv_paths,
    const std::filesystem::path& output_dir);

}  // namespace foltr

#endif  // FOLTR_CHARTS_H_
