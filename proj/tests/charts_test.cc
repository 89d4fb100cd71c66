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

#include "foltr/charts.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "foltr/error.h"
#include "foltr/experiment.h"

namespace foltr {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string csv(const std::string& body) { return std::string(kCsvHeader) + "\n" + body; }

TEST(ReadMetricsCsvTest, ParsesRows) {
  std::istringstream in(csv(
      "0,0.1000000000,syn,perfect,none,partial,fedavg,10,0,7,0\n"
      "10,0.5000000000,syn,perfect,lie,full,krum,10,2,7,1\n"));
  const auto rows = read_metrics_csv(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].round, 10u);
  EXPECT_DOUBLE_EQ(rows[1].ndcg, 0.5);
  EXPECT_EQ(rows[1].attack, "lie");
  EXPECT_EQ(rows[1].knowledge, "full");
  EXPECT_EQ(rows[1].m, 2u);
  EXPECT_EQ(rows[1].repeat, 1u);
}

TEST(ReadMetricsCsvTest, RejectsWrongHeaderOrWidth) {
  std::istringstream bad_header("round,ndcg\n0,0.1\n");
  EXPECT_THROW(read_metrics_csv(bad_header), ParseError);
  std::istringstream short_row(csv("0,0.1,syn,perfect\n"));
  try {
    read_metrics_csv(short_row);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(read_metrics_csv(std::filesystem::path("/nonexistent/metrics.csv")), Error);
}

TEST(ChartSeriesTest, SingleRunGivesOneLine) {
  std::istringstream in(csv(
      "0,0.1,syn,perfect,none,partial,fedavg,10,0,7,0\n"
      "10,0.6,syn,perfect,none,partial,fedavg,10,0,7,0\n"));
  const auto series = chart_series(read_metrics_csv(in), "syn", "perfect");
  ASSERT_EQ(series.size(), 1u);
  EXPECT_TRUE(series[0].baseline);
  EXPECT_EQ(series[0].points.size(), 2u);
  EXPECT_EQ(series[0].points[1], (std::pair<std::size_t, double>{10, 0.6}));
}

TEST(ChartSeriesTest, RepeatsAreAveragedAndBaselineFirst) {
  std::istringstream in(csv(
      "0,0.2,syn,perfect,lie,full,krum,10,2,1,0\n"
      "0,0.4,syn,perfect,lie,full,krum,10,2,2,1\n"
      "0,0.1,syn,perfect,data_poison,partial,fedavg,10,0,1,0\n"
      "0,0.3,syn,perfect,none,partial,fedavg,10,0,2,1\n"
      "0,0.9,syn,navigational,none,partial,fedavg,10,0,1,0\n"));
  const auto series = chart_series(read_metrics_csv(in), "syn", "perfect");
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].label, "honest");
  // The m = 0 data poisoning row counts as honest.
  EXPECT_NEAR(series[0].points[0].second, 0.2, 1e-12);
  EXPECT_EQ(series[1].label, "lie(full)/krum/m=2");
  EXPECT_NEAR(series[1].points[0].second, 0.3, 1e-12);
}

TEST(RenderSvgTest, PanelsAndBaselineColour) {
  ChartSeries honest{"honest", {{0, 0.1}, {10, 0.5}}, true};
  ChartSeries attacked{"lie(full)/krum/m=2", {{0, 0.1}, {10, 0.2}}, false};
  const std::string svg = render_svg("syn", {{"perfect", {honest, attacked}},
                                             {"informational", {honest}}});
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 3u);
  EXPECT_EQ(count(svg, "<polyline fill=\"none\" stroke=\"#000000\""), 2u);
  EXPECT_NE(svg.find("informational"), std::string::npos);
}

TEST(EmitChartsTest, WritesPerModelAndPanelFiles) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "foltr_test_charts";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "metrics.csv") << csv(
      "0,0.1,syn,perfect,none,partial,fedavg,10,0,7,0\n"
      "0,0.2,syn,informational,none,partial,fedavg,10,0,7,0\n");
  const auto paths = emit_charts({dir / "metrics.csv"}, dir / "charts");
  EXPECT_EQ(paths.size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "charts" / "syn_perfect.svg"));
  EXPECT_TRUE(fs::exists(dir / "charts" / "syn_informational.svg"));
  EXPECT_TRUE(fs::exists(dir / "charts" / "syn_panels.svg"));
}

}  // namespace
}  // namespace foltr
