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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "foltr/error.h"
#include "foltr/experiment.h"

namespace foltr {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, std::size_t line, const char* column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, std::string("bad ") + column + " value '" + s + "'");
  }
  return value;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line, "bad ndcg_at_10 value '" + s + "'");
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string file_stem(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') ? c : '_';
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf",
                                    "#bcbd22", "#7f7f7f"};

constexpr double kPanelWidth = 420.0;
constexpr double kPanelHeight = 300.0;
constexpr double kMarginLeft = 55.0;
constexpr double kMarginRight = 15.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 40.0;
constexpr double kLegendRow = 16.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty metrics file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw ParseError(1, "header does not match '" + std::string(kCsvHeader) + "'");
  }
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 11) {
      throw ParseError(line_no, "expected 11 columns, found " + std::to_string(f.size()));
    }
    MetricRow r;
    r.round = parse_number<std::size_t>(f[0], line_no, "round");
    r.ndcg = parse_double(f[1], line_no);
    r.dataset = f[2];
    r.click_model = f[3];
    r.attack = f[4];
    r.knowledge = f[5];
    r.defense = f[6];
    r.n = parse_number<std::size_t>(f[7], line_no, "n");
    r.m = parse_number<std::size_t>(f[8], line_no, "m");
    r.seed = parse_number<std::uint64_t>(f[9], line_no, "seed");
    r.repeat = parse_number<std::size_t>(f[10], line_no, "repeat");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_metrics_csv(in);
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<ChartSeries> chart_series(const std::vector<MetricRow>& rows,
                                      const std::string& dataset,
                                      const std::string& click_model) {
  using Key = std::tuple<std::string, std::string, std::string, std::size_t>;
  std::map<Key, std::map<std::size_t, std::pair<double, std::size_t>>> acc;
  for (const auto& r : rows) {
    if (r.dataset != dataset || r.click_model != click_model) continue;
    const bool model_poison = r.attack != "none" && r.attack != "data_poison";
    const bool honest = r.attack == "none" || r.m == 0;
    Key key{honest ? "none" : r.attack, model_poison && !honest ? r.knowledge : "",
            r.defense, honest ? 0 : r.m};
    auto& cell = acc[key][r.round];
    cell.first += r.ndcg;
    ++cell.second;
  }

  std::vector<ChartSeries> out;
  for (const auto& [key, by_round] : acc) {
    const auto& [attack, knowledge, defense, m] = key;
    ChartSeries s;
    s.baseline = attack == "none" && defense == "fedavg";
    if (attack == "none") {
      s.label = (s.baseline ? "honest" : "honest/" + defense);
    } else {
      s.label = attack + (knowledge.empty() ? "" : "(" + knowledge + ")") + "/" +
                defense + "/m=" + std::to_string(m);
    }
    for (const auto& [round, sum] : by_round) {
      s.points.emplace_back(round, sum.first / static_cast<double>(sum.second));
    }
    out.push_back(std::move(s));
  }
  std::stable_partition(out.begin(), out.end(),
                        [](const ChartSeries& s) { return s.baseline; });
  return out;
}

std::string render_svg(const std::string& title,
                       const std::vector<ChartPanel>& panels) {
  std::size_t legend_rows = 0;
  for (const auto& p : panels) legend_rows = std::max(legend_rows, p.series.size());
  const double panel_h = kPanelHeight + kLegendRow * static_cast<double>(legend_rows);
  const double width = kPanelWidth * static_cast<double>(std::max<std::size_t>(1, panels.size()));
  const double height = panel_h + 30.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << fmt(width / 2) << "\" y=\"18\" text-anchor=\"middle\" "
      << "font-size=\"14\">" << escape_xml(title) << "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double x0 = kPanelWidth * static_cast<double>(p) + kMarginLeft;
    const double y0 = 30.0 + kMarginTop;
    const double w = kPanelWidth - kMarginLeft - kMarginRight;
    const double h = kPanelHeight - kMarginTop - kMarginBottom;

    std::size_t max_round = 1;
    double lo = 1.0, hi = 0.0;
    for (const auto& s : panel.series) {
      for (const auto& [r, v] : s.points) {
        max_round = std::max(max_round, r);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (lo > hi) {
      lo = 0.0;
      hi = 1.0;
    }
    lo = std::max(0.0, std::floor(lo * 10.0) / 10.0);
    hi = std::min(1.0, std::ceil(hi * 10.0) / 10.0);
    if (hi - lo < 0.1) hi = std::min(1.0, lo + 0.1), lo = hi - 0.1;

    auto sx = [&](double r) { return x0 + w * r / static_cast<double>(max_round); };
    auto sy = [&](double v) { return y0 + h * (1.0 - (v - lo) / (hi - lo)); };

    svg << "<g>\n<text x=\"" << fmt(x0 + w / 2) << "\" y=\"" << fmt(y0 - 8)
        << "\" text-anchor=\"middle\">" << escape_xml(panel.title) << "</text>\n";
    svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(w)
        << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = lo + (hi - lo) * t / 4.0;
      const double r = static_cast<double>(max_round) * t / 4.0;
      svg << "<text x=\"" << fmt(x0 - 5) << "\" y=\"" << fmt(sy(v) + 4)
          << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
      svg << "<text x=\"" << fmt(sx(r)) << "\" y=\"" << fmt(y0 + h + 14)
          << "\" text-anchor=\"middle\">" << static_cast<long long>(std::llround(r))
          << "</text>\n";
    }
    svg << "<text x=\"" << fmt(x0 + w / 2) << "\" y=\"" << fmt(y0 + h + 30)
        << "\" text-anchor=\"middle\">round</text>\n";
    svg << "<text transform=\"translate(" << fmt(x0 - 40) << "," << fmt(y0 + h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">nDCG@10</text>\n";

    std::size_t color = 0;
    for (std::size_t i = 0; i < panel.series.size(); ++i) {
      const auto& s = panel.series[i];
      const std::string stroke =
          s.baseline ? "#000000" : kPalette[color++ % std::size(kPalette)];
      svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << (s.baseline ? "2" : "1.5") << "\" points=\"";
      for (std::size_t j = 0; j < s.points.size(); ++j) {
        if (j) svg << ' ';
        svg << fmt(sx(static_cast<double>(s.points[j].first))) << ','
            << fmt(sy(s.points[j].second));
      }
      svg << "\"/>\n";
      const double ly = y0 + h + kMarginBottom + 6 + kLegendRow * static_cast<double>(i);
      svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(ly) << "\" x2=\""
          << fmt(x0 + 20) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << fmt(x0 + 25) << "\" y=\"" << fmt(ly + 4) << "\">"
          << escape_xml(s.label) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> emit_charts(
    const std::vector<std::filesystem::path>& csv_paths,
    const std::filesystem::path& output_dir) {
  std::vector<MetricRow> rows;
  for (const auto& p : csv_paths) {
    auto part = read_metrics_csv(p);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  std::map<std::string, std::set<std::string>> pairs;
  for (const auto& r : rows) pairs[r.dataset].insert(r.click_model);

  std::filesystem::create_directories(output_dir);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << body;
    written.push_back(path);
  };

  for (const auto& [dataset, click_models] : pairs) {
    std::vector<ChartPanel> panels;
    for (const auto& cm : click_models) {
      ChartPanel panel{cm, chart_series(rows, dataset, cm)};
      write(output_dir / (file_stem(dataset) + "_" + file_stem(cm) + ".svg"),
            render_svg(dataset + " / " + cm, {panel}));
      panels.push_back(std::move(panel));
    }
    write(output_dir / (file_stem(dataset) + "_panels.svg"), render_svg(dataset, panels));
  }
  return written;
}

}  // namespace foltr
