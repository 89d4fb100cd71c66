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

#include "foltr/letor.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "foltr/rng.h"

namespace foltr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) tokens.push_back(s.substr(i, j - i));
    i = j;
  }
  return tokens;
}

double parse_double(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(line, "non-numeric value '" + std::string(token) + "'");
  }
  return value;
}

long parse_long(std::string_view token, std::size_t line,
                const char* what) {
  long value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("invalid ") + what + " '" +
                               std::string(token) + "'");
  }
  return value;
}

struct ParsedLine {
  int relevance;
  std::string qid;
  std::vector<std::pair<std::size_t, double>> features;
  std::string comment;
};

ParsedLine parse_line(std::string_view raw, std::size_t line) {
  ParsedLine parsed;
  std::string_view body = raw;
  if (auto hash = raw.find('#'); hash != std::string_view::npos) {
    parsed.comment = std::string(trim(raw.substr(hash + 1)));
    body = raw.substr(0, hash);
  }
  const auto tokens = split_ws(trim(body));
  if (tokens.size() < 2) throw ParseError(line, "expected '<rel> qid:<id>'");

  const long rel = parse_long(tokens[0], line, "relevance label");
  if (rel < 0) throw ParseError(line, "negative relevance label");
  parsed.relevance = static_cast<int>(rel);

  if (!tokens[1].starts_with("qid:") || tokens[1].size() == 4) {
    throw ParseError(line, "missing qid");
  }
  parsed.qid = std::string(tokens[1].substr(4));

  for (std::size_t t = 2; t < tokens.size(); ++t) {
    const auto colon = tokens[t].find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line, "expected <fid>:<val>, got '" +
                                 std::string(tokens[t]) + "'");
    }
    const long fid = parse_long(tokens[t].substr(0, colon), line, "feature id");
    if (fid <= 0) throw ParseError(line, "feature ids must be positive");
    parsed.features.emplace_back(static_cast<std::size_t>(fid),
                                 parse_double(tokens[t].substr(colon + 1), line));
  }
  return parsed;
}

}  // namespace

std::vector<int> QueryGroup::relevances() const {
  std::vector<int> rels;
  rels.reserve(documents.size());
  for (const auto& d : documents) rels.push_back(d.relevance);
  return rels;
}

std::size_t Dataset::document_count() const {
  std::size_t total = 0;
  for (const auto& q : queries) total += q.documents.size();
  return total;
}

int infer_grade_levels(int max_relevance) {
  if (max_relevance < 0 || max_relevance > 4) {
    throw Error("relevance label " + std::to_string(max_relevance) +
                " outside the supported 3- or 5-level scales");
  }
  return max_relevance <= 2 ? 3 : 5;
}

Dataset parse_letor(std::istream& in) {
  Dataset dataset;
  std::unordered_map<std::string, std::size_t> query_index;
  std::string raw;
  std::size_t line = 0;
  int max_rel = 0;

  while (std::getline(in, raw)) {
    ++line;
    const auto content = trim(raw);
    if (content.empty() || content.front() == '#') continue;
    ParsedLine parsed = parse_line(content, line);

    auto [it, inserted] =
        query_index.try_emplace(parsed.qid, dataset.queries.size());
    if (inserted) dataset.queries.push_back({parsed.qid, {}});
    QueryGroup& group = dataset.queries[it->second];

    Document doc;
    doc.relevance = parsed.relevance;
    max_rel = std::max(max_rel, parsed.relevance);
    for (const auto& [fid, value] : parsed.features) {
      if (fid > doc.features.size()) doc.features.resize(fid, 0.0);
      doc.features[fid - 1] = value;
      dataset.feature_dim = std::max(dataset.feature_dim, fid);
    }
    doc.doc_key = parsed.comment.empty()
                      ? parsed.qid + ":" + std::to_string(group.documents.size())
                      : std::move(parsed.comment);
    group.documents.push_back(std::move(doc));
  }

  if (dataset.queries.empty()) throw Error("empty LETOR input");
  if (dataset.feature_dim == 0) throw Error("LETOR input has no features");
  for (auto& q : dataset.queries) {
    for (auto& d : q.documents) d.features.resize(dataset.feature_dim, 0.0);
  }
  dataset.grade_levels = infer_grade_levels(max_rel);
  return dataset;
}

Dataset parse_letor(const std::string& text) {
  std::istringstream in(text);
  return parse_letor(in);
}

Dataset load_letor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  try {
    return parse_letor(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

void write_letor(std::ostream& out, const Dataset& dataset) {
  char buf[64];
  for (const auto& q : dataset.queries) {
    for (const auto& d : q.documents) {
      out << d.relevance << " qid:" << q.query_id;
      for (std::size_t f = 0; f < d.features.size(); ++f) {
        std::snprintf(buf, sizeof buf, "%.17g", d.features[f]);
        out << ' ' << (f + 1) << ':' << buf;
      }
      out << " # " << d.doc_key << '\n';
    }
  }
}

Dataset normalize_features(const Dataset& dataset) {
  const std::size_t dim = dataset.feature_dim;
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& q : dataset.queries) {
    for (const auto& d : q.documents) {
      for (std::size_t f = 0; f < dim; ++f) {
        lo[f] = std::min(lo[f], d.features[f]);
        hi[f] = std::max(hi[f], d.features[f]);
      }
    }
  }

  Dataset out = dataset;
  for (auto& q : out.queries) {
    for (auto& d : q.documents) {
      for (std::size_t f = 0; f < dim; ++f) {
        const double range = hi[f] - lo[f];
        d.features[f] = range > 0.0 ? (d.features[f] - lo[f]) / range : 0.0;
      }
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed) {
  const std::size_t nq = dataset.queries.size();
  if (nq < 2) throw Error("train/test split needs at least 2 queries");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test_fraction must lie in (0, 1)");
  }

  std::vector<std::size_t> order(nq);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = nq - 1; i > 0; --i) {
    std::swap(order[i], order[rng.index(i + 1)]);
  }

  auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(nq)));
  n_test = std::clamp<std::size_t>(n_test, 1, nq - 1);

  std::vector<bool> is_test(nq, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  Dataset train{{}, dataset.feature_dim, dataset.grade_levels};
  Dataset test{{}, dataset.feature_dim, dataset.grade_levels};
  for (std::size_t i = 0; i < nq; ++i) {
    (is_test[i] ? test : train).queries.push_back(dataset.queries[i]);
  }
  return {std::move(train), std::move(test)};
}

std::vector<Dataset> partition_queries(const Dataset& dataset,
                                       std::size_t parts) {
  if (parts == 0) throw Error("cannot partition into zero parts");
  if (dataset.queries.size() < parts) {
    throw Error("fewer queries than partitions");
  }
  std::vector<Dataset> out(parts,
                           Dataset{{}, dataset.feature_dim, dataset.grade_levels});
  for (std::size_t i = 0; i < dataset.queries.size(); ++i) {
    out[i % parts].queries.push_back(dataset.queries[i]);
  }
  return out;
}

}  // namespace foltr
