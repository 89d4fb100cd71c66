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

#ifndef FOLTR_LETOR_H_
#define FOLTR_LETOR_H_

// LETOR / SVMLight ranking data: parsing, serialization, min-max feature
// normalization and query-level train/test splitting.
//
// Line format:  <rel> qid:<qid> <fid>:<val> ... [# comment]
// Feature ids are 1-based; ids that do not appear on a line default to 0.0.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "foltr/error.h"

namespace foltr {

struct Document {
  std::vector<double> features;
  int relevance = 0;
  // Trailing comment of the source line, or "<qid>:<index>" when absent.
  std::string doc_key;

  bool operator==(const Document&) const = default;
};

struct QueryGroup {
  std::string query_id;
  std::vector<Document> documents;

  std::vector<int> relevances() const;
  bool operator==(const QueryGroup&) const = default;
};

struct Dataset {
  std::vector<QueryGroup> queries;
  std::size_t feature_dim = 0;
  int grade_levels = 5;

  bool empty() const { return queries.empty(); }
  std::size_t document_count() const;
  bool operator==(const Dataset&) const = default;
};

// Grade scale implied by the largest label: 3 levels when every label is
// at most 2 (MQ2007 style), otherwise 5. Labels above 4 are rejected.
int infer_grade_levels(int max_relevance);

Dataset parse_letor(std::istream& in);
Dataset parse_letor(const std::string& text);
Dataset load_letor_file(const std::filesystem::path& path);

// Writes every feature explicitly with round-trip precision and the doc key
// as the trailing comment.
void write_letor(std::ostream& out, const Dataset& dataset);

// Global per-feature min-max scaling to [0, 1]. Constant features map to 0.
Dataset normalize_features(const Dataset& dataset);

// Query-level split. The test side receives round(test_fraction * |Q|)
// queries, clamped so both sides are non-empty. Each side keeps the input
// query order.
std::pair<Dataset, Dataset> split_train_test(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed);

// Disjoint round-robin partition of the queries into `parts` datasets.
std::vector<Dataset> partition_queries(const Dataset& dataset,
                                       std::size_t parts);

}  // namespace foltr

#endif  // FOLTR_LETOR_H_
