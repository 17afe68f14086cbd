// Copyright 2026 The rfmem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rfmem/corpus_store.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "rfmem/scan_kernels.hpp"

namespace rfmem {

namespace {

using nlohmann::json;

MemoryRecord parse_record(const std::string& line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw IngestError(line_no, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw IngestError(line_no, "expected a JSON object");

  MemoryRecord rec;
  auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) throw IngestError(line_no, "missing string field 'id'");
  rec.id = id->get<std::string>();

  auto emb = obj.find("embedding");
  if (emb == obj.end() || !emb->is_array()) {
    throw IngestError(line_no, "missing array field 'embedding'");
  }
  rec.embedding.reserve(emb->size());
  for (const auto& v : *emb) {
    if (!v.is_number()) throw IngestError(line_no, "embedding contains a non-number");
    rec.embedding.push_back(v.get<double>());
  }

  if (auto text = obj.find("text"); text != obj.end() && !text->is_null()) {
    if (!text->is_string()) throw IngestError(line_no, "'text' must be a string");
    rec.text = text->get<std::string>();
  }
  if (auto meta = obj.find("metadata"); meta != obj.end() && !meta->is_null()) {
    if (!meta->is_object()) throw IngestError(line_no, "'metadata' must be an object");
    for (const auto& [k, v] : meta->items()) {
      if (!v.is_string()) throw IngestError(line_no, "metadata value for '" + k + "' is not a string");
      rec.metadata.emplace(k, v.get<std::string>());
    }
  }
  return rec;
}

}  // namespace

std::vector<double> normalized(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

CorpusIndex CorpusIndex::build(std::vector<MemoryRecord> records,
                               std::span<const std::size_t> line_numbers) {
  auto line_of = [&](std::size_t i) {
    return line_numbers.empty() ? i + 1 : line_numbers[i];
  };
  if (records.empty()) throw IngestError(0, "empty corpus");

  CorpusIndex index;
  index.dimension_ = records.front().embedding.size();
  if (index.dimension_ == 0) throw IngestError(line_of(0), "embedding is empty");
  index.rows_.reserve(records.size());
  index.matrix_.reserve(records.size() * index.dimension_);

  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& rec = records[i];
    if (rec.embedding.size() != index.dimension_) {
      throw IngestError(line_of(i), "dimension mismatch: expected " +
                                        std::to_string(index.dimension_) + ", got " +
                                        std::to_string(rec.embedding.size()));
    }
    double sq = 0.0;
    for (double x : rec.embedding) sq += x * x;
    index.raw_norms_.push_back(std::sqrt(sq));
    try {
      rec.embedding = normalized(rec.embedding);
    } catch (const std::invalid_argument&) {
      throw IngestError(line_of(i), "zero-norm embedding for id '" + rec.id + "'");
    }
    if (!index.rows_.emplace(rec.id, i).second) {
      throw IngestError(line_of(i), "duplicate id '" + rec.id + "'");
    }
    index.matrix_.insert(index.matrix_.end(), rec.embedding.begin(), rec.embedding.end());
  }
  index.records_ = std::move(records);
  return index;
}

std::optional<std::size_t> CorpusIndex::find_row(const std::string& id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

CorpusIndex ingest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(0, "cannot open " + path.string());

  std::vector<MemoryRecord> records;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(line, line_no));
    lines.push_back(line_no);
  }
  return CorpusIndex::build(std::move(records), lines);
}

ScoredList top_k(const CorpusIndex& index, std::span<const double> query, std::size_t k,
                 const IdSet& exclude, ScanPolicy policy) {
  if (query.size() != index.dimension()) throw DimensionMismatch(index.dimension(), query.size());
  if (k == 0) throw std::invalid_argument("top_k: k must be at least 1");

  const std::size_t m = index.size();
  std::vector<double> scores(m);
  if (policy == ScanPolicy::kParallel) {
    kernels::score_rows_parallel(index.matrix(), index.dimension(), query, scores);
  } else {
    kernels::score_rows_serial(index.matrix(), index.dimension(), query, scores);
  }

  std::vector<std::size_t> rows;
  rows.reserve(m);
  if (exclude.empty()) {
    rows.resize(m);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  } else {
    std::vector<char> skip(m, 0);
    for (const auto& id : exclude) {
      if (auto r = index.find_row(id)) skip[*r] = 1;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (!skip[r]) rows.push_back(r);
    }
  }

  const auto& records = index.records();
  auto before = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return records[a].id < records[b].id;
  };
  const std::size_t take = std::min(k, rows.size());
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take), rows.end(),
                    before);

  ScoredList out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({records[rows[i]].id, scores[rows[i]]});
  return out;
}

const MemoryRecord& lookup(const CorpusIndex& index, const std::string& id) {
  auto row = index.find_row(id);
  if (!row) throw UnknownId(id);
  return index.record(*row);
}

}  // namespace rfmem
