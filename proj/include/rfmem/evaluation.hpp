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

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rfmem/corpus_store.hpp"
#include "rfmem/json_io.hpp"
#include "rfmem/metrics.hpp"
#include "rfmem/retriever.hpp"
#include "rfmem/run_config.hpp"

namespace rfmem {

class MissingGold : public std::runtime_error {
 public:
  explicit MissingGold(const std::string& query_id)
      : std::runtime_error("no gold set for query " + query_id) {}
};

/// Gold per query, from `gold` when given, else from the query lines themselves.
GoldSet resolve_gold(const std::vector<QueryRecord>& queries, const std::optional<GoldSet>& gold);

std::vector<QueryInput> query_inputs(const std::vector<QueryRecord>& queries);

struct EvalReport {
  std::vector<std::size_t> cutoffs;
  std::vector<BatchEntry> entries;
  std::vector<std::vector<double>> per_query_recall;  // [query][cutoff]; empty row on error
  std::map<std::string, std::vector<double>> mean_recall;  // "overall" plus one per category
  std::map<std::string, std::size_t> category_sizes;
  std::size_t familiarity = 0;
  std::size_t recollection = 0;
  std::size_t errors = 0;
  double mean_wall_us = 0.0;
  std::optional<LatencySummary> latency;
};

EvalReport evaluate(const CorpusIndex& index, const std::vector<QueryRecord>& queries,
                    const GoldSet& gold, const RunConfig& config);

nlohmann::json to_json(const EvalReport& report, bool timing);
std::string summary_csv(const EvalReport& report, const std::string& label, bool timing,
                        bool header = true);
std::string per_query_csv(const EvalReport& report, const std::vector<QueryRecord>& queries);

struct GateStatRow {
  std::string query_id;
  std::optional<double> mean;
  std::optional<double> entropy;
  Strategy strategy = Strategy::kRecollection;
  std::string error;
};

/// Five-number summary: min, q1, median, q3, max (linear interpolation).
using Quartiles = std::array<double, 5>;

struct GateStats {
  std::vector<GateStatRow> rows;
  std::optional<Quartiles> mean_quartiles;
  std::optional<Quartiles> entropy_quartiles;
  std::size_t familiarity = 0;
  std::size_t recollection = 0;
};

/// Probe and gate only; no final retrieval.
GateStats gate_stats(const CorpusIndex& index, const std::vector<QueryRecord>& queries,
                     const GateParams& params, int threads = 0);

std::string gate_stats_csv(const GateStats& stats);
nlohmann::json to_json(const GateStats& stats);

/// Axis name -> values, in file order. Axis names are run-config keys.
using SweepGrid = std::vector<std::pair<std::string, std::vector<std::string>>>;

SweepGrid read_sweep_grid(const std::filesystem::path& path);

struct SweepRow {
  std::vector<std::string> values;  // one per axis
  EvalReport report;
};

std::vector<SweepRow> sweep(const CorpusIndex& index, const std::vector<QueryRecord>& queries,
                            const GoldSet& gold, const RunConfig& base, const SweepGrid& grid);

std::string sweep_csv(const SweepGrid& grid, const std::vector<SweepRow>& rows, bool timing);
nlohmann::json sweep_json(const SweepGrid& grid, const std::vector<SweepRow>& rows, bool timing);

}  // namespace rfmem
