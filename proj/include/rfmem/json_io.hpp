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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rfmem/familiarity_gate.hpp"
#include "rfmem/recollection.hpp"
#include "rfmem/retriever.hpp"
#include "rfmem/synthetic.hpp"

namespace rfmem {

struct QueryRecord {
  std::string query_id;
  std::vector<double> embedding;  // as read; normalization happens at retrieval
  std::optional<std::vector<std::string>> gold;
  std::map<std::string, std::string> metadata;

  std::optional<std::string> category() const;
};

/// Reads a query JSON Lines file. Throws IngestError with the line number on bad lines.
std::vector<QueryRecord> read_queries(const std::filesystem::path& path);

/// Reads a JSON object mapping query_id to an array of memory ids.
GoldSet read_gold(const std::filesystem::path& path);

struct ResultJsonOptions {
  bool timing = true;
  bool trace = false;
  bool trace_vectors = false;
  bool distribution = false;
};

nlohmann::json to_json(const GateSignal& signal, bool with_distribution);
nlohmann::json to_json(const RecollectionTrace& trace, bool with_vectors);
nlohmann::json to_json(const RetrievalResult& result, const ResultJsonOptions& options);
nlohmann::json error_json(const std::string& query_id, const std::string& message);

}  // namespace rfmem
