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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rfmem/corpus_store.hpp"

namespace rfmem {

/// Shape of a generated corpus with planted evidence chains.
struct SyntheticSpec {
  std::size_t dimension = 32;
  std::size_t corpus_size = 2000;
  std::size_t clusters = 8;
  double spread = 1.2;           // angular spread of cluster members, radians
  std::size_t queries = 20;
  std::size_t chain_length = 6;
  double dispersion = 0.5;       // fraction of each chain placed toward another cluster
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for out-of-range fields or infeasible layouts.
  void validate() const;
};

struct SyntheticQuery {
  std::string query_id;
  std::vector<double> embedding;
  std::vector<std::string> gold;            // in-cluster ids first, then dispersed ids
  std::vector<std::string> dispersed_gold;
  std::size_t home_cluster = 0;
  std::size_t target_cluster = 0;
};

struct SyntheticData {
  std::vector<MemoryRecord> corpus;
  std::vector<SyntheticQuery> queries;
};

using GoldSet = std::map<std::string, std::vector<std::string>>;

SyntheticData generate(const SyntheticSpec& spec);

GoldSet gold_set(const SyntheticData& data);

/// Writes corpus.jsonl, queries.jsonl and gold.json into `dir`.
void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir);

}  // namespace rfmem
