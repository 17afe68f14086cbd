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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfmem/corpus_store.hpp"
#include "rfmem/familiarity_gate.hpp"
#include "rfmem/recollection.hpp"

namespace rfmem {

enum class ForcePath { kGated, kFamiliarity, kRecollection };

std::string_view to_string(ForcePath p);
ForcePath parse_force_path(std::string_view name);

// Operation counts for one query.
//
// sim_evals counts corpus-scan similarity evaluations (M per scan):
//   familiarity:  M, plus M when the probe is shorter than min(final_k, M)
//   recollection: M * (1 + sum of beams_per_round), minus M when the probe
//                 covered round 0 (min(probe_k, M) >= min(B * F, M))
struct RetrievalCounters {
  std::size_t sim_evals = 0;
  std::size_t member_evals = 0;
  std::size_t cluster_calls = 0;
  std::size_t rounds = 0;
  std::vector<std::size_t> beams_per_round;
  std::vector<std::size_t> candidates_per_round;
  bool probe_reused = false;
};

struct RetrievalResult {
  std::string query_id;
  Strategy path = Strategy::kFamiliarity;
  ScoredList ranked;
  GateSignal gate;
  std::optional<RecollectionTrace> trace;
  RetrievalCounters counters;
  std::int64_t wall_time_us = 0;
};

struct RetrieveOptions {
  ForcePath force = ForcePath::kGated;
  bool record_trace = false;
  ScanPolicy scan = ScanPolicy::kSerial;
};

RetrievalResult retrieve(const CorpusIndex& index, const std::string& query_id,
                         std::span<const double> query, const GateParams& gate_params,
                         const RecollectParams& recollect_params,
                         const RetrieveOptions& options = {});

struct QueryInput {
  std::string query_id;
  std::vector<double> embedding;
};

/// Either a result or the error message for that query.
struct BatchEntry {
  std::string query_id;
  std::optional<RetrievalResult> result;
  std::string error;
};

/// Order-preserving; queries are spread over `threads` OpenMP threads (0 keeps
/// the runtime default). Each result is independent of scheduling.
std::vector<BatchEntry> retrieve_batch(const CorpusIndex& index, std::span<const QueryInput> queries,
                                       const GateParams& gate_params,
                                       const RecollectParams& recollect_params,
                                       const RetrieveOptions& options = {}, int threads = 0);

}  // namespace rfmem
