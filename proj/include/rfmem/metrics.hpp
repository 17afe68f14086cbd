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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfmem/corpus_store.hpp"
#include "rfmem/familiarity_gate.hpp"
#include "rfmem/recollection.hpp"
#include "rfmem/retriever.hpp"

namespace rfmem {

/// |top-k ids ∩ gold| / |gold|; 1.0 for an empty gold set.
double recall_at_k(const ScoredList& ranked, std::span<const std::string> gold, std::size_t k);

/// Full scan and full sort over the raw records. Deliberately shares no code with top_k.
ScoredList oracle_top_k(std::span<const MemoryRecord> corpus, std::span<const double> query,
                        std::size_t k);

/// Linear-interpolated quantile (q in [0, 1]) of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Counter values implied by the parameters and the number of rounds executed.
struct ExpectedCounters {
  std::size_t sim_evals = 0;
  std::size_t member_evals = 0;
  std::size_t cluster_calls = 0;
  std::vector<std::size_t> beams_per_round;
  std::vector<std::size_t> candidates_per_round;
};

ExpectedCounters expected_counters(Strategy path, std::size_t corpus_size, std::size_t rounds,
                                   const GateParams& gate, const RecollectParams& params);

/// Empty string when the counters match; otherwise a description of the first mismatch.
std::string check_counters(const RetrievalResult& result, std::size_t corpus_size,
                           const GateParams& gate, const RecollectParams& params);

struct PathLatency {
  std::size_t count = 0;
  double mean_us = 0.0;
  double median_us = 0.0;
  double p95_us = 0.0;
  double mean_sim_evals = 0.0;
};

struct LatencySummary {
  std::optional<PathLatency> familiarity;
  std::optional<PathLatency> recollection;
  std::size_t total = 0;
  std::size_t counter_mismatches = 0;
  std::vector<std::string> mismatch_details;
};

LatencySummary latency_report(std::span<const RetrievalResult> results, std::size_t corpus_size,
                              const GateParams& gate, const RecollectParams& params);

}  // namespace rfmem
