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
#include <unordered_set>
#include <vector>

#include "rfmem/corpus_store.hpp"

namespace rfmem {

struct RecollectParams {
  std::size_t beam_b = 3;
  std::size_t fanout_f = 2;
  std::size_t max_rounds_r = 3;
  double alpha = 0.5;
  std::size_t final_k = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-round candidate budget (B + r) * F.
std::size_t round_budget(const RecollectParams& params, std::size_t round);

/// One message per round whose budget exceeds final_k. The loop still runs.
std::vector<std::string> budget_warnings(const RecollectParams& params);

struct MixedQuery {
  std::vector<double> vector;
  bool degenerate = false;  // blend cancelled out; `vector` is the original query
};

/// norm(alpha * current + (1 - alpha) * centroid + original).
MixedQuery alpha_mix(std::span<const double> current, std::span<const double> centroid,
                     std::span<const double> original, double alpha);

/// Sum of <query, member> over the cluster.
double beam_score(std::span<const double> query, std::span<const std::span<const double>> members);

struct BeamExpansion {
  std::size_t beam = 0;
  ScoredList candidates;
  std::vector<std::vector<std::string>> clusters;
};

struct NextEntry {
  std::size_t beam = 0;
  std::size_t cluster = 0;
  std::vector<double> query;
  bool degenerate = false;
  double score = 0.0;
  std::vector<std::string> members;
};

struct TraceRound {
  std::size_t round = 0;
  std::size_t budget = 0;
  std::vector<BeamExpansion> beams;
  std::vector<NextEntry> next;
  std::vector<std::size_t> kept;  // indices into `next`, ascending
  std::vector<std::string> bagged;
};

struct RecollectionTrace {
  std::vector<TraceRound> rounds;
};

/// Accumulates first-seen evidence with the score it was inserted at.
class EvidenceBag {
 public:
  /// Returns false if the id was already seen.
  bool insert(const std::string& id, double score);
  bool contains(const std::string& id) const { return seen_.count(id) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }
  const ScoredList& entries() const noexcept { return entries_; }  // insertion order
  ScoredList ranked(std::size_t k) const;

 private:
  ScoredList entries_;
  std::unordered_set<std::string> seen_;
};

struct RecollectCounters {
  std::size_t sim_evals = 0;      // corpus-scan similarity evaluations
  std::size_t member_evals = 0;   // <mixed query, member> products for beam scoring
  std::size_t cluster_calls = 0;
  std::size_t rounds = 0;
  std::vector<std::size_t> beams_per_round;
  std::vector<std::size_t> candidates_per_round;  // summed over beams
  bool reused_round0 = false;
};

struct RecollectOutcome {
  ScoredList ranked;
  std::optional<RecollectionTrace> trace;
  RecollectCounters counters;
};

struct RecollectOptions {
  /// Top list for the original query; used for round 0 instead of a scan when
  /// it holds at least min(round_budget(0), M) entries.
  const ScoredList* round0_candidates = nullptr;
  bool record_trace = false;
  ScanPolicy scan = ScanPolicy::kSerial;
};

RecollectOutcome recollect(const CorpusIndex& index, std::span<const double> query,
                           const RecollectParams& params, const RecollectOptions& options = {});

}  // namespace rfmem
