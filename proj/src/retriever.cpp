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

#include "rfmem/retriever.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <omp.h>

#include "rfmem/scan_kernels.hpp"

namespace rfmem {

std::string_view to_string(ForcePath p) {
  switch (p) {
    case ForcePath::kFamiliarity: return "familiarity";
    case ForcePath::kRecollection: return "recollection";
    case ForcePath::kGated: break;
  }
  return "gated";
}

ForcePath parse_force_path(std::string_view name) {
  if (name == "gated") return ForcePath::kGated;
  if (name == "familiarity") return ForcePath::kFamiliarity;
  if (name == "recollection") return ForcePath::kRecollection;
  throw std::invalid_argument("unknown force path: " + std::string(name));
}

RetrievalResult retrieve(const CorpusIndex& index, const std::string& query_id,
                         std::span<const double> query, const GateParams& gate_params,
                         const RecollectParams& recollect_params, const RetrieveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  gate_params.validate();
  recollect_params.validate();
  if (index.empty()) throw std::invalid_argument("retrieve: empty corpus");
  if (query.size() != index.dimension()) throw DimensionMismatch(index.dimension(), query.size());

  std::vector<double> x(query.begin(), query.end());
  if (std::abs(std::sqrt(kernels::dot(x, x)) - 1.0) > 1e-12) x = normalized(x);

  const std::size_t m = index.size();
  RetrievalResult result;
  result.query_id = query_id;

  const ScoredList probe = top_k(index, x, gate_params.probe_k, {}, options.scan);
  result.counters.sim_evals = m;
  result.gate = gate(probe, gate_params);

  switch (options.force) {
    case ForcePath::kGated: result.path = result.gate.strategy; break;
    case ForcePath::kFamiliarity: result.path = Strategy::kFamiliarity; break;
    case ForcePath::kRecollection: result.path = Strategy::kRecollection; break;
  }

  if (result.path == Strategy::kFamiliarity) {
    const std::size_t k = recollect_params.final_k;
    if (probe.size() >= std::min(k, m)) {
      result.ranked.assign(probe.begin(), probe.begin() + static_cast<std::ptrdiff_t>(std::min(k, probe.size())));
      result.counters.probe_reused = true;
    } else {
      result.ranked = top_k(index, x, k, {}, options.scan);
      result.counters.sim_evals += m;
    }
  } else {
    RecollectOptions ropts;
    ropts.round0_candidates = &probe;
    ropts.record_trace = options.record_trace;
    ropts.scan = options.scan;
    auto rec = recollect(index, x, recollect_params, ropts);
    result.ranked = std::move(rec.ranked);
    result.trace = std::move(rec.trace);
    auto& c = result.counters;
    c.sim_evals += rec.counters.sim_evals;
    c.member_evals = rec.counters.member_evals;
    c.cluster_calls = rec.counters.cluster_calls;
    c.rounds = rec.counters.rounds;
    c.beams_per_round = std::move(rec.counters.beams_per_round);
    c.candidates_per_round = std::move(rec.counters.candidates_per_round);
    c.probe_reused = rec.counters.reused_round0;
  }

  result.wall_time_us = std::chrono::duration_cast<std::chrono::microseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return result;
}

std::vector<BatchEntry> retrieve_batch(const CorpusIndex& index, std::span<const QueryInput> queries,
                                       const GateParams& gate_params,
                                       const RecollectParams& recollect_params,
                                       const RetrieveOptions& options, int threads) {
  std::vector<BatchEntry> out(queries.size());
  RetrieveOptions per_query = options;
  per_query.scan = ScanPolicy::kSerial;  // parallelism is across queries
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const auto n = static_cast<std::int64_t>(queries.size());

#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& q = queries[static_cast<std::size_t>(i)];
    auto& entry = out[static_cast<std::size_t>(i)];
    entry.query_id = q.query_id;
    try {
      entry.result = retrieve(index, q.query_id, q.embedding, gate_params, recollect_params, per_query);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
  }
  return out;
}

}  // namespace rfmem
