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

#include "rfmem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace rfmem {

double recall_at_k(const ScoredList& ranked, std::span<const std::string> gold, std::size_t k) {
  if (k == 0) throw std::invalid_argument("recall_at_k: k must be at least 1");
  const std::set<std::string> wanted(gold.begin(), gold.end());
  if (wanted.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) hits += wanted.count(ranked[i].id);
  return static_cast<double>(hits) / static_cast<double>(wanted.size());
}

ScoredList oracle_top_k(std::span<const MemoryRecord> corpus, std::span<const double> query,
                        std::size_t k) {
  ScoredList all;
  all.reserve(corpus.size());
  for (const auto& rec : corpus) {
    all.push_back({rec.id, std::inner_product(query.begin(), query.end(), rec.embedding.begin(), 0.0)});
  }
  std::sort(all.begin(), all.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
    return a.score > b.score || (a.score == b.score && a.id < b.id);
  });
  if (all.size() > k) all.resize(k);
  return all;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ExpectedCounters expected_counters(Strategy path, std::size_t corpus_size, std::size_t rounds,
                                   const GateParams& gate, const RecollectParams& params) {
  const std::size_t m = corpus_size;
  const std::size_t probe = std::min(gate.probe_k, m);
  ExpectedCounters e;
  e.sim_evals = m;
  if (path == Strategy::kFamiliarity) {
    if (probe < std::min(params.final_k, m)) e.sim_evals += m;
    return e;
  }

  std::size_t active = 1;
  for (std::size_t r = 0; r < rounds; ++r) {
    const std::size_t fetched = std::min((params.beam_b + r) * params.fanout_f, m);
    e.beams_per_round.push_back(active);
    e.candidates_per_round.push_back(active * fetched);
    e.cluster_calls += active;
    e.member_evals += active * fetched;
    e.sim_evals += active * m;
    // each beam yields min(B, fetched) clusters, of which B are kept
    active = std::min(params.beam_b, active * std::min(params.beam_b, fetched));
  }
  if (rounds > 0 && probe >= std::min(params.beam_b * params.fanout_f, m)) e.sim_evals -= m;
  return e;
}

std::string check_counters(const RetrievalResult& result, std::size_t corpus_size,
                           const GateParams& gate, const RecollectParams& params) {
  const auto& c = result.counters;
  const auto e = expected_counters(result.path, corpus_size, c.rounds, gate, params);
  auto fail = [&](const std::string& what, std::size_t got, std::size_t want) {
    return result.query_id + ": " + what + " " + std::to_string(got) + " != " + std::to_string(want);
  };
  if (c.sim_evals != e.sim_evals) return fail("sim_evals", c.sim_evals, e.sim_evals);
  if (c.member_evals != e.member_evals) return fail("member_evals", c.member_evals, e.member_evals);
  if (c.cluster_calls != e.cluster_calls) return fail("cluster_calls", c.cluster_calls, e.cluster_calls);
  if (c.beams_per_round != e.beams_per_round) return result.query_id + ": beams_per_round differ";
  if (c.candidates_per_round != e.candidates_per_round) {
    return result.query_id + ": candidates_per_round differ";
  }
  if (result.path == Strategy::kFamiliarity && c.rounds != 0) {
    return result.query_id + ": familiarity path executed rounds";
  }
  if (result.path == Strategy::kRecollection && (c.rounds == 0 || c.rounds > params.max_rounds_r)) {
    return fail("rounds", c.rounds, params.max_rounds_r);
  }
  return {};
}

namespace {

PathLatency summarize(const std::vector<const RetrievalResult*>& rows) {
  PathLatency p;
  p.count = rows.size();
  std::vector<double> times;
  double evals = 0.0;
  for (const auto* r : rows) {
    times.push_back(static_cast<double>(r->wall_time_us));
    evals += static_cast<double>(r->counters.sim_evals);
  }
  p.mean_us = std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
  p.median_us = quantile(times, 0.5);
  // nearest-rank p95
  std::sort(times.begin(), times.end());
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(times.size())));
  p.p95_us = times[std::max<std::size_t>(rank, 1) - 1];
  p.mean_sim_evals = evals / static_cast<double>(rows.size());
  return p;
}

}  // namespace

LatencySummary latency_report(std::span<const RetrievalResult> results, std::size_t corpus_size,
                              const GateParams& gate, const RecollectParams& params) {
  if (results.empty()) throw std::invalid_argument("latency_report: no results");
  LatencySummary s;
  s.total = results.size();
  std::vector<const RetrievalResult*> fam;
  std::vector<const RetrievalResult*> rec;
  for (const auto& r : results) {
    (r.path == Strategy::kFamiliarity ? fam : rec).push_back(&r);
    if (auto msg = check_counters(r, corpus_size, gate, params); !msg.empty()) {
      ++s.counter_mismatches;
      s.mismatch_details.push_back(std::move(msg));
    }
  }
  if (!fam.empty()) s.familiarity = summarize(fam);
  if (!rec.empty()) s.recollection = summarize(rec);
  return s;
}

}  // namespace rfmem
