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

#include "rfmem/recollection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rfmem/kmeans.hpp"
#include "rfmem/scan_kernels.hpp"

namespace rfmem {

void RecollectParams::validate() const {
  if (beam_b == 0) throw std::invalid_argument("beam width must be at least 1");
  if (fanout_f == 0) throw std::invalid_argument("fanout must be at least 1");
  if (max_rounds_r == 0) throw std::invalid_argument("round limit must be at least 1");
  if (final_k == 0) throw std::invalid_argument("final k must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
}

std::size_t round_budget(const RecollectParams& params, std::size_t round) {
  if (round >= params.max_rounds_r) throw std::out_of_range("round index beyond round limit");
  return (params.beam_b + round) * params.fanout_f;
}

std::vector<std::string> budget_warnings(const RecollectParams& params) {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < params.max_rounds_r; ++r) {
    const std::size_t n = round_budget(params, r);
    if (n > params.final_k) {
      out.push_back("round " + std::to_string(r) + " budget " + std::to_string(n) +
                    " exceeds final k " + std::to_string(params.final_k));
    }
  }
  return out;
}

MixedQuery alpha_mix(std::span<const double> current, std::span<const double> centroid,
                     std::span<const double> original, double alpha) {
  if (current.size() != original.size()) throw DimensionMismatch(original.size(), current.size());
  if (centroid.size() != original.size()) throw DimensionMismatch(original.size(), centroid.size());

  std::vector<double> blend(original.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < blend.size(); ++i) {
    blend[i] = alpha * current[i] + (1.0 - alpha) * centroid[i] + original[i];
    sq += blend[i] * blend[i];
  }
  const double norm = std::sqrt(sq);
  if (norm < 1e-12) return {std::vector<double>(original.begin(), original.end()), true};
  for (double& x : blend) x /= norm;
  return {std::move(blend), false};
}

double beam_score(std::span<const double> query, std::span<const std::span<const double>> members) {
  double total = 0.0;
  for (const auto& m : members) total += kernels::dot(query, m);
  return total;
}

bool EvidenceBag::insert(const std::string& id, double score) {
  if (!seen_.insert(id).second) return false;
  entries_.push_back({id, score});
  return true;
}

ScoredList EvidenceBag::ranked(std::size_t k) const {
  ScoredList out = entries_;
  std::sort(out.begin(), out.end(), ranks_before);
  if (out.size() > k) out.resize(k);
  return out;
}

namespace {

struct Candidate {
  std::size_t beam;
  std::size_t cluster;
  MixedQuery mixed;
  double score;
  std::vector<std::size_t> rows;
  std::vector<double> member_scores;
};

}  // namespace

RecollectOutcome recollect(const CorpusIndex& index, std::span<const double> query,
                           const RecollectParams& params, const RecollectOptions& options) {
  params.validate();
  if (index.empty()) throw std::invalid_argument("recollect: empty corpus");
  if (query.size() != index.dimension()) throw DimensionMismatch(index.dimension(), query.size());

  std::vector<double> original(query.begin(), query.end());
  {
    const double n = std::sqrt(kernels::dot(original, original));
    if (std::abs(n - 1.0) > 1e-12) original = normalized(original);
  }

  const std::size_t m = index.size();
  RecollectOutcome out;
  if (options.record_trace) out.trace.emplace();
  auto& counters = out.counters;

  std::vector<std::vector<double>> beam{original};
  EvidenceBag bag;

  for (std::size_t r = 0; r < params.max_rounds_r; ++r) {
    const std::size_t budget = round_budget(params, r);
    const std::size_t fetch = std::min(budget, m);
    TraceRound trace_round;
    trace_round.round = r;
    trace_round.budget = budget;

    std::vector<Candidate> next;
    std::size_t retrieved = 0;
    for (std::size_t b = 0; b < beam.size(); ++b) {
      ScoredList found;
      if (r == 0 && options.round0_candidates != nullptr &&
          options.round0_candidates->size() >= fetch) {
        found.assign(options.round0_candidates->begin(),
                     options.round0_candidates->begin() + static_cast<std::ptrdiff_t>(fetch));
        counters.reused_round0 = true;
      } else {
        found = top_k(index, beam[b], fetch, {}, options.scan);
        counters.sim_evals += m;
      }
      retrieved += found.size();

      std::vector<std::size_t> rows;
      std::vector<std::span<const double>> points;
      rows.reserve(found.size());
      points.reserve(found.size());
      for (const auto& e : found) {
        rows.push_back(*index.find_row(e.id));
        points.push_back(index.row(rows.back()));
      }
      if (points.empty()) continue;

      const Clustering groups = cluster(points, std::min(params.beam_b, points.size()),
                                        mix_seed(params.seed, r, b));
      ++counters.cluster_calls;

      for (std::size_t c = 0; c < groups.members.size(); ++c) {
        Candidate cand{b, c, alpha_mix(beam[b], groups.centroids[c], original, params.alpha), 0.0,
                       {}, {}};
        for (std::size_t i : groups.members[c]) {
          const double s = kernels::dot(cand.mixed.vector, points[i]);
          cand.rows.push_back(rows[i]);
          cand.member_scores.push_back(s);
          cand.score += s;
        }
        counters.member_evals += cand.rows.size();
        next.push_back(std::move(cand));
      }

      if (out.trace) {
        BeamExpansion exp{b, found, {}};
        for (const auto& members : groups.members) {
          auto& ids = exp.clusters.emplace_back();
          for (std::size_t i : members) ids.push_back(found[i].id);
        }
        trace_round.beams.push_back(std::move(exp));
      }
    }

    counters.beams_per_round.push_back(beam.size());
    counters.candidates_per_round.push_back(retrieved);
    counters.rounds = r + 1;
    if (next.empty()) {
      if (out.trace) out.trace->rounds.push_back(std::move(trace_round));
      break;
    }

    // global top-B over every (mixed query, cluster) pair; ties keep next order
    std::vector<std::size_t> order(next.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return next[a].score > next[b].score; });
    order.resize(std::min(params.beam_b, order.size()));
    std::sort(order.begin(), order.end());

    std::vector<std::vector<double>> new_beam;
    new_beam.reserve(order.size());
    for (std::size_t idx : order) {
      const auto& cand = next[idx];
      for (std::size_t i = 0; i < cand.rows.size(); ++i) {
        const auto& id = index.record(cand.rows[i]).id;
        if (bag.insert(id, cand.member_scores[i]) && out.trace) trace_round.bagged.push_back(id);
      }
      new_beam.push_back(cand.mixed.vector);
    }

    if (out.trace) {
      trace_round.kept = order;
      for (auto& cand : next) {
        NextEntry e{cand.beam, cand.cluster, cand.mixed.vector, cand.mixed.degenerate, cand.score, {}};
        for (std::size_t row : cand.rows) e.members.push_back(index.record(row).id);
        trace_round.next.push_back(std::move(e));
      }
      out.trace->rounds.push_back(std::move(trace_round));
    }

    beam = std::move(new_beam);
    if (bag.size() >= params.final_k) break;
  }

  out.ranked = bag.ranked(params.final_k);
  return out;
}

}  // namespace rfmem
