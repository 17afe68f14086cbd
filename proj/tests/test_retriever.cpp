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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rfmem/retriever.hpp"
#include "test_util.hpp"

using namespace rfmem;
using rfmem::testing::random_index;
using rfmem::testing::random_unit;

namespace {

std::vector<double> basis(std::size_t d, std::size_t i) {
  std::vector<double> v(d, 0.0);
  v[i] = 1.0;
  return v;
}

/// Record at cosine `c` to e0, tilted along axis `axis`.
MemoryRecord tilted(const std::string& id, std::size_t d, std::size_t axis, double c) {
  auto v = basis(d, 0);
  v[0] = c;
  v[axis] = std::sqrt(1.0 - c * c);
  return {id, std::nullopt, v, {}};
}

void same_result(const RetrievalResult& a, const RetrievalResult& b) {
  CHECK(a.query_id == b.query_id);
  CHECK(a.path == b.path);
  CHECK(a.ranked == b.ranked);
  CHECK(a.gate.mean == b.gate.mean);
  CHECK(a.gate.entropy == b.gate.entropy);
  CHECK(a.counters.sim_evals == b.counters.sim_evals);
  CHECK(a.counters.beams_per_round == b.counters.beams_per_round);
}

}  // namespace

TEST_CASE("duplicated query routes to familiarity") {
  std::mt19937_64 rng(1);
  auto recs = rfmem::testing::random_records(rng, 200, 16);
  const auto q = random_unit(rng, 16);
  for (int i = 0; i < 10; ++i) recs[i * 7].embedding = q;
  const auto index = CorpusIndex::build(recs);
  const auto r = retrieve(index, "q", q, GateParams{}, RecollectParams{});
  CHECK(r.path == Strategy::kFamiliarity);
  CHECK(r.gate.strategy == Strategy::kFamiliarity);
  CHECK(r.ranked.front().score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*r.gate.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(r.trace);
  CHECK(r.counters.rounds == 0);
}

TEST_CASE("orthogonal corpus routes to recollection") {
  const std::size_t d = 64;
  std::vector<MemoryRecord> recs;
  for (std::size_t i = 1; i < d; ++i) recs.push_back(tilted("m" + std::to_string(i), d, i, 0.01));
  const auto index = CorpusIndex::build(recs);
  RetrieveOptions opt;
  opt.record_trace = true;
  const auto r = retrieve(index, "q", basis(d, 0), GateParams{}, RecollectParams{}, opt);
  CHECK(r.path == Strategy::kRecollection);
  CHECK(r.trace);
  CHECK(r.counters.rounds >= 1);
}

TEST_CASE("near-uniform mid-band probe routes to recollection") {
  const std::size_t d = 40;
  std::vector<MemoryRecord> recs;
  for (std::size_t i = 0; i < 10; ++i) {
    recs.push_back(tilted("mid" + std::to_string(i), d, i + 1, 0.45 + 0.0004 * (double(i) - 4.5)));
  }
  for (std::size_t i = 0; i < 20; ++i) recs.push_back(tilted("low" + std::to_string(i), d, i + 11, 0.1));
  const auto index = CorpusIndex::build(recs);
  const auto r = retrieve(index, "q", basis(d, 0), GateParams{}, RecollectParams{});
  REQUIRE(r.gate.mean);
  CHECK(*r.gate.mean == doctest::Approx(0.45).epsilon(1e-9));
  // oracle: softmax of scores spread by 4e-4 at lambda 20 is within 1e-3 of uniform
  CHECK(*r.gate.entropy == doctest::Approx(std::log(10.0)).epsilon(1e-4));
  CHECK(r.path == Strategy::kRecollection);
}

TEST_CASE("familiarity counter formula") {
  std::mt19937_64 rng(2);
  auto recs = rfmem::testing::random_records(rng, 300, 8);
  const auto q = random_unit(rng, 8);
  for (int i = 0; i < 20; ++i) recs[i].embedding = q;
  const auto index = CorpusIndex::build(recs);
  GateParams gp;
  RecollectParams rp;

  gp.probe_k = 10;
  auto r = retrieve(index, "q", q, gp, rp);
  REQUIRE(r.path == Strategy::kFamiliarity);
  CHECK(r.counters.sim_evals == 300);
  CHECK(r.counters.probe_reused);
  CHECK(r.ranked == top_k(index, q, 10));

  gp.probe_k = 3;
  r = retrieve(index, "q", q, gp, rp);
  REQUIRE(r.path == Strategy::kFamiliarity);
  CHECK(r.counters.sim_evals == 600);
  CHECK_FALSE(r.counters.probe_reused);
  CHECK(r.ranked == top_k(index, q, 10));

  gp.probe_k = 25;
  r = retrieve(index, "q", q, gp, rp);
  CHECK(r.counters.sim_evals == 300);
  CHECK(r.ranked == top_k(index, q, 10));
}

TEST_CASE("forced paths") {
  std::mt19937_64 rng(3);
  const auto index = random_index(rng, 150, 12);
  const auto q = random_unit(rng, 12);
  RetrieveOptions opt;
  opt.force = ForcePath::kFamiliarity;
  auto r = retrieve(index, "q", q, GateParams{}, RecollectParams{}, opt);
  CHECK(r.path == Strategy::kFamiliarity);
  CHECK(r.ranked == top_k(index, q, 10));
  opt.force = ForcePath::kRecollection;
  r = retrieve(index, "q", q, GateParams{}, RecollectParams{}, opt);
  CHECK(r.path == Strategy::kRecollection);
  CHECK(r.ranked == recollect(index, q, RecollectParams{}).ranked);

  CHECK(parse_force_path(to_string(ForcePath::kGated)) == ForcePath::kGated);
  CHECK(parse_force_path("recollection") == ForcePath::kRecollection);
  CHECK_THROWS_AS(parse_force_path("maybe"), std::invalid_argument);
}

TEST_CASE("path consistency and monotone threshold shift") {
  std::mt19937_64 rng(4);
  auto recs = rfmem::testing::random_records(rng, 400, 6);
  const auto index = CorpusIndex::build(recs);
  const std::vector<double> lows{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  for (int t = 0; t < 60; ++t) {
    const auto q = random_unit(rng, 6);
    bool recollected = false;
    for (double low : lows) {
      GateParams gp;
      gp.theta_low = low;
      gp.tau = 0.6;
      const auto r = retrieve(index, "q", q, gp, RecollectParams{});
      CHECK(r.path == r.gate.strategy);
      CHECK(r.ranked.size() == 10);
      CHECK(std::is_sorted(r.ranked.begin(), r.ranked.end(), ranks_before));
      if (recollected) CHECK(r.path == Strategy::kRecollection);
      recollected = r.path == Strategy::kRecollection;
    }
  }
}

TEST_CASE("batch matches sequential retrieval") {
  std::mt19937_64 rng(5);
  const auto index = random_index(rng, 500, 10);
  std::vector<QueryInput> queries;
  for (int i = 0; i < 40; ++i) queries.push_back({"q" + std::to_string(i), random_unit(rng, 10)});
  GateParams gp;
  gp.theta_high = 0.75;
  RecollectParams rp;
  for (int threads : {1, 2, 4}) {
    const auto batch = retrieve_batch(index, queries, gp, rp, {}, threads);
    REQUIRE(batch.size() == queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      REQUIRE(batch[i].result);
      same_result(*batch[i].result,
                  retrieve(index, queries[i].query_id, queries[i].embedding, gp, rp));
    }
  }
  const auto single = retrieve_batch(index, std::span(queries).first(1), gp, rp);
  same_result(*single[0].result, retrieve(index, "q0", queries[0].embedding, gp, rp));
}

TEST_CASE("batch reports per-query errors") {
  std::mt19937_64 rng(6);
  const auto index = random_index(rng, 50, 4);
  std::vector<QueryInput> queries{{"ok", random_unit(rng, 4)},
                                  {"bad", random_unit(rng, 5)},
                                  {"zero", std::vector<double>(4, 0.0)},
                                  {"ok2", random_unit(rng, 4)}};
  const auto batch = retrieve_batch(index, queries, GateParams{}, RecollectParams{});
  REQUIRE(batch.size() == 4);
  CHECK(batch[0].result);
  CHECK_FALSE(batch[1].result);
  CHECK(batch[1].error.find("dimension") != std::string::npos);
  CHECK_FALSE(batch[2].result);
  CHECK_FALSE(batch[2].error.empty());
  CHECK(batch[3].result);
  CHECK(batch[3].query_id == "ok2");
}
