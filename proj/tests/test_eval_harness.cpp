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
#include <set>

#include "doctest.h"
#include "rfmem/evaluation.hpp"
#include "rfmem/synthetic.hpp"
#include "test_util.hpp"

using namespace rfmem;
using rfmem::testing::random_unit;
using rfmem::testing::TempDir;

namespace {

struct Loaded {
  CorpusIndex index;
  std::vector<QueryRecord> queries;
  GoldSet gold;
};

Loaded load(const SyntheticSpec& spec, const TempDir& dir) {
  write_synthetic(generate(spec), dir.path());
  return {ingest(dir.path() / "corpus.jsonl"), read_queries(dir.path() / "queries.jsonl"),
          read_gold(dir.path() / "gold.json")};
}

RunConfig config_with(ForcePath force) {
  RunConfig c;
  c.force = force;
  c.threads = 1;
  c.resolve();
  return c;
}

SyntheticSpec small_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.corpus_size = 400;
  s.dimension = 16;
  s.clusters = 5;
  s.queries = 10;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("recall examples") {
  const ScoredList ranked{{"a", 0.9}, {"c", 0.5}, {"d", 0.1}};
  const std::vector<std::string> ab{"a", "b"};
  CHECK(recall_at_k(ranked, ab, 3) == 0.5);
  const std::vector<std::string> ac{"a", "c"};
  CHECK(recall_at_k(ranked, ac, 3) == 1.0);
  CHECK(recall_at_k(ranked, ac, 1) == 0.5);
  const std::vector<std::string> xy{"x", "y"};
  CHECK(recall_at_k(ranked, xy, 3) == 0.0);
  CHECK(recall_at_k(ranked, {}, 3) == 1.0);
  CHECK(recall_at_k(ranked, ab, 50) == 0.5);
}

TEST_CASE("oracle top-k agrees with the engine") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
    const std::size_t d = std::uniform_int_distribution<std::size_t>(2, 24)(rng);
    const auto index = rfmem::testing::random_index(rng, m, d);
    const auto q = random_unit(rng, d);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, m)(rng);
    REQUIRE(top_k(index, q, k) == oracle_top_k(index.records(), q, k));
  }
  std::mt19937_64 r2(11);
  const auto index = rfmem::testing::random_index(r2, 30, 5);
  const auto self = oracle_top_k(index.records(), index.row(7), 1);
  CHECK(self[0].id == index.record(7).id);
  CHECK(oracle_top_k(index.records(), index.row(0), 30).size() == 30);
}

TEST_CASE("quantile") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({5.0}, 0.9) == 5.0);
  CHECK(quantile({1.0, 9.0}, 0.0) == 1.0);
  CHECK(quantile({1.0, 9.0}, 1.0) == 9.0);
  CHECK_THROWS(quantile({}, 0.5));
}

TEST_CASE("generator determinism and structure") {
  TempDir a, b;
  const auto spec = small_spec(9);
  write_synthetic(generate(spec), a.path());
  write_synthetic(generate(spec), b.path());
  for (const char* f : {"corpus.jsonl", "queries.jsonl", "gold.json"}) {
    CHECK(rfmem::testing::read_file(a.path() / f) == rfmem::testing::read_file(b.path() / f));
  }
  TempDir c;
  auto other = spec;
  other.seed = 10;
  write_synthetic(generate(other), c.path());
  CHECK(rfmem::testing::read_file(a.path() / "corpus.jsonl") !=
        rfmem::testing::read_file(c.path() / "corpus.jsonl"));

  const auto data = generate(spec);
  CHECK(data.corpus.size() == spec.corpus_size);
  CHECK(data.queries.size() == spec.queries);
  std::set<std::string> ids;
  for (const auto& r : data.corpus) ids.insert(r.id);
  std::set<std::string> all_gold;
  for (const auto& q : data.queries) {
    CHECK(q.gold.size() == spec.chain_length);
    CHECK(q.dispersed_gold.size() == 3);  // ceil(0.5 * 6)
    for (const auto& g : q.gold) {
      CHECK(ids.count(g) == 1);
      CHECK(all_gold.insert(g).second);
    }
    CHECK(q.home_cluster != q.target_cluster);
  }
}

TEST_CASE("dispersion zero gives perfect familiarity recall") {
  for (std::uint64_t seed : {1, 2, 3}) {
    TempDir dir;
    auto spec = small_spec(seed);
    spec.dispersion = 0.0;
    const auto l = load(spec, dir);
    const auto report = evaluate(l.index, l.queries, l.gold, config_with(ForcePath::kFamiliarity));
    for (const auto& row : report.per_query_recall) {
      for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
        if (report.cutoffs[c] >= spec.chain_length) CHECK(row[c] == 1.0);
      }
    }
  }
}

TEST_CASE("chain length zero gives vacuous recall") {
  TempDir dir;
  auto spec = small_spec(4);
  spec.chain_length = 0;
  const auto l = load(spec, dir);
  for (const auto& [id, g] : l.gold) CHECK(g.empty());
  const auto report = evaluate(l.index, l.queries, l.gold, config_with(ForcePath::kGated));
  for (double r : report.mean_recall.at("overall")) CHECK(r == 1.0);
}

TEST_CASE("infeasible specs are rejected") {
  auto spec = small_spec(0);
  spec.chain_length = 200;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = small_spec(0);
  spec.dispersion = 1.5;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = small_spec(0);
  spec.clusters = 1;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
  spec = small_spec(0);
  spec.spread = 0.0;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("gated results replay the chosen pure path") {
  TempDir dir;
  const auto l = load(small_spec(5), dir);
  const auto gated = evaluate(l.index, l.queries, l.gold, config_with(ForcePath::kGated));
  const auto fam = evaluate(l.index, l.queries, l.gold, config_with(ForcePath::kFamiliarity));
  const auto rec = evaluate(l.index, l.queries, l.gold, config_with(ForcePath::kRecollection));
  CHECK(gated.familiarity + gated.recollection == l.queries.size());
  for (std::size_t i = 0; i < l.queries.size(); ++i) {
    const auto& g = *gated.entries[i].result;
    const auto& pure = g.path == Strategy::kFamiliarity ? *fam.entries[i].result : *rec.entries[i].result;
    CHECK(g.ranked == pure.ranked);
  }
}

TEST_CASE("latency report") {
  TempDir dir;
  const auto l = load(small_spec(6), dir);
  for (auto force : {ForcePath::kGated, ForcePath::kFamiliarity, ForcePath::kRecollection}) {
    const auto cfg = config_with(force);
    const auto report = evaluate(l.index, l.queries, l.gold, cfg);
    std::vector<RetrievalResult> results;
    for (const auto& e : report.entries) results.push_back(*e.result);
    const auto lat = latency_report(results, l.index.size(), cfg.gate, cfg.recollect);
    CHECK(lat.total == results.size());
    const std::size_t fam = lat.familiarity ? lat.familiarity->count : 0;
    const std::size_t rec = lat.recollection ? lat.recollection->count : 0;
    CHECK(fam + rec == lat.total);
    CHECK(lat.counter_mismatches == 0);
    if (force == ForcePath::kFamiliarity) {
      CHECK_FALSE(lat.recollection);
      CHECK(lat.familiarity->mean_sim_evals == doctest::Approx(double(l.index.size())));
    }
    if (force == ForcePath::kRecollection) CHECK_FALSE(lat.familiarity);
  }
}

TEST_CASE("counter check detects tampering") {
  std::mt19937_64 rng(7);
  const auto index = rfmem::testing::random_index(rng, 120, 6);
  RetrieveOptions opt;
  opt.force = ForcePath::kRecollection;
  GateParams gp;
  RecollectParams rp;
  auto r = retrieve(index, "q", random_unit(rng, 6), gp, rp, opt);
  CHECK(check_counters(r, index.size(), gp, rp).empty());
  const auto expected = expected_counters(r.path, index.size(), r.counters.rounds, gp, rp);
  CHECK(expected.beams_per_round == r.counters.beams_per_round);
  CHECK(expected.candidates_per_round == r.counters.candidates_per_round);
  r.counters.sim_evals += 1;
  CHECK_FALSE(check_counters(r, index.size(), gp, rp).empty());
}

TEST_CASE("sweep grid") {
  TempDir dir;
  const auto l = load(small_spec(8), dir);
  const auto base = config_with(ForcePath::kGated);

  SUBCASE("row count is the product of axis sizes") {
    const SweepGrid grid{{"alpha", {"0", "0.5", "1"}}, {"beam", {"1", "3"}}};
    const auto rows = sweep(l.index, l.queries, l.gold, base, grid);
    CHECK(rows.size() == 6);
    CHECK(rows[1].values == std::vector<std::string>{"0", "3"});
    const auto csv = sweep_csv(grid, rows, false);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  }
  SUBCASE("single cell equals a plain evaluation") {
    const SweepGrid grid{{"tau", {"0.2"}}};
    const auto rows = sweep(l.index, l.queries, l.gold, base, grid);
    REQUIRE(rows.size() == 1);
    const auto plain = evaluate(l.index, l.queries, l.gold, base);
    CHECK(rows[0].report.mean_recall == plain.mean_recall);
    CHECK(rows[0].report.familiarity == plain.familiarity);
  }
  SUBCASE("alpha one with a single beam matches familiarity") {
    auto cfg = config_with(ForcePath::kRecollection);
    cfg.recollect.fanout_f = 10;
    const SweepGrid grid{{"alpha", {"0", "0.25", "0.5", "0.75", "1"}}, {"beam", {"1"}}};
    const auto rows = sweep(l.index, l.queries, l.gold, cfg, grid);
    const auto fam = evaluate(l.index, l.queries, l.gold, config_with(ForcePath::kFamiliarity));
    REQUIRE(rows.size() == 5);
    for (std::size_t c = 0; c < fam.cutoffs.size(); ++c) {
      CHECK(rows[4].report.mean_recall.at("overall")[c] ==
            doctest::Approx(fam.mean_recall.at("overall")[c]));
    }
  }
  SUBCASE("grid file") {
    const auto path = dir.write("grid.txt", "# axes\nalpha = 0, 0.5\nbeam=1,2,3\n");
    const auto grid = read_sweep_grid(path);
    REQUIRE(grid.size() == 2);
    CHECK(grid[0].first == "alpha");
    CHECK(grid[1].second.size() == 3);
  }
}

TEST_CASE("category breakdown") {
  TempDir dir;
  const auto q = dir.write(
      "q.jsonl",
      "{\"query_id\":\"a\",\"embedding\":[1,0],\"gold\":[\"m1\"],\"category\":\"x\"}\n"
      "{\"query_id\":\"b\",\"embedding\":[0,1],\"gold\":[\"m2\"],\"metadata\":{\"category\":\"y\"}}\n");
  const auto c = dir.write("c.jsonl",
                           "{\"id\":\"m1\",\"embedding\":[1,0.1]}\n{\"id\":\"m2\",\"embedding\":[0.1,1]}\n");
  const auto queries = read_queries(q);
  const auto gold = resolve_gold(queries, std::nullopt);
  const auto report = evaluate(ingest(c), queries, gold, config_with(ForcePath::kGated));
  CHECK(report.mean_recall.count("category:x") == 1);
  CHECK(report.mean_recall.count("category:y") == 1);
  CHECK(report.category_sizes.at("category:x") == 1);

  std::vector<QueryRecord> no_gold = queries;
  no_gold[1].gold.reset();
  CHECK_THROWS_AS(resolve_gold(no_gold, std::nullopt), MissingGold);
}
