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

// Serial vs OpenMP scans: raw row scoring, exact top-k, and query batches.

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "rfmem/corpus_store.hpp"
#include "rfmem/retriever.hpp"
#include "rfmem/scan_kernels.hpp"

namespace {

std::vector<double> unit(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(d);
  double sq = 0.0;
  for (double& x : v) {
    x = g(rng);
    sq += x * x;
  }
  for (double& x : v) x /= std::sqrt(sq);
  return v;
}

const rfmem::CorpusIndex& corpus(std::size_t m, std::size_t d) {
  static std::map<std::pair<std::size_t, std::size_t>, rfmem::CorpusIndex> cache;
  auto it = cache.find({m, d});
  if (it == cache.end()) {
    std::mt19937_64 rng(m * 131 + d);
    std::vector<rfmem::MemoryRecord> recs(m);
    for (std::size_t i = 0; i < m; ++i) {
      recs[i].id = "m" + std::to_string(i);
      recs[i].embedding = unit(rng, d);
    }
    it = cache.emplace(std::make_pair(m, d), rfmem::CorpusIndex::build(std::move(recs))).first;
  }
  return it->second;
}

template <bool Parallel>
void BM_ScoreRows(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const std::size_t d = 64;
  const auto& index = corpus(m, d);
  std::mt19937_64 rng(1);
  const auto q = unit(rng, d);
  std::vector<double> out(m);
  for (auto _ : state) {
    if constexpr (Parallel) {
      rfmem::kernels::score_rows_parallel(index.matrix(), d, q, out);
    } else {
      rfmem::kernels::score_rows_serial(index.matrix(), d, q, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

template <rfmem::ScanPolicy Policy>
void BM_TopK(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto& index = corpus(m, 64);
  std::mt19937_64 rng(2);
  const auto q = unit(rng, 64);
  for (auto _ : state) benchmark::DoNotOptimize(rfmem::top_k(index, q, 10, {}, Policy));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

void BM_Batch(benchmark::State& state) {
  const auto threads = static_cast<int>(state.range(0));
  const auto& index = corpus(20000, 64);
  std::mt19937_64 rng(3);
  std::vector<rfmem::QueryInput> queries;
  for (int i = 0; i < 64; ++i) queries.push_back({"q" + std::to_string(i), unit(rng, 64)});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rfmem::retrieve_batch(index, queries, {}, {}, {}, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}

}  // namespace

BENCHMARK(BM_ScoreRows<false>)->Name("score_rows/serial")->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_ScoreRows<true>)->Name("score_rows/parallel")->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_TopK<rfmem::ScanPolicy::kSerial>)->Name("top_k/serial")->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_TopK<rfmem::ScanPolicy::kParallel>)->Name("top_k/parallel")->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_Batch)->Name("retrieve_batch/threads")->Arg(1)->Arg(2)->Arg(4)->UseRealTime();

BENCHMARK_MAIN();
