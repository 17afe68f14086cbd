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
#include <span>
#include <vector>

namespace rfmem {

struct Clustering {
  std::vector<std::size_t> assignments;         // label per input point
  std::vector<std::vector<double>> centroids;   // unit-normalized member means
  std::vector<std::vector<std::size_t>> members;
  std::vector<double> sse_history;              // within-cluster SSE after each Lloyd update
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxLloydIterations = 50;

/// Lloyd's algorithm with kmeans++ seeding. k is clamped to the number of
/// points; no returned cluster is empty. Deterministic in (points, k, seed).
Clustering cluster(std::span<const std::span<const double>> points, std::size_t k,
                   std::uint64_t seed);

/// Sum of squared Euclidean distances from each point to its cluster's raw mean.
double within_cluster_sse(std::span<const std::span<const double>> points,
                          std::span<const std::size_t> assignments, std::size_t k);

/// Derives a decorrelated seed from a base seed and two coordinates.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace rfmem
