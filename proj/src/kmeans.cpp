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

#include "rfmem/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rfmem {

namespace {

using Point = std::span<const double>;

double squared_distance(Point a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::vector<double>> seed_centers(std::span<const Point> points, std::size_t k,
                                              std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<char> chosen(n, 0);
  std::vector<std::vector<double>> centers;
  centers.reserve(k);

  std::uniform_int_distribution<std::size_t> first(0, n - 1);
  std::size_t pick = first(rng);
  chosen[pick] = 1;
  centers.emplace_back(points[pick].begin(), points[pick].end());

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers.back());

  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];

    pick = n;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      const double target = u(rng);
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] <= 0.0) continue;
        cum += d2[i];
        pick = i;
        if (cum > target) break;
      }
    }
    if (pick == n) {
      // every remaining point coincides with a center
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
    }
    chosen[pick] = 1;
    centers.emplace_back(points[pick].begin(), points[pick].end());
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(seed ^ splitmix64(a * 0x100000001b3ULL ^ splitmix64(b)));
}

double within_cluster_sse(std::span<const Point> points, std::span<const std::size_t> assignments,
                          std::size_t k) {
  const std::size_t dim = points.empty() ? 0 : points.front().size();
  std::vector<std::vector<double>> means(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& m = means[assignments[i]];
    for (std::size_t j = 0; j < dim; ++j) m[j] += points[i][j];
    ++counts[assignments[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (double& x : means[c]) x /= static_cast<double>(counts[c]);
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sse += squared_distance(points[i], means[assignments[i]]);
  }
  return sse;
}

Clustering cluster(std::span<const Point> points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("cluster: no points");
  if (k == 0) throw std::invalid_argument("cluster: k must be at least 1");
  k = std::min(k, n);
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("cluster: points differ in dimension");
  }

  std::mt19937_64 rng(seed);
  auto centers = seed_centers(points, k, rng);

  Clustering out;
  out.assignments.assign(n, k);  // k marks "unassigned" before the first pass
  std::vector<std::size_t> sizes(k);

  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(points[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(points[i], centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      changed |= out.assignments[i] != best;
      out.assignments[i] = best;
      ++sizes[best];
    }

    // Empty-cluster repair: hand the empty cluster the point farthest from its
    // own center, taken from a cluster that can spare it.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t donor = n;
      double far = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[out.assignments[i]] < 2) continue;
        const double d = squared_distance(points[i], centers[out.assignments[i]]);
        if (d > far) {
          far = d;
          donor = i;
        }
      }
      --sizes[out.assignments[donor]];
      out.assignments[donor] = c;
      sizes[c] = 1;
      centers[c].assign(points[donor].begin(), points[donor].end());
      changed = true;
    }

    if (!changed) break;

    for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& c = centers[out.assignments[i]];
      for (std::size_t j = 0; j < dim; ++j) c[j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& x : centers[c]) x /= static_cast<double>(sizes[c]);
    }
    ++out.iterations;

    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += squared_distance(points[i], centers[out.assignments[i]]);
    out.sse_history.push_back(sse);
  }

  out.members.assign(k, {});
  for (std::size_t i = 0; i < n; ++i) out.members[out.assignments[i]].push_back(i);

  out.centroids.reserve(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i : out.members[c]) {
      for (std::size_t j = 0; j < dim; ++j) mean[j] += points[i][j];
    }
    for (double& x : mean) x /= static_cast<double>(out.members[c].size());
    double sq = 0.0;
    for (double x : mean) sq += x * x;
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) {
      // antipodal members cancel; fall back to the first member's direction
      const auto& p = points[out.members[c].front()];
      mean.assign(p.begin(), p.end());
      sq = 0.0;
      for (double x : mean) sq += x * x;
      for (double& x : mean) x /= std::sqrt(sq);
    } else {
      for (double& x : mean) x /= norm;
    }
    out.centroids.push_back(std::move(mean));
  }
  return out;
}

}  // namespace rfmem
