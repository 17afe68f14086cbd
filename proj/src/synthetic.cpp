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

#include "rfmem/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "rfmem/scan_kernels.hpp"

namespace rfmem {

namespace {

using Vec = std::vector<double>;

// Chain geometry, in units of the cluster spread.
constexpr double kQueryOffsetMin = 0.8;
constexpr double kQueryOffsetMax = 1.2;
constexpr double kInGoldAngle = 0.8;
constexpr double kOutGoldAngle = 0.85;
constexpr double kOutGoldStep = 0.08;
constexpr double kOutGoldJitter = 0.05;
constexpr double kLean = 0.6;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec gaussian(std::size_t d) {
    Vec v(d);
    for (double& x : v) x = normal_(rng_);
    return v;
  }

  Vec unit(std::size_t d) {
    for (;;) {
      Vec v = gaussian(d);
      if (kernels::dot(v, v) > 1e-6) return normalized(v);
    }
  }

  /// Unit vector orthogonal to the unit vector `v`.
  Vec orthogonal_unit(const Vec& v) {
    for (;;) {
      Vec u = gaussian(v.size());
      const double proj = kernels::dot(u, v);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] -= proj * v[i];
      if (kernels::dot(u, u) > 1e-6) return normalized(u);
    }
  }

  /// Direction plus isotropic Gaussian noise scaled to the requested angle, renormalized.
  Vec around(const Vec& center, double spread) {
    const double sigma = std::tan(spread) / std::sqrt(static_cast<double>(center.size()));
    for (;;) {
      Vec g = gaussian(center.size());
      for (std::size_t i = 0; i < g.size(); ++i) g[i] = center[i] + sigma * g[i];
      if (kernels::dot(g, g) > 1e-12) return normalized(g);
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Vec rotate_toward(const Vec& from, const Vec& dir, double angle) {
  Vec out(from.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::cos(angle) * from[i] + std::sin(angle) * dir[i];
  }
  return normalized(out);
}

Vec orthogonal_part(const Vec& v, const Vec& axis) {
  Vec out = v;
  const double proj = kernels::dot(v, axis);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= proj * axis[i];
  return normalized(out);
}

struct Slot {
  Vec embedding;
  std::size_t cluster;
  std::string role;
  std::size_t owner;  // query index for gold slots
};

std::string format_id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, n);
  return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (dimension < 2) throw std::invalid_argument("dimension must be at least 2");
  if (clusters < 2) throw std::invalid_argument("need at least 2 clusters");
  if (corpus_size < clusters) throw std::invalid_argument("corpus size must be at least the cluster count");
  if (!(spread > 0.0 && spread < 1.5)) throw std::invalid_argument("spread must lie in (0, 1.5) radians");
  if (!(dispersion >= 0.0 && dispersion <= 1.0)) throw std::invalid_argument("dispersion must lie in [0, 1]");
  if (chain_length > corpus_size / clusters) {
    throw std::invalid_argument("chain length exceeds cluster population");
  }
  if (queries * chain_length > corpus_size) {
    throw std::invalid_argument("queries * chain length exceeds corpus size");
  }
}

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  Sampler sampler(spec.seed);
  const std::size_t d = spec.dimension;

  std::vector<Vec> centers;
  for (std::size_t c = 0; c < spec.clusters; ++c) centers.push_back(sampler.unit(d));

  const std::size_t chain = spec.chain_length;
  const auto n_out = static_cast<std::size_t>(
      std::ceil(spec.dispersion * static_cast<double>(chain) - 1e-12));
  const std::size_t n_in = chain - n_out;

  std::vector<Slot> slots;
  slots.reserve(spec.corpus_size);
  std::vector<SyntheticQuery> queries(spec.queries);
  std::vector<std::vector<std::size_t>> in_slots(spec.queries);
  std::vector<std::vector<std::size_t>> out_slots(spec.queries);
  std::vector<std::vector<Vec>> in_dirs(spec.queries);
  std::vector<double> in_scale(spec.queries, 1.0);

  for (std::size_t q = 0; q < spec.queries; ++q) {
    auto& query = queries[q];
    query.home_cluster = q % spec.clusters;
    const Vec& home = centers[query.home_cluster];

    const double offset = spec.spread * sampler.uniform(kQueryOffsetMin, kQueryOffsetMax);
    query.embedding = rotate_toward(home, sampler.orthogonal_unit(home), offset);
    const Vec& x = query.embedding;

    std::size_t target = query.home_cluster == 0 ? 1 : 0;
    for (std::size_t c = 0; c < spec.clusters; ++c) {
      if (c == query.home_cluster) continue;
      if (kernels::dot(centers[c], home) > kernels::dot(centers[target], home)) target = c;
    }
    query.target_cluster = target;
    const Vec toward = orthogonal_part(centers[target], x);

    for (std::size_t j = 0; j < n_in; ++j) {
      // in-cluster evidence leans toward the target cluster
      Vec lean = toward;
      const Vec wobble = orthogonal_part(sampler.orthogonal_unit(x), x);
      for (std::size_t i = 0; i < d; ++i) lean[i] += kLean * wobble[i];
      lean = orthogonal_part(lean, x);
      in_dirs[q].push_back(lean);
      const double angle = spec.spread * kInGoldAngle * (0.5 + 0.5 * static_cast<double>(j + 1) /
                                                                   static_cast<double>(n_in));
      in_slots[q].push_back(slots.size());
      slots.push_back({rotate_toward(x, lean, angle), query.home_cluster, "gold", q});
    }
    for (std::size_t j = 0; j < n_out; ++j) {
      const double angle = spec.spread * (kOutGoldAngle + kOutGoldStep * static_cast<double>(j));
      Vec z = rotate_toward(x, toward, angle);
      z = rotate_toward(z, sampler.orthogonal_unit(z), spec.spread * kOutGoldJitter);
      out_slots[q].push_back(slots.size());
      slots.push_back({std::move(z), target, "gold", q});
    }
  }

  const std::size_t background = spec.corpus_size - slots.size();
  for (std::size_t i = 0; i < background; ++i) {
    const std::size_t c = i % spec.clusters;
    slots.push_back({sampler.around(centers[c], spec.spread), c, "background", 0});
  }

  // In-cluster gold must outrank every other record for its query. Pull violators
  // toward the query until that holds.
  for (int pass = 0; pass < 64; ++pass) {
    bool violated = false;
    for (std::size_t q = 0; q < spec.queries; ++q) {
      if (in_slots[q].empty()) continue;
      const Vec& x = queries[q].embedding;
      std::vector<char> mine(slots.size(), 0);
      for (std::size_t s : in_slots[q]) mine[s] = 1;
      double rival = -2.0;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        if (!mine[s]) rival = std::max(rival, kernels::dot(x, slots[s].embedding));
      }
      double weakest = 2.0;
      for (std::size_t s : in_slots[q]) weakest = std::min(weakest, kernels::dot(x, slots[s].embedding));
      if (weakest > rival) continue;
      violated = true;
      in_scale[q] *= 0.5;
      for (std::size_t j = 0; j < in_slots[q].size(); ++j) {
        const double angle = in_scale[q] * spec.spread * kInGoldAngle *
                             (0.5 + 0.5 * static_cast<double>(j + 1) / static_cast<double>(n_in));
        slots[in_slots[q][j]].embedding = rotate_toward(x, in_dirs[q][j], angle);
      }
    }
    if (!violated) break;
  }

  std::vector<std::size_t> order(slots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), sampler.engine());
  std::vector<std::string> slot_id(slots.size());

  SyntheticData data;
  data.corpus.reserve(slots.size());
  for (std::size_t row = 0; row < order.size(); ++row) {
    Slot& s = slots[order[row]];
    slot_id[order[row]] = format_id("m", row);
    MemoryRecord rec;
    rec.id = slot_id[order[row]];
    rec.embedding = std::move(s.embedding);
    rec.metadata = {{"cluster", std::to_string(s.cluster)}, {"role", s.role}};
    data.corpus.push_back(std::move(rec));
  }

  for (std::size_t q = 0; q < spec.queries; ++q) {
    auto& query = queries[q];
    query.query_id = format_id("q", q);
    for (std::size_t s : in_slots[q]) query.gold.push_back(slot_id[s]);
    for (std::size_t s : out_slots[q]) {
      query.gold.push_back(slot_id[s]);
      query.dispersed_gold.push_back(slot_id[s]);
    }
  }
  data.queries = std::move(queries);
  return data;
}

GoldSet gold_set(const SyntheticData& data) {
  GoldSet gold;
  for (const auto& q : data.queries) gold[q.query_id] = q.gold;
  return gold;
}

void write_synthetic(const SyntheticData& data, const std::filesystem::path& dir) {
  using nlohmann::json;
  std::filesystem::create_directories(dir);

  std::ofstream corpus(dir / "corpus.jsonl");
  for (const auto& rec : data.corpus) {
    json obj{{"id", rec.id}, {"embedding", rec.embedding}, {"metadata", rec.metadata}};
    corpus << obj.dump() << '\n';
  }

  std::ofstream queries(dir / "queries.jsonl");
  for (const auto& q : data.queries) {
    json obj{{"query_id", q.query_id},
             {"embedding", q.embedding},
             {"gold", q.gold},
             {"dispersed_gold", q.dispersed_gold},
             {"metadata",
              {{"home_cluster", std::to_string(q.home_cluster)},
               {"target_cluster", std::to_string(q.target_cluster)}}}};
    queries << obj.dump() << '\n';
  }

  std::ofstream gold(dir / "gold.json");
  gold << json(gold_set(data)).dump(2) << '\n';
}

}  // namespace rfmem
