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
#include <numeric>
#include <random>

#include "doctest.h"
#include "rfmem/familiarity_gate.hpp"

using namespace rfmem;

namespace {

ScoredList probe_of(const std::vector<double>& scores) {
  ScoredList out;
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back({"m" + std::to_string(i), scores[i]});
  return out;
}

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t k, double concentration) {
  std::gamma_distribution<double> g(concentration, 1.0);
  std::vector<double> p(k);
  double total = 0.0;
  for (double& x : p) total += (x = g(rng));
  for (double& x : p) x /= total;
  return p;
}

}  // namespace

TEST_CASE("tempered_softmax matches direct high-precision evaluation") {
  const std::vector<double> s{0.9, 0.5, 0.1};
  const auto p = tempered_softmax(s, 20.0);
  // exp(0), exp(-8), exp(-16), normalized in long double
  const long double e0 = 1.0L, e1 = std::exp(-8.0L), e2 = std::exp(-16.0L);
  const long double z = e0 + e1 + e2;
  CHECK(p[0] == doctest::Approx(static_cast<double>(e0 / z)).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(static_cast<double>(e1 / z)).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(static_cast<double>(e2 / z)).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.9996645374098363).epsilon(1e-14));
  CHECK(p[0] == doctest::Approx(0.9996648).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(3.3535e-4).epsilon(1e-4));
  CHECK(p[2] == doctest::Approx(1.1249e-7).epsilon(1e-4));
}

TEST_CASE("tempered_softmax edge cases") {
  for (double lambda : {0.0, 1.0, 20.0, 500.0}) {
    const auto p = tempered_softmax(std::vector<double>(7, 0.42), lambda);
    for (double x : p) CHECK(x == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  }
  const auto u = tempered_softmax(std::vector<double>{0.1, 0.9}, 0.0);
  CHECK(u[0] == 0.5);
  CHECK_THROWS_AS(tempered_softmax(std::vector<double>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(tempered_softmax(std::vector<double>{0.1}, -1.0), std::invalid_argument);

  const double s = 0.3;
  const double c = 0.25;
  const auto a = tempered_softmax(std::vector<double>{s, s + c}, 20.0);
  const auto b = tempered_softmax(std::vector<double>{s - c, s}, 20.0);
  for (int i = 0; i < 2; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("tempered_softmax is shift invariant and normalized") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> score(-1.0, 1.0);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> len(1, 50);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> s(len(rng));
    for (double& x : s) x = score(rng);
    const double c = shift(rng);
    std::vector<double> shifted = s;
    for (double& x : shifted) x += c;
    const auto p = tempered_softmax(s, 20.0);
    const auto q = tempered_softmax(shifted, 20.0);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < p.size(); ++i) REQUIRE(std::abs(p[i] - q[i]) <= 1e-12);
  }
}

TEST_CASE("top mass grows with lambda") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s(10);
    for (double& x : s) x = score(rng);
    const auto top = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    double prev = 0.0;
    for (double lambda = 0.0; lambda <= 60.0; lambda += 2.5) {
      const double pmax = tempered_softmax(s, lambda)[top];
      REQUIRE(pmax >= prev - 1e-15);
      prev = pmax;
    }
  }
}

TEST_CASE("entropy reference values") {
  CHECK(entropy(std::vector<double>(10, 0.1)) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  CHECK(entropy(std::vector<double>{0.0, 1.0, 0.0}) == 0.0);
  CHECK(entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.693147180559945).epsilon(1e-14));
  CHECK_THROWS_AS(entropy(std::vector<double>{-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.4}), std::invalid_argument);
  CHECK_NOTHROW(entropy(std::vector<double>{0.5, 0.5 + 5e-7}));
}

TEST_CASE("entropy stays within [0, ln K]") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<std::size_t> kd(2, 50);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = kd(rng);
    const auto p = dirichlet(rng, k, t % 3 == 0 ? 0.05 : 1.0);
    const double h = entropy(p);
    REQUIRE(h >= 0.0);
    REQUIRE(h <= std::log(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("decide follows the two-threshold rule") {
  GateParams g;  // theta_high 0.6, theta_low 0.3, tau 0.2
  CHECK(decide(0.7, 99.0, g) == Strategy::kFamiliarity);
  CHECK(decide(0.2, 0.0, g) == Strategy::kRecollection);
  CHECK(decide(0.45, 0.25, g) == Strategy::kRecollection);
  CHECK(decide(0.45, 0.15, g) == Strategy::kFamiliarity);
  // boundaries
  CHECK(decide(0.6, 99.0, g) == Strategy::kFamiliarity);
  CHECK(decide(0.3, 0.0, g) == Strategy::kRecollection);
  CHECK(decide(0.45, 0.2, g) == Strategy::kFamiliarity);
}

TEST_CASE("gate composes the signal") {
  GateParams g;
  SUBCASE("confident probe") {
    const auto s = gate(probe_of(std::vector<double>(10, 0.9)), g);
    CHECK(s.strategy == Strategy::kFamiliarity);
    CHECK(*s.mean == doctest::Approx(0.9));
    CHECK(*s.entropy == doctest::Approx(std::log(10.0)));
    CHECK(s.distribution.size() == 10);
  }
  SUBCASE("unrelated probe") {
    const auto s = gate(probe_of(std::vector<double>(10, 0.0)), g);
    CHECK(s.strategy == Strategy::kRecollection);
  }
  SUBCASE("empty probe") {
    const auto s = gate({}, g);
    CHECK(s.strategy == Strategy::kRecollection);
    CHECK_FALSE(s.mean.has_value());
    CHECK_FALSE(s.entropy.has_value());
  }
  SUBCASE("depends only on mean and entropy") {
    std::vector<double> a{0.5, 0.45, 0.4, 0.35};
    std::vector<double> b{0.35, 0.5, 0.4, 0.45};
    const auto sa = gate(probe_of(a), g);
    const auto sb = gate(probe_of(b), g);
    CHECK(*sa.mean == doctest::Approx(*sb.mean));
    CHECK(*sa.entropy == doctest::Approx(*sb.entropy));
    CHECK(sa.strategy == sb.strategy);
  }
}

TEST_CASE("GateParams validation") {
  GateParams g;
  CHECK_NOTHROW(g.validate());
  g.theta_low = 0.7;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.lambda = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = {};
  g.probe_k = 0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("exp certificate") {
  CHECK(exp_certificate(0.0) == 1.0);
  CHECK(exp_certificate(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exp_certificate(0.2) == doctest::Approx(0.81873075307798185).epsilon(1e-15));
}

TEST_CASE("exp certificate holds on random distributions") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<std::size_t> kd(2, 50);
  std::uniform_real_distribution<double> taud(0.0, 4.0);
  std::size_t covered = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto p = dirichlet(rng, kd(rng), t % 2 ? 0.1 : 1.0);
    const double tau = taud(rng);
    if (entropy(p) > tau) continue;
    ++covered;
    REQUIRE(*std::max_element(p.begin(), p.end()) >= exp_certificate(tau));
  }
  CHECK(covered > 100);
}

TEST_CASE("phi_k root reading") {
  CHECK(phi_k(0.0, 7) == 1.0);
  for (std::size_t k : {2u, 3u, 10u, 50u}) {
    CHECK(phi_k(std::log(static_cast<double>(k)), k) == doctest::Approx(1.0 / static_cast<double>(k)));
    CHECK(phi_k(10.0, k) == doctest::Approx(1.0 / static_cast<double>(k)));
  }

  // Grid scan of the envelope over [1/10, 1): first grid point where it drops to 0.5.
  const std::size_t steps = 2'000'000;
  double crossing = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double x = 0.1 + (1.0 - 1e-12 - 0.1) * static_cast<double>(i) / steps;
    const double f = -x * std::log(x) - (1.0 - x) * std::log(1.0 - x) + (1.0 - x) * std::log(9.0);
    if (f <= 0.5) {
      crossing = x;
      break;
    }
  }
  const double root = phi_k(0.5, 10);
  CHECK(std::abs(root - crossing) < 1e-6);
  CHECK(root == doctest::Approx(0.9100638481789180).epsilon(1e-9));
  CHECK(std::abs(max_entropy_envelope(root, 10) - 0.5) <= 1e-10);
}
