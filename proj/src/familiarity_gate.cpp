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

#include "rfmem/familiarity_gate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rfmem {

std::string_view to_string(Strategy s) {
  return s == Strategy::kFamiliarity ? "familiarity" : "recollection";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "familiarity") return Strategy::kFamiliarity;
  if (name == "recollection") return Strategy::kRecollection;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

void GateParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(theta_low <= theta_high)) throw std::invalid_argument("theta_low must not exceed theta_high");
  if (!(tau >= 0.0)) throw std::invalid_argument("tau must be non-negative");
  if (probe_k == 0) throw std::invalid_argument("probe_k must be at least 1");
}

std::vector<double> tempered_softmax(std::span<const double> scores, double lambda) {
  if (scores.empty()) throw std::invalid_argument("tempered_softmax: empty score list");
  if (!(lambda >= 0.0)) throw std::invalid_argument("tempered_softmax: lambda must be >= 0");

  const std::size_t n = scores.size();
  if (lambda == 0.0) return std::vector<double>(n, 1.0 / static_cast<double>(n));

  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = std::exp(lambda * (scores[i] - top));
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

double entropy(std::span<const double> p) {
  double mass = 0.0;
  double h = 0.0;
  for (double x : p) {
    if (x < 0.0 || !std::isfinite(x)) throw std::invalid_argument("entropy: invalid probability");
    mass += x;
    if (x > 0.0) h -= x * std::log(x);
  }
  if (std::abs(mass - 1.0) > 1e-6) throw std::invalid_argument("entropy: mass does not sum to 1");
  return std::max(h, 0.0);
}

Strategy decide(double mean, double entropy, const GateParams& params) {
  if (mean >= params.theta_high) return Strategy::kFamiliarity;
  if (mean <= params.theta_low) return Strategy::kRecollection;
  return entropy <= params.tau ? Strategy::kFamiliarity : Strategy::kRecollection;
}

GateSignal gate(const ScoredList& probe, const GateParams& params) {
  GateSignal signal;
  if (probe.empty()) {
    // nothing retrieved: uncertainty is maximal
    signal.strategy = Strategy::kRecollection;
    return signal;
  }
  signal.scores.reserve(probe.size());
  for (const auto& e : probe) signal.scores.push_back(e.score);
  signal.mean = std::accumulate(signal.scores.begin(), signal.scores.end(), 0.0) /
                static_cast<double>(signal.scores.size());
  signal.distribution = tempered_softmax(signal.scores, params.lambda);
  signal.entropy = entropy(signal.distribution);
  signal.strategy = decide(*signal.mean, *signal.entropy, params);
  return signal;
}

double exp_certificate(double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("exp_certificate: tau must be >= 0");
  return std::exp(-tau);
}

double max_entropy_envelope(double top_mass, std::size_t k) {
  auto xlogx = [](double v) { return v > 0.0 ? v * std::log(v) : 0.0; };
  const double h2 = -xlogx(top_mass) - xlogx(1.0 - top_mass);
  return h2 + (1.0 - top_mass) * std::log(static_cast<double>(k - 1));
}

double phi_k(double tau, std::size_t k) {
  if (k < 2) throw std::invalid_argument("phi_k: k must be at least 2");
  if (!(tau >= 0.0)) throw std::invalid_argument("phi_k: tau must be >= 0");
  const double floor = 1.0 / static_cast<double>(k);
  if (tau == 0.0) return 1.0;
  if (tau >= std::log(static_cast<double>(k))) return floor;

  // envelope is strictly decreasing on [1/k, 1]
  double lo = floor;
  double hi = 1.0;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = max_entropy_envelope(mid, k);
    if (std::abs(f - tau) <= 1e-10 || hi - lo <= 1e-17) break;
    if (f > tau) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace rfmem
