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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfmem/corpus_store.hpp"

namespace rfmem {

enum class Strategy { kFamiliarity, kRecollection };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct GateParams {
  double lambda = 20.0;      // softmax sharpness
  double theta_high = 0.6;   // mean score at/above which familiarity is trusted
  double theta_low = 0.3;    // mean score at/below which recollection is forced
  double tau = 0.2;          // entropy threshold for the mid band
  std::size_t probe_k = 10;

  /// Throws std::invalid_argument when the parameters are inconsistent.
  void validate() const;
};

/// Outcome of the probe. `mean` and `entropy` are absent when the probe was empty.
struct GateSignal {
  std::vector<double> scores;
  std::optional<double> mean;
  std::vector<double> distribution;
  std::optional<double> entropy;
  Strategy strategy = Strategy::kRecollection;
};

/// Max-shifted softmax of `scores * lambda`. lambda == 0 yields the uniform distribution.
std::vector<double> tempered_softmax(std::span<const double> scores, double lambda);

/// Shannon entropy in nats with 0 log 0 = 0. Rejects negative entries and
/// distributions whose mass differs from 1 by more than 1e-6.
double entropy(std::span<const double> p);

/// Two-threshold routing rule. Boundaries: mean == theta_high and entropy == tau
/// go to familiarity, mean == theta_low goes to recollection.
Strategy decide(double mean, double entropy, const GateParams& params);

GateSignal gate(const ScoredList& probe, const GateParams& params);

/// Lower bound on p_max for any distribution with entropy <= tau: exp(-tau).
double exp_certificate(double tau);

/// Root x in [1/k, 1] of h2(x) + (1 - x) ln(k - 1) = tau, the maximum-entropy
/// envelope for a given top mass. Returns 1/k for tau >= ln k.
double phi_k(double tau, std::size_t k);

/// The envelope itself, exposed for tests.
double max_entropy_envelope(double top_mass, std::size_t k);

}  // namespace rfmem
