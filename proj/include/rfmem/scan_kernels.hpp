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
#include <span>

namespace rfmem::kernels {

/// Sequential left-to-right dot product. Every scoring path in the library
/// goes through this so scores are bit-identical regardless of scan policy.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// out[r] = <query, row r> for a row-major matrix. Reference implementation.
void score_rows_serial(std::span<const double> matrix, std::size_t dim,
                       std::span<const double> query, std::span<double> out);

/// OpenMP version of score_rows_serial; rows are split across threads, each
/// row is still reduced sequentially, so the output is bit-identical.
void score_rows_parallel(std::span<const double> matrix, std::size_t dim,
                         std::span<const double> query, std::span<double> out);

}  // namespace rfmem::kernels
