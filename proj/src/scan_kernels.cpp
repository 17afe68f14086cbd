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

#include "rfmem/scan_kernels.hpp"

#include <cstdint>

namespace rfmem::kernels {

void score_rows_serial(std::span<const double> matrix, std::size_t dim,
                       std::span<const double> query, std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = dot(query, matrix.subspan(r * dim, dim));
  }
}

void score_rows_parallel(std::span<const double> matrix, std::size_t dim,
                         std::span<const double> query, std::span<double> out) {
  const auto rows = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < rows; ++r) {
    const auto row = static_cast<std::size_t>(r);
    out[row] = dot(query, matrix.subspan(row * dim, dim));
  }
}

}  // namespace rfmem::kernels
