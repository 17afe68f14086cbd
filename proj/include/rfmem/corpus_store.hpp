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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace rfmem {

/// Raised by ingestion. `line()` is 1-based, 0 when the error is not tied to a line.
class IngestError : public std::runtime_error {
 public:
  IngestError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) +
                              ", got " + std::to_string(got)) {}
};

class UnknownId : public std::out_of_range {
 public:
  explicit UnknownId(const std::string& id) : std::out_of_range("unknown id: " + id) {}
};

struct MemoryRecord {
  std::string id;
  std::optional<std::string> text;
  std::vector<double> embedding;  // unit length after ingestion
  std::map<std::string, std::string> metadata;

  bool operator==(const MemoryRecord&) const = default;
};

struct ScoredEntry {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredEntry&) const = default;
};

/// Global ranking order: score descending, then id ascending.
inline bool ranks_before(const ScoredEntry& a, const ScoredEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

using ScoredList = std::vector<ScoredEntry>;

using IdSet = std::unordered_set<std::string>;

enum class ScanPolicy { kSerial, kParallel };

/// Immutable row-major embedding matrix with id lookup.
/// Row order is insertion order.
class CorpusIndex {
 public:
  /// Normalizes every embedding and validates ids/dimensions. Throws IngestError
  /// naming `line_numbers[i]` for record i, or the 1-based position when
  /// `line_numbers` is empty.
  static CorpusIndex build(std::vector<MemoryRecord> records,
                           std::span<const std::size_t> line_numbers = {});

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const MemoryRecord& record(std::size_t row) const { return records_.at(row); }
  const std::vector<MemoryRecord>& records() const noexcept { return records_; }

  std::span<const double> row(std::size_t r) const {
    return {matrix_.data() + r * dimension_, dimension_};
  }
  std::span<const double> matrix() const noexcept { return matrix_; }

  std::optional<std::size_t> find_row(const std::string& id) const;

  /// Euclidean norm of each embedding as supplied, before normalization.
  const std::vector<double>& raw_norms() const noexcept { return raw_norms_; }

  bool operator==(const CorpusIndex& other) const {
    return dimension_ == other.dimension_ && records_ == other.records_;
  }

 private:
  CorpusIndex() = default;

  std::size_t dimension_ = 0;
  std::vector<MemoryRecord> records_;
  std::vector<double> matrix_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<double> raw_norms_;
};

/// Parses a JSON Lines corpus. Blank lines are skipped but still counted.
CorpusIndex ingest(const std::filesystem::path& path);

/// Exact top-k by inner product under the global ranking order. Scores are
/// accumulated in double precision.
ScoredList top_k(const CorpusIndex& index, std::span<const double> query, std::size_t k,
                 const IdSet& exclude = {}, ScanPolicy policy = ScanPolicy::kSerial);

const MemoryRecord& lookup(const CorpusIndex& index, const std::string& id);

/// Returns a unit-length copy; throws std::invalid_argument on a zero vector.
std::vector<double> normalized(std::span<const double> v);

}  // namespace rfmem
