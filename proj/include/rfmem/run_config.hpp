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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rfmem/familiarity_gate.hpp"
#include "rfmem/recollection.hpp"
#include "rfmem/retriever.hpp"

namespace rfmem {

struct RunConfig {
  GateParams gate;
  RecollectParams recollect;
  std::optional<std::size_t> probe_k;  // unset: follows recollect.final_k

  std::string corpus;
  std::string queries;
  std::string gold;
  std::string out;
  std::string config;

  bool trace = false;
  bool trace_vectors = false;
  bool timing = true;
  int threads = 0;
  std::vector<std::size_t> recall_at{5, 10, 50};
  ForcePath force = ForcePath::kGated;

  /// Copies the effective probe size into gate.probe_k and validates everything.
  void resolve();
};

/// Ordered key=value pairs from a flat text file; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path);

/// Applies one setting. Keys use the long flag names ("theta-high"); underscores
/// are accepted in place of dashes. Throws std::invalid_argument on unknown keys
/// or unparsable values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical form of a setting key.
std::string canonical_key(std::string key);

std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

/// Every effective value, enough to reproduce the run.
nlohmann::json manifest(const RunConfig& config, const std::string& command);

}  // namespace rfmem
