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

#include "rfmem/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace rfmem {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("invalid number for " + key + ": '" + v + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("invalid integer for " + key + ": '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("invalid boolean for " + key + ": '" + v + "'");
}

}  // namespace

std::string canonical_key(std::string key) {
  key = trim(key);
  while (!key.empty() && key.front() == '-') key.erase(key.begin());
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& piece : split_list(text)) {
    const auto v = to_u64("list", piece);
    if (v == 0) throw std::invalid_argument("list entries must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    }
    out.emplace_back(canonical_key(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  if (key == "k") c.recollect.final_k = to_u64(key, value);
  else if (key == "probe-k") c.probe_k = to_u64(key, value);
  else if (key == "lambda") c.gate.lambda = to_double(key, value);
  else if (key == "theta-high") c.gate.theta_high = to_double(key, value);
  else if (key == "theta-low") c.gate.theta_low = to_double(key, value);
  else if (key == "tau") c.gate.tau = to_double(key, value);
  else if (key == "beam") c.recollect.beam_b = to_u64(key, value);
  else if (key == "fanout") c.recollect.fanout_f = to_u64(key, value);
  else if (key == "rounds") c.recollect.max_rounds_r = to_u64(key, value);
  else if (key == "alpha") c.recollect.alpha = to_double(key, value);
  else if (key == "seed") c.recollect.seed = to_u64(key, value);
  else if (key == "threads") c.threads = static_cast<int>(to_u64(key, value));
  else if (key == "trace") c.trace = to_bool(key, value);
  else if (key == "trace-vectors") c.trace_vectors = to_bool(key, value);
  else if (key == "timing") c.timing = to_bool(key, value);
  else if (key == "no-timing") c.timing = !to_bool(key, value);
  else if (key == "recall-at") c.recall_at = parse_size_list(value);
  else if (key == "force-path") c.force = parse_force_path(value);
  else if (key == "corpus") c.corpus = value;
  else if (key == "queries") c.queries = value;
  else if (key == "gold") c.gold = value;
  else if (key == "out") c.out = value;
  else throw std::invalid_argument("unknown setting: " + key);
}

void RunConfig::resolve() {
  gate.probe_k = probe_k.value_or(recollect.final_k);
  gate.validate();
  recollect.validate();
  if (recall_at.empty()) throw std::invalid_argument("recall-at needs at least one cutoff");
}

nlohmann::json manifest(const RunConfig& c, const std::string& command) {
  return {{"command", command},
          {"corpus", c.corpus},
          {"queries", c.queries},
          {"gold", c.gold},
          {"config", c.config},
          {"out", c.out},
          {"k", c.recollect.final_k},
          {"probe-k", c.gate.probe_k},
          {"lambda", c.gate.lambda},
          {"theta-high", c.gate.theta_high},
          {"theta-low", c.gate.theta_low},
          {"tau", c.gate.tau},
          {"beam", c.recollect.beam_b},
          {"fanout", c.recollect.fanout_f},
          {"rounds", c.recollect.max_rounds_r},
          {"alpha", c.recollect.alpha},
          {"seed", c.recollect.seed},
          {"threads", c.threads},
          {"trace", c.trace},
          {"timing", c.timing},
          {"recall-at", c.recall_at},
          {"force-path", to_string(c.force)}};
}

}  // namespace rfmem
