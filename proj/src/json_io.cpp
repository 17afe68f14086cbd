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

#include "rfmem/json_io.hpp"

#include <fstream>

namespace rfmem {

using nlohmann::json;

std::optional<std::string> QueryRecord::category() const {
  auto it = metadata.find("category");
  if (it == metadata.end()) return std::nullopt;
  return it->second;
}

std::vector<QueryRecord> read_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(0, "cannot open " + path.string());
  std::vector<QueryRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IngestError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw IngestError(line_no, "expected a JSON object");
    QueryRecord q;
    auto id = obj.find("query_id");
    if (id == obj.end() || !id->is_string()) throw IngestError(line_no, "missing string field 'query_id'");
    q.query_id = id->get<std::string>();
    auto emb = obj.find("embedding");
    if (emb == obj.end() || !emb->is_array()) throw IngestError(line_no, "missing array field 'embedding'");
    for (const auto& v : *emb) {
      if (!v.is_number()) throw IngestError(line_no, "embedding contains a non-number");
      q.embedding.push_back(v.get<double>());
    }
    if (auto gold = obj.find("gold"); gold != obj.end() && !gold->is_null()) {
      if (!gold->is_array()) throw IngestError(line_no, "'gold' must be an array of ids");
      auto& ids = q.gold.emplace();
      for (const auto& g : *gold) {
        if (!g.is_string()) throw IngestError(line_no, "'gold' must be an array of ids");
        ids.push_back(g.get<std::string>());
      }
    }
    if (auto meta = obj.find("metadata"); meta != obj.end() && meta->is_object()) {
      for (const auto& [k, v] : meta->items()) {
        if (v.is_string()) q.metadata.emplace(k, v.get<std::string>());
      }
    }
    if (auto cat = obj.find("category"); cat != obj.end() && cat->is_string()) {
      q.metadata["category"] = cat->get<std::string>();
    }
    out.push_back(std::move(q));
  }
  return out;
}

GoldSet read_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(0, "cannot open " + path.string());
  json obj;
  try {
    obj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IngestError(0, std::string("malformed gold file: ") + e.what());
  }
  if (!obj.is_object()) throw IngestError(0, "gold file must be a JSON object");
  GoldSet gold;
  for (const auto& [qid, ids] : obj.items()) {
    if (!ids.is_array()) throw IngestError(0, "gold entry for '" + qid + "' is not an array");
    auto& out = gold[qid];
    for (const auto& id : ids) {
      if (!id.is_string()) throw IngestError(0, "gold entry for '" + qid + "' holds a non-string");
      out.push_back(id.get<std::string>());
    }
  }
  return gold;
}

json to_json(const GateSignal& signal, bool with_distribution) {
  json g;
  g["mean"] = signal.mean ? json(*signal.mean) : json(nullptr);
  g["entropy"] = signal.entropy ? json(*signal.entropy) : json(nullptr);
  g["strategy"] = to_string(signal.strategy);
  if (with_distribution) g["distribution"] = signal.distribution;
  return g;
}

namespace {

json scored(const ScoredList& list) {
  json arr = json::array();
  for (const auto& e : list) arr.push_back({{"id", e.id}, {"score", e.score}});
  return arr;
}

}  // namespace

json to_json(const RecollectionTrace& trace, bool with_vectors) {
  json rounds = json::array();
  for (const auto& r : trace.rounds) {
    json beams = json::array();
    for (const auto& b : r.beams) {
      beams.push_back({{"beam", b.beam}, {"candidates", scored(b.candidates)}, {"clusters", b.clusters}});
    }
    json next = json::array();
    for (const auto& n : r.next) {
      json e{{"beam", n.beam}, {"cluster", n.cluster}, {"score", n.score}, {"members", n.members}};
      if (n.degenerate) e["degenerate"] = true;
      if (with_vectors) e["query"] = n.query;
      next.push_back(std::move(e));
    }
    rounds.push_back({{"round", r.round},
                      {"budget", r.budget},
                      {"beams", std::move(beams)},
                      {"next", std::move(next)},
                      {"kept", r.kept},
                      {"bagged", r.bagged}});
  }
  return {{"rounds", std::move(rounds)}};
}

json to_json(const RetrievalResult& result, const ResultJsonOptions& options) {
  const auto& c = result.counters;
  json out{{"query_id", result.query_id},
           {"path", to_string(result.path)},
           {"ranked", scored(result.ranked)},
           {"gate", to_json(result.gate, options.distribution)},
           {"counters",
            {{"sim_evals", c.sim_evals},
             {"member_evals", c.member_evals},
             {"cluster_calls", c.cluster_calls},
             {"rounds", c.rounds},
             {"beams_per_round", c.beams_per_round},
             {"candidates_per_round", c.candidates_per_round},
             {"probe_reused", c.probe_reused}}}};
  if (options.timing) out["wall_time_us"] = result.wall_time_us;
  if (options.trace && result.trace) out["trace"] = to_json(*result.trace, options.trace_vectors);
  return out;
}

json error_json(const std::string& query_id, const std::string& message) {
  return {{"query_id", query_id}, {"error", message}};
}

}  // namespace rfmem
