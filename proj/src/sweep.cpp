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

#include "rfmem/evaluation.hpp"

#include <cstdint>
#include <sstream>
#include <stdexcept>

#include <omp.h>

namespace rfmem {

using nlohmann::json;

GoldSet resolve_gold(const std::vector<QueryRecord>& queries, const std::optional<GoldSet>& gold) {
  GoldSet out;
  for (const auto& q : queries) {
    if (gold) {
      auto it = gold->find(q.query_id);
      if (it == gold->end()) throw MissingGold(q.query_id);
      out[q.query_id] = it->second;
    } else if (q.gold) {
      out[q.query_id] = *q.gold;
    } else {
      throw MissingGold(q.query_id);
    }
  }
  return out;
}

std::vector<QueryInput> query_inputs(const std::vector<QueryRecord>& queries) {
  std::vector<QueryInput> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back({q.query_id, q.embedding});
  return out;
}

EvalReport evaluate(const CorpusIndex& index, const std::vector<QueryRecord>& queries,
                    const GoldSet& gold, const RunConfig& config) {
  EvalReport report;
  report.cutoffs = config.recall_at;
  const auto inputs = query_inputs(queries);
  RetrieveOptions options;
  options.force = config.force;
  options.record_trace = config.trace;
  report.entries = retrieve_batch(index, inputs, config.gate, config.recollect, options, config.threads);

  const std::size_t nc = report.cutoffs.size();
  std::map<std::string, std::vector<double>> sums;
  std::vector<RetrievalResult> ok;
  double wall = 0.0;
  report.per_query_recall.resize(queries.size());

  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& entry = report.entries[i];
    if (!entry.result) {
      ++report.errors;
      continue;
    }
    const auto& res = *entry.result;
    (res.path == Strategy::kFamiliarity ? report.familiarity : report.recollection)++;
    wall += static_cast<double>(res.wall_time_us);

    const auto& g = gold.at(queries[i].query_id);
    auto& row = report.per_query_recall[i];
    for (std::size_t c = 0; c < nc; ++c) row.push_back(recall_at_k(res.ranked, g, report.cutoffs[c]));

    std::vector<std::string> groups{"overall"};
    if (auto cat = queries[i].category()) groups.push_back("category:" + *cat);
    for (const auto& name : groups) {
      auto& s = sums[name];
      s.resize(nc, 0.0);
      for (std::size_t c = 0; c < nc; ++c) s[c] += row[c];
      ++report.category_sizes[name];
    }
    ok.push_back(res);
  }

  for (auto& [name, s] : sums) {
    for (double& v : s) v /= static_cast<double>(report.category_sizes[name]);
    report.mean_recall[name] = s;
  }
  if (!ok.empty()) {
    report.mean_wall_us = wall / static_cast<double>(ok.size());
    report.latency = latency_report(ok, index.size(), config.gate, config.recollect);
  }
  return report;
}

namespace {

json latency_json(const std::optional<PathLatency>& p, bool timing) {
  if (!p) return nullptr;
  json out{{"count", p->count}, {"mean_sim_evals", p->mean_sim_evals}};
  if (timing) {
    out["mean_us"] = p->mean_us;
    out["median_us"] = p->median_us;
    out["p95_us"] = p->p95_us;
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

json to_json(const EvalReport& report, bool timing) {
  json recall = json::object();
  for (const auto& [name, values] : report.mean_recall) {
    json row = json::object();
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
      row["recall@" + std::to_string(report.cutoffs[c])] = values[c];
    }
    row["queries"] = report.category_sizes.at(name);
    recall[name] = std::move(row);
  }
  json out{{"queries", report.entries.size()},
           {"errors", report.errors},
           {"paths", {{"familiarity", report.familiarity}, {"recollection", report.recollection}}},
           {"recall", std::move(recall)}};
  if (report.latency) {
    out["latency"] = {{"familiarity", latency_json(report.latency->familiarity, timing)},
                      {"recollection", latency_json(report.latency->recollection, timing)},
                      {"counter_mismatches", report.latency->counter_mismatches}};
  }
  if (timing) out["mean_wall_us"] = report.mean_wall_us;
  return out;
}

std::string summary_csv(const EvalReport& report, const std::string& label, bool timing, bool header) {
  std::ostringstream os;
  if (header) {
    os << "run,queries,familiarity,recollection,errors";
    for (auto c : report.cutoffs) os << ",recall@" << c;
    if (timing) os << ",mean_wall_us";
    os << '\n';
  }
  os << label << ',' << report.entries.size() << ',' << report.familiarity << ','
     << report.recollection << ',' << report.errors;
  const auto it = report.mean_recall.find("overall");
  for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
    os << ',' << (it == report.mean_recall.end() ? std::string("nan") : fmt(it->second[c]));
  }
  if (timing) os << ',' << fmt(report.mean_wall_us);
  os << '\n';
  return os.str();
}

std::string per_query_csv(const EvalReport& report, const std::vector<QueryRecord>& queries) {
  std::ostringstream os;
  os << "query_id,category,path";
  for (auto c : report.cutoffs) os << ",recall@" << c;
  os << '\n';
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& e = report.entries[i];
    os << queries[i].query_id << ',' << queries[i].category().value_or("") << ','
       << (e.result ? std::string(to_string(e.result->path)) : std::string("error"));
    for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
      os << ',' << (e.result ? fmt(report.per_query_recall[i][c]) : std::string());
    }
    os << '\n';
  }
  return os.str();
}

GateStats gate_stats(const CorpusIndex& index, const std::vector<QueryRecord>& queries,
                     const GateParams& params, int threads) {
  params.validate();
  GateStats stats;
  stats.rows.resize(queries.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(team)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& q = queries[static_cast<std::size_t>(i)];
    auto& row = stats.rows[static_cast<std::size_t>(i)];
    row.query_id = q.query_id;
    try {
      if (q.embedding.size() != index.dimension()) {
        throw DimensionMismatch(index.dimension(), q.embedding.size());
      }
      const auto x = normalized(q.embedding);
      const auto signal = gate(top_k(index, x, params.probe_k), params);
      row.mean = signal.mean;
      row.entropy = signal.entropy;
      row.strategy = signal.strategy;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }

  std::vector<double> means;
  std::vector<double> entropies;
  for (const auto& row : stats.rows) {
    if (!row.error.empty()) continue;
    (row.strategy == Strategy::kFamiliarity ? stats.familiarity : stats.recollection)++;
    if (row.mean) means.push_back(*row.mean);
    if (row.entropy) entropies.push_back(*row.entropy);
  }
  auto five = [](const std::vector<double>& v) {
    return Quartiles{quantile(v, 0.0), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75),
                     quantile(v, 1.0)};
  };
  if (!means.empty()) stats.mean_quartiles = five(means);
  if (!entropies.empty()) stats.entropy_quartiles = five(entropies);
  return stats;
}

std::string gate_stats_csv(const GateStats& stats) {
  std::ostringstream os;
  os.precision(17);
  os << "query_id,mean,entropy,strategy\n";
  for (const auto& row : stats.rows) {
    os << row.query_id << ',';
    if (row.mean) os << *row.mean;
    os << ',';
    if (row.entropy) os << *row.entropy;
    os << ',' << (row.error.empty() ? std::string(to_string(row.strategy)) : std::string("error")) << '\n';
  }
  return os.str();
}

json to_json(const GateStats& stats) {
  auto q = [](const std::optional<Quartiles>& v) -> json {
    if (!v) return nullptr;
    return {{"min", (*v)[0]}, {"q1", (*v)[1]}, {"median", (*v)[2]}, {"q3", (*v)[3]}, {"max", (*v)[4]}};
  };
  return {{"queries", stats.rows.size()},
          {"familiarity", stats.familiarity},
          {"recollection", stats.recollection},
          {"mean", q(stats.mean_quartiles)},
          {"entropy", q(stats.entropy_quartiles)}};
}

SweepGrid read_sweep_grid(const std::filesystem::path& path) {
  SweepGrid grid;
  for (auto& [key, value] : read_key_values(path)) {
    auto values = split_list(value);
    if (values.empty()) throw std::invalid_argument("sweep axis '" + key + "' has no values");
    grid.emplace_back(key, std::move(values));
  }
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  return grid;
}

std::vector<SweepRow> sweep(const CorpusIndex& index, const std::vector<QueryRecord>& queries,
                            const GoldSet& gold, const RunConfig& base, const SweepGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("sweep grid is empty");
  std::vector<SweepRow> rows;
  std::vector<std::size_t> pos(grid.size(), 0);
  for (;;) {
    RunConfig cell = base;
    SweepRow row;
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const auto& value = grid[a].second[pos[a]];
      apply_setting(cell, grid[a].first, value);
      row.values.push_back(value);
    }
    cell.resolve();
    row.report = evaluate(index, queries, gold, cell);
    rows.push_back(std::move(row));

    // odometer over axes, last axis fastest
    std::size_t a = grid.size();
    while (a > 0) {
      --a;
      if (++pos[a] < grid[a].second.size()) break;
      pos[a] = 0;
      if (a == 0) return rows;
    }
  }
}

std::string sweep_csv(const SweepGrid& grid, const std::vector<SweepRow>& rows, bool timing) {
  std::ostringstream os;
  for (const auto& [name, values] : grid) os << name << ',';
  os << "familiarity,recollection,errors";
  const auto& cutoffs = rows.empty() ? std::vector<std::size_t>{} : rows.front().report.cutoffs;
  for (auto c : cutoffs) os << ",recall@" << c;
  if (timing) os << ",mean_wall_us";
  os << '\n';
  for (const auto& row : rows) {
    for (const auto& v : row.values) os << v << ',';
    const auto& r = row.report;
    os << r.familiarity << ',' << r.recollection << ',' << r.errors;
    const auto it = r.mean_recall.find("overall");
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      os << ',' << (it == r.mean_recall.end() ? std::string("nan") : fmt(it->second[c]));
    }
    if (timing) os << ',' << fmt(r.mean_wall_us);
    os << '\n';
  }
  return os.str();
}

json sweep_json(const SweepGrid& grid, const std::vector<SweepRow>& rows, bool timing) {
  json axes = json::array();
  for (const auto& [name, values] : grid) axes.push_back({{"name", name}, {"values", values}});
  json cells = json::array();
  for (const auto& row : rows) {
    json params = json::object();
    for (std::size_t a = 0; a < grid.size(); ++a) params[grid[a].first] = row.values[a];
    cells.push_back({{"params", std::move(params)}, {"metrics", to_json(row.report, timing)}});
  }
  return {{"axes", std::move(axes)}, {"cells", std::move(cells)}};
}

}  // namespace rfmem
