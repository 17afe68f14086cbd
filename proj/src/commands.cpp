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

#include "rfmem/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rfmem/corpus_store.hpp"
#include "rfmem/evaluation.hpp"
#include "rfmem/json_io.hpp"
#include "rfmem/retriever.hpp"
#include "rfmem/run_config.hpp"
#include "rfmem/synthetic.hpp"

namespace rfmem {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flags that map onto RunConfig keys.
const std::vector<std::string> kValueFlags = {
    "corpus", "queries", "gold", "out", "seed", "threads", "k", "probe-k",
    "lambda", "theta-high", "theta-low", "tau", "beam", "fanout", "rounds",
    "alpha", "recall-at", "force-path"};
const std::vector<std::string> kBoolFlags = {"trace", "trace-vectors", "no-timing"};

struct SharedFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  std::string config;
};

void add_shared(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--config", flags.config, "key=value config file; flags take precedence");
  for (const auto& name : kValueFlags) cmd->add_option("--" + name, flags.values[name]);
  for (const auto& name : kBoolFlags) cmd->add_flag("--" + name, flags.switches[name]);
}

RunConfig build_config(const CLI::App* cmd, const SharedFlags& flags) {
  RunConfig config;
  try {
    if (!flags.config.empty()) {
      config.config = flags.config;
      for (const auto& [k, v] : read_key_values(flags.config)) apply_setting(config, k, v);
    }
    for (const auto& name : kValueFlags) {
      if (cmd->count("--" + name) > 0) apply_setting(config, name, flags.values.at(name));
    }
    for (const auto& name : kBoolFlags) {
      if (flags.switches.at(name)) apply_setting(config, name, "true");
    }
    config.resolve();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return config;
}

void require(const std::string& value, const std::string& flag) {
  if (value.empty()) throw InputError("missing required --" + flag);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << content;
}

void warn_budget(const RunConfig& config, std::ostream& err) {
  for (const auto& w : budget_warnings(config.recollect)) err << "warning: " << w << '\n';
}

int cmd_index(const RunConfig& config, std::ostream& out) {
  require(config.corpus, "corpus");
  const auto index = ingest(config.corpus);
  const auto& norms = index.raw_norms();
  double lo = norms.front();
  double hi = norms.front();
  double sum = 0.0;
  for (double n : norms) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    sum += n;
  }
  json report{{"records", index.size()},
              {"dimension", index.dimension()},
              {"raw_norm", {{"min", lo}, {"mean", sum / static_cast<double>(norms.size())}, {"max", hi}}}};
  out << "M=" << index.size() << " dimension=" << index.dimension() << '\n' << report.dump(2) << '\n';
  return kExitOk;
}

std::vector<QueryRecord> load_queries(const RunConfig& config) {
  require(config.queries, "queries");
  return read_queries(config.queries);
}

int cmd_query(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.corpus, "corpus");
  const auto index = ingest(config.corpus);
  const auto queries = load_queries(config);
  warn_budget(config, err);

  RetrieveOptions options;
  options.force = config.force;
  options.record_trace = config.trace;
  const auto entries = retrieve_batch(index, query_inputs(queries), config.gate, config.recollect,
                                      options, config.threads);

  ResultJsonOptions jopts;
  jopts.timing = config.timing;
  jopts.trace = config.trace;
  jopts.trace_vectors = config.trace_vectors;
  std::ostringstream lines;
  std::size_t ok = 0;
  for (const auto& e : entries) {
    if (e.result) {
      ++ok;
      lines << to_json(*e.result, jopts).dump() << '\n';
    } else {
      lines << error_json(e.query_id, e.error).dump() << '\n';
    }
  }
  if (config.out.empty()) {
    out << lines.str();
  } else {
    write_file(config.out, lines.str());
    write_file(config.out + ".manifest.json", manifest(config, "query").dump(2) + "\n");
  }
  err << ok << "/" << entries.size() << " queries succeeded\n";
  return ok > 0 || entries.empty() ? kExitOk : kExitRunFailure;
}

GoldSet load_gold(const RunConfig& config, const std::vector<QueryRecord>& queries) {
  try {
    std::optional<GoldSet> file;
    if (!config.gold.empty()) file = read_gold(config.gold);
    return resolve_gold(queries, file);
  } catch (const MissingGold& e) {
    throw InputError(e.what());
  }
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  require(config.corpus, "corpus");
  const auto index = ingest(config.corpus);
  const auto queries = load_queries(config);
  const auto gold = load_gold(config, queries);
  warn_budget(config, err);

  const auto report = evaluate(index, queries, gold, config);
  const auto metrics = to_json(report, config.timing);
  const std::string label(to_string(config.force));
  if (!config.out.empty()) {
    const fs::path dir(config.out);
    write_file(dir / "metrics.json", metrics.dump(2) + "\n");
    write_file(dir / "metrics.csv", summary_csv(report, label, config.timing));
    write_file(dir / "per_query.csv", per_query_csv(report, queries));
    write_file(dir / "manifest.json", manifest(config, "eval").dump(2) + "\n");
  }
  out << summary_csv(report, label, config.timing);
  if (report.latency && report.latency->counter_mismatches > 0) {
    err << "counter mismatches: " << report.latency->counter_mismatches << '\n';
  }
  return report.errors == report.entries.size() && !report.entries.empty() ? kExitRunFailure : kExitOk;
}

int cmd_sweep(const RunConfig& config, const std::string& grid_path, std::ostream& out,
              std::ostream& err) {
  require(config.corpus, "corpus");
  require(grid_path, "grid");
  SweepGrid grid;
  try {
    grid = read_sweep_grid(grid_path);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto index = ingest(config.corpus);
  const auto queries = load_queries(config);
  const auto gold = load_gold(config, queries);
  warn_budget(config, err);

  std::vector<SweepRow> rows;
  try {
    rows = sweep(index, queries, gold, config, grid);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const auto csv = sweep_csv(grid, rows, config.timing);
  if (!config.out.empty()) {
    const fs::path dir(config.out);
    write_file(dir / "sweep.csv", csv);
    write_file(dir / "sweep.json", sweep_json(grid, rows, config.timing).dump(2) + "\n");
    auto m = manifest(config, "sweep");
    m["grid"] = grid_path;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
  }
  out << csv;
  return kExitOk;
}

SyntheticSpec read_synthetic_spec(const std::string& path) {
  SyntheticSpec spec;
  if (path.empty()) return spec;
  for (const auto& [key, value] : read_key_values(path)) {
    std::size_t used = 0;
    auto as_size = [&] { return static_cast<std::size_t>(std::stoull(value, &used)); };
    auto as_double = [&] { return std::stod(value, &used); };
    try {
      if (key == "dimension") spec.dimension = as_size();
      else if (key == "corpus-size") spec.corpus_size = as_size();
      else if (key == "clusters") spec.clusters = as_size();
      else if (key == "spread") spec.spread = as_double();
      else if (key == "queries") spec.queries = as_size();
      else if (key == "chain-length") spec.chain_length = as_size();
      else if (key == "dispersion") spec.dispersion = as_double();
      else if (key == "seed") spec.seed = std::stoull(value, &used);
      else throw InputError("unknown synth setting: " + key);
    } catch (const std::logic_error&) {
      throw InputError("invalid value for " + key + ": '" + value + "'");
    }
    if (used != value.size()) throw InputError("invalid value for " + key + ": '" + value + "'");
  }
  return spec;
}

int cmd_synth(const CLI::App* cmd, const SharedFlags& flags, const std::string& spec_path,
              std::ostream& out) {
  SyntheticSpec spec;
  try {
    spec = read_synthetic_spec(spec_path);
    if (cmd->count("--seed") > 0) spec.seed = std::stoull(flags.values.at("seed"));
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const std::string dir = flags.values.at("out");
  require(dir, "out");
  const auto data = generate(spec);
  write_synthetic(data, dir);
  json m{{"command", "synth"},
         {"spec", spec_path},
         {"dimension", spec.dimension},
         {"corpus-size", spec.corpus_size},
         {"clusters", spec.clusters},
         {"spread", spec.spread},
         {"queries", spec.queries},
         {"chain-length", spec.chain_length},
         {"dispersion", spec.dispersion},
         {"seed", spec.seed}};
  write_file(fs::path(dir) / "manifest.json", m.dump(2) + "\n");
  out << "wrote " << data.corpus.size() << " records and " << data.queries.size() << " queries to "
      << dir << '\n';
  return kExitOk;
}

int cmd_gate_stats(const RunConfig& config, std::ostream& out) {
  require(config.corpus, "corpus");
  const auto index = ingest(config.corpus);
  const auto queries = load_queries(config);
  const auto stats = gate_stats(index, queries, config.gate, config.threads);
  const auto csv = gate_stats_csv(stats);
  const auto summary = to_json(stats);
  if (config.out.empty()) {
    out << csv << summary.dump(2) << '\n';
  } else {
    const fs::path dir(config.out);
    write_file(dir / "gate_stats.csv", csv);
    write_file(dir / "gate_summary.json", summary.dump(2) + "\n");
    write_file(dir / "manifest.json", manifest(config, "gate-stats").dump(2) + "\n");
    out << summary.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Familiarity/recollection memory retrieval engine", "rfmem"};
  app.require_subcommand(1);

  std::map<std::string, SharedFlags> flags;
  std::map<std::string, CLI::App*> cmds;
  for (const char* name : {"index", "query", "eval", "sweep", "synth", "gate-stats"}) {
    cmds[name] = app.add_subcommand(name);
    add_shared(cmds[name], flags[name]);
  }
  cmds["index"]->description("Validate a corpus file and report its shape");
  cmds["query"]->description("Run retrieval for every query and emit result JSON lines");
  cmds["eval"]->description("Run retrieval and score Recall@K against gold sets");
  cmds["sweep"]->description("Evaluate every cell of a parameter grid");
  cmds["synth"]->description("Generate a synthetic corpus with planted evidence chains");
  cmds["gate-stats"]->description("Report the familiarity signal for every query");
  std::string grid_path;
  std::string spec_path;
  cmds["sweep"]->add_option("--grid", grid_path, "key=value file with comma-separated axis values");
  cmds["synth"]->add_option("--spec", spec_path, "key=value synthetic corpus spec");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInputError;
  }

  try {
    for (const auto& [name, cmd] : cmds) {
      if (!cmd->parsed()) continue;
      if (name == "synth") return cmd_synth(cmd, flags[name], spec_path, out);
      const RunConfig config = build_config(cmd, flags[name]);
      if (name == "index") return cmd_index(config, out);
      if (name == "query") return cmd_query(config, out, err);
      if (name == "eval") return cmd_eval(config, out, err);
      if (name == "sweep") return cmd_sweep(config, grid_path, out, err);
      if (name == "gate-stats") return cmd_gate_stats(config, out);
    }
  } catch (const IngestError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return kExitInputError;
}

}  // namespace rfmem
