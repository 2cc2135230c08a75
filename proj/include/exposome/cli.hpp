#pragma once
// Command-line surface. Subcommands: build, stats, tripartite, surveil,
// generate, export. Machine-readable reports go to stdout, human summaries
// and diagnostics to stderr. Exit codes: 0 success (rejects included),
// 2 fatal usage or input errors, nothing else.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "exposome/export.hpp"
#include "exposome/graph.hpp"
#include "exposome/ingest.hpp"
#include "exposome/surveil.hpp"
#include "exposome/synth.hpp"
#include "exposome/tripartite.hpp"

namespace exposome::cli {

namespace detail {

struct Options {
  std::string input;
  std::string output;
  std::string format = "graphml";
  std::string level = "disease";
  std::string dims = "agent,occupation,sector";
  std::string hierarchy;
  std::uint64_t seed = 42;
  bool quadratic = false;
  unsigned threads = 1;
  std::size_t hub_threshold = 5000;

  std::string baseline_end;
  std::int32_t window_days = 30;
  std::uint64_t growth_threshold = 3;

  std::string filter;

  std::string config_path;
  std::uint64_t records = 1000;
  std::uint32_t pathologies = 400;
  std::uint32_t agents = 600;
  std::uint32_t occupations = 250;
  std::uint32_t sectors = 25;
  std::string date_start;
  std::string date_end;
  double skew = 1.0;
  std::string agent_count_probs;
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

inline GraphConfig graph_config(const Options& options) {
  GraphConfig config;
  const auto level = parse_level(options.level);
  if (!level) throw UsageError("bad --level: " + options.level);
  config.level = *level;
  const auto dims = DimSet::parse(options.dims);
  if (!dims) throw UsageError("bad --dims: " + options.dims);
  config.dims = *dims;
  return config;
}

inline std::optional<HierarchyTable> load_hierarchy(const Options& options) {
  if (options.hierarchy.empty()) return std::nullopt;
  std::ifstream in(options.hierarchy, std::ios::binary);
  if (!in) throw UsageError("cannot open hierarchy table: " + options.hierarchy);
  return HierarchyTable::parse_tsv(in);
}

inline BuildOptions build_options(const Options& options) {
  BuildOptions build;
  build.quadratic = options.quadratic;
  build.threads = std::max(1u, options.threads);
  build.hub_threshold = options.hub_threshold;
  return build;
}

// Writes through a file when --output is given, else to `fallback`.
template <typename Fn>
void with_output(const Options& options, std::ostream& fallback, Fn&& write) {
  if (options.output.empty()) {
    write(fallback);
    return;
  }
  std::ofstream out(options.output, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + options.output);
  write(out);
  if (!out) throw UsageError("failed writing output file: " + options.output);
}

inline void write_graph_as(const std::string& format, std::ostream& out,
                           const ExposomeGraph& graph) {
  if (format == "graphml") {
    write_graphml(out, graph);
  } else if (format == "dot") {
    write_dot(out, graph);
  } else if (format == "json") {
    write_json(out, graph);
  } else {
    throw UsageError("bad --format: " + format);
  }
}

inline void write_tripartite_as(const std::string& format, std::ostream& out,
                                const TripartiteGraph& graph) {
  if (format == "graphml") {
    write_tripartite_graphml(out, graph);
  } else if (format == "dot") {
    write_tripartite_dot(out, graph);
  } else if (format == "json") {
    write_tripartite_json(out, graph);
  } else {
    throw UsageError("bad --format: " + format);
  }
}

inline void summarize_rejects(const ParseResult& parsed, std::ostream& err) {
  err << "accepted " << parsed.records.size() << " records, " << parsed.rejects.size()
      << " rejects, " << parsed.warnings.size() << " warnings\n";
  std::size_t shown = 0;
  for (const auto& reject : parsed.rejects) {
    if (++shown > 5) {
      err << "  ... " << parsed.rejects.size() - 5 << " more rejects\n";
      break;
    }
    err << "  reject line " << reject.line_number;
    if (!reject.record_id.empty()) err << " [" << reject.record_id << "]";
    err << ":";
    for (const auto& error : reject.errors) err << " " << error.to_string();
    err << "\n";
  }
  for (const auto& warning : parsed.warnings) {
    err << "  warning line " << warning.line_number << " [" << warning.record_id
        << "]: duplicate record_id\n";
  }
}

inline int cmd_build(const Options& options, std::ostream& out, std::ostream& err,
                     bool write_artifact) {
  const GraphConfig config = graph_config(options);
  const auto hierarchy = load_hierarchy(options);
  const ParseResult parsed = parse_file(options.input);
  summarize_rejects(parsed, err);
  const IdentityLedger ledger = fold_identities(parsed.records);
  const ExposomeGraph graph = build_graph(
      ledger, config, hierarchy ? &*hierarchy : nullptr, build_options(options));
  if (write_artifact) {
    if (options.output.empty()) throw UsageError("build requires --output");
    with_output(options, out,
                [&](std::ostream& sink) { write_graph_as(options.format, sink, graph); });
  }
  const StatsReport report =
      make_stats(parsed.records.size(), parsed.rejects.size(), graph);
  out << report.to_json().dump() << "\n";
  err << "nodes " << report.nodes << ", edges " << report.edges << ", components "
      << report.components << ", isolated " << report.isolated << "\n";
  return 0;
}

inline int cmd_tripartite(const Options& options, std::ostream& out, std::ostream& err) {
  const ParseResult parsed = parse_file(options.input);
  summarize_rejects(parsed, err);
  const IdentityLedger ledger = fold_identities(parsed.records);
  const TripartiteGraph graph = project_tripartite(ledger, options.filter);
  with_output(options, out,
              [&](std::ostream& sink) { write_tripartite_as(options.format, sink, graph); });
  err << "tripartite: " << graph.pathologies.size() << " pathologies, "
      << graph.agents.size() << " agents, " << graph.occupations.size()
      << " occupations, " << graph.edge_count() << " edges\n";
  return 0;
}

inline int cmd_surveil(const Options& options, std::ostream& out, std::ostream& err) {
  SurveillanceConfig config;
  config.graph = graph_config(options);
  const auto baseline = Date::parse(options.baseline_end);
  if (!baseline) throw UsageError("bad --baseline-end: " + options.baseline_end);
  config.baseline_end = *baseline;
  if (options.window_days < 1) throw UsageError("--window must be at least 1 day");
  if (options.growth_threshold < 1) throw UsageError("--growth-threshold must be >= 1");
  config.window_days = options.window_days;
  config.growth_threshold = options.growth_threshold;

  const auto hierarchy = load_hierarchy(options);
  ParseResult parsed = parse_file(options.input);
  summarize_rejects(parsed, err);
  if (parsed.records.empty()) err << "empty stream: nothing to replay\n";
  const auto events =
      replay(std::move(parsed.records), config, hierarchy ? &*hierarchy : nullptr);
  with_output(options, out, [&](std::ostream& sink) {
    for (const auto& event : events) sink << event_to_json_line(event) << "\n";
  });
  err << "events: " << events.size() << "\n";
  return 0;
}

inline int cmd_generate(const Options& options, const CLI::App* command, std::ostream& out,
                        std::ostream& err) {
  SynthConfig config;
  if (!options.config_path.empty()) {
    std::ifstream in(options.config_path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file: " + options.config_path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw UsageError("config file is not valid JSON");
    config = synth_config_from_json(doc);
  }
  // Flags win over the config file.
  auto given = [&](const char* name) { return command->count(name) > 0; };
  if (given("--seed")) config.seed = options.seed;
  if (given("--records")) config.n_records = options.records;
  if (given("--pathologies")) config.n_pathologies = options.pathologies;
  if (given("--agents")) config.n_agents = options.agents;
  if (given("--occupations")) config.n_occupations = options.occupations;
  if (given("--sectors")) config.n_sectors = options.sectors;
  if (given("--skew")) config.skew = options.skew;
  if (given("--date-start")) {
    const auto date = Date::parse(options.date_start);
    if (!date) throw UsageError("bad --date-start: " + options.date_start);
    config.date_start = *date;
  }
  if (given("--date-end")) {
    const auto date = Date::parse(options.date_end);
    if (!date) throw UsageError("bad --date-end: " + options.date_end);
    config.date_end = *date;
  }
  if (given("--agent-count-probs")) {
    std::array<double, 5> probs{};
    std::stringstream stream(options.agent_count_probs);
    std::string item;
    std::size_t i = 0;
    while (std::getline(stream, item, ',') && i < 5) probs[i++] = std::stod(item);
    if (i != 5) throw UsageError("--agent-count-probs needs 5 comma-separated numbers");
    config.agent_count_probs = probs;
  }
  if (const auto problems = config.validate(); !problems.empty()) {
    throw UsageError("invalid generator config: " + problems.front());
  }
  const auto records = generate(config);
  with_output(options, out, [&](std::ostream& sink) {
    for (const auto& record : records) sink << to_json_line(record) << "\n";
  });
  err << "generated " << records.size() << " records\n";
  return 0;
}

inline int cmd_export(const Options& options, std::ostream& out, std::ostream& err) {
  std::ifstream in(options.input, std::ios::binary);
  if (!in) throw UsageError("cannot open input file: " + options.input);
  const ExposomeGraph graph = import_graph_json(in);
  with_output(options, out,
              [&](std::ostream& sink) { write_graph_as(options.format, sink, graph); });
  err << "exported " << graph.node_count() << " nodes, " << graph.edge_count()
      << " edges as " << options.format << "\n";
  return 0;
}

}  // namespace detail

// Runs the full CLI against `args` (args[0] is the program name). All output
// goes through the supplied streams, so tests can call this in-process.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using detail::Options;
  Options options;

  CLI::App app{"exposome: build and monitor shared-exposure networks of "
               "occupational health problems"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd, bool with_input) {
    if (with_input) {
      cmd->add_option("--input", options.input, "input corpus (.jsonl or .csv)")
          ->required();
    }
    cmd->add_option("--output", options.output, "output file (default: stdout)");
    cmd->add_option("--format", options.format, "graphml|dot|json");
    cmd->add_option("--level", options.level, "category|subgroup|disease");
    cmd->add_option("--dims", options.dims, "comma list of agent,occupation,sector");
    cmd->add_option("--hierarchy", options.hierarchy, "pathology hierarchy TSV");
    cmd->add_option("--seed", options.seed, "generator seed (generate only)");
    cmd->add_flag("--quadratic", options.quadratic, "definitional edge construction");
    cmd->add_option("--threads", options.threads, "index scan threads");
    cmd->add_option("--hub-threshold", options.hub_threshold,
                    "report elements on more nodes than this");
  };

  CLI::App* build = app.add_subcommand("build", "build the exposome graph artifact");
  add_common(build, true);
  CLI::App* stats = app.add_subcommand("stats", "print the stats report only");
  add_common(stats, true);

  CLI::App* tripartite =
      app.add_subcommand("tripartite", "project the disease-agent-occupation network");
  add_common(tripartite, true);
  tripartite->add_option("--filter", options.filter, "pathology code prefix filter");

  CLI::App* surveil = app.add_subcommand("surveil", "replay records and emit events");
  add_common(surveil, true);
  surveil->add_option("--baseline-end", options.baseline_end, "baseline cutoff date")
      ->required();
  surveil->add_option("--window", options.window_days, "window length in days");
  surveil->add_option("--growth-threshold", options.growth_threshold,
                      "records per window that count as growth");

  CLI::App* generate = app.add_subcommand("generate", "emit a synthetic corpus");
  add_common(generate, false);
  generate->add_option("--config", options.config_path, "JSON generator config");
  generate->add_option("--records", options.records, "number of background records");
  generate->add_option("--pathologies", options.pathologies, "pathology vocabulary size");
  generate->add_option("--agents", options.agents, "agent vocabulary size");
  generate->add_option("--occupations", options.occupations, "occupation vocabulary size");
  generate->add_option("--sectors", options.sectors, "sector vocabulary size");
  generate->add_option("--date-start", options.date_start, "first report date");
  generate->add_option("--date-end", options.date_end, "last report date");
  generate->add_option("--skew", options.skew, "Zipf exponent for element popularity");
  generate->add_option("--agent-count-probs", options.agent_count_probs,
                       "probabilities for 1..5 agents, comma separated");

  CLI::App* export_cmd =
      app.add_subcommand("export", "re-serialize a JSON graph artifact");
  add_common(export_cmd, true);

  try {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& arg : args) argv.push_back(arg.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed()) return detail::cmd_build(options, out, err, true);
    if (stats->parsed()) return detail::cmd_build(options, out, err, false);
    if (tripartite->parsed()) return detail::cmd_tripartite(options, out, err);
    if (surveil->parsed()) return detail::cmd_surveil(options, out, err);
    if (generate->parsed()) return detail::cmd_generate(options, generate, out, err);
    if (export_cmd->parsed()) return detail::cmd_export(options, out, err);
  } catch (const detail::UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const BadHeaderError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const BadHierarchyError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownCodeError& e) {
    err << "error: hierarchy table does not cover the corpus: " << e.what() << "\n";
    return 2;
  } catch (const GraphParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace exposome::cli
