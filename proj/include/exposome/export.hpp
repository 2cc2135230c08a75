#pragma once
// Deterministic writers: GraphML for attribute-rich interchange, DOT for
// quick rendering, JSON as the canonical machine format (and the only one
// read back). Vertices and edges are always emitted in lexicographic key
// order, so equal graphs serialize to identical bytes.

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "exposome/graph.hpp"
#include "exposome/surveil.hpp"
#include "exposome/tripartite.hpp"

namespace exposome {

namespace detail {

inline std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string dot_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& tokens, char sep = ';') {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += sep;
    out += token;
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exposome graph writers

inline void write_graphml(std::ostream& out, const ExposomeGraph& graph) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      << "  <key id=\"weight\" for=\"node\" attr.name=\"weight\" attr.type=\"long\"/>\n"
      << "  <key id=\"level\" for=\"node\" attr.name=\"level\" attr.type=\"string\"/>\n"
      << "  <key id=\"agent_elements\" for=\"node\" attr.name=\"agent_elements\" attr.type=\"long\"/>\n"
      << "  <key id=\"occupation_elements\" for=\"node\" attr.name=\"occupation_elements\" attr.type=\"long\"/>\n"
      << "  <key id=\"sector_elements\" for=\"node\" attr.name=\"sector_elements\" attr.type=\"long\"/>\n"
      << "  <key id=\"shared_agents\" for=\"edge\" attr.name=\"shared_agents\" attr.type=\"string\"/>\n"
      << "  <key id=\"shared_occupations\" for=\"edge\" attr.name=\"shared_occupations\" attr.type=\"string\"/>\n"
      << "  <key id=\"shared_sectors\" for=\"edge\" attr.name=\"shared_sectors\" attr.type=\"string\"/>\n"
      << "  <graph id=\"exposome\" edgedefault=\"undirected\">\n";
  const std::string level{to_string(graph.config().level)};
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& node = graph.nodes()[i];
    const auto tokens = graph.node_tokens(node);
    out << "    <node id=\"n" << i << "\">\n"
        << "      <data key=\"label\">" << detail::xml_escape(node.key.label())
        << "</data>\n"
        << "      <data key=\"weight\">" << node.weight << "</data>\n"
        << "      <data key=\"level\">" << level << "</data>\n"
        << "      <data key=\"agent_elements\">" << tokens[0].size() << "</data>\n"
        << "      <data key=\"occupation_elements\">" << tokens[1].size() << "</data>\n"
        << "      <data key=\"sector_elements\">" << tokens[2].size() << "</data>\n"
        << "    </node>\n";
  }
  std::size_t edge_id = 0;
  for (const auto& edge : graph.edges()) {
    const auto shared = graph.shared_tokens(edge);
    out << "    <edge id=\"e" << edge_id++ << "\" source=\"n" << edge.u << "\" target=\"n"
        << edge.v << "\">\n"
        << "      <data key=\"shared_agents\">" << detail::xml_escape(detail::join(shared[0]))
        << "</data>\n"
        << "      <data key=\"shared_occupations\">"
        << detail::xml_escape(detail::join(shared[1])) << "</data>\n"
        << "      <data key=\"shared_sectors\">" << detail::xml_escape(detail::join(shared[2]))
        << "</data>\n"
        << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

inline void write_dot(std::ostream& out, const ExposomeGraph& graph) {
  out << "graph exposome {\n";
  for (const auto& node : graph.nodes()) {
    out << "  \"" << detail::dot_escape(node.key.label()) << "\" [weight=" << node.weight
        << "];\n";
  }
  for (const auto& edge : graph.edges()) {
    const auto shared = graph.shared_tokens(edge);
    std::vector<std::string> parts;
    for (int d = 0; d < 3; ++d) {
      for (const auto& token : shared[d]) {
        parts.push_back(std::string{to_string(static_cast<Dim>(d))} + ":" + token);
      }
    }
    out << "  \"" << detail::dot_escape(graph.nodes()[edge.u].key.label()) << "\" -- \""
        << detail::dot_escape(graph.nodes()[edge.v].key.label()) << "\" [shared=\""
        << detail::dot_escape(detail::join(parts)) << "\"];\n";
  }
  out << "}\n";
}

inline nlohmann::ordered_json node_key_to_json(const NodeKey& key) {
  nlohmann::ordered_json object;
  object["pathology"] = key.pathology;
  if (!key.is_coarse()) {
    object["agents"] = key.agents;
    object["occupation"] = key.occupation;
    object["sector"] = key.sector;
  }
  return object;
}

inline NodeKey node_key_from_json(const nlohmann::json& object) {
  NodeKey key;
  key.pathology = object.at("pathology").get<std::string>();
  if (object.contains("agents")) {
    key.agents = object.at("agents").get<std::vector<std::string>>();
    key.occupation = object.at("occupation").get<std::string>();
    key.sector = object.at("sector").get<std::string>();
  }
  return key;
}

inline void write_json(std::ostream& out, const ExposomeGraph& graph) {
  out << "{\"format\":\"exposome-graph\",\"version\":1,";
  out << "\"level\":" << nlohmann::json(to_string(graph.config().level)).dump() << ",";
  nlohmann::json dims = nlohmann::json::array();
  for (Dim dim : kAllDims) {
    if (graph.config().dims.contains(dim)) dims.push_back(to_string(dim));
  }
  out << "\"dims\":" << dims.dump() << ",\"nodes\":[";
  // Nodes and edges stream one element per line to keep large graphs cheap.
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& node = graph.nodes()[i];
    nlohmann::ordered_json object;
    object["id"] = i;
    object["key"] = node_key_to_json(node.key);
    object["weight"] = node.weight;
    const auto tokens = graph.node_tokens(node);
    nlohmann::ordered_json elements;
    for (int d = 0; d < 3; ++d) elements[std::string{to_string(static_cast<Dim>(d))}] = tokens[d];
    object["elements"] = std::move(elements);
    out << (i == 0 ? "\n" : ",\n") << object.dump();
  }
  out << "],\"edges\":[";
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edges()[e];
    const auto shared = graph.shared_tokens(edge);
    nlohmann::ordered_json object;
    object["source"] = edge.u;
    object["target"] = edge.v;
    nlohmann::ordered_json shared_json;
    for (int d = 0; d < 3; ++d) {
      shared_json[std::string{to_string(static_cast<Dim>(d))}] = shared[d];
    }
    object["shared"] = std::move(shared_json);
    out << (e == 0 ? "\n" : ",\n") << object.dump();
  }
  out << "]}\n";
}

class GraphParseError : public std::runtime_error {
 public:
  explicit GraphParseError(const std::string& what) : std::runtime_error(what) {}
};

// Reads a document produced by write_json back into a graph.
inline ExposomeGraph import_graph_json(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", "") != "exposome-graph") {
    throw GraphParseError("input is not an exposome graph JSON document");
  }
  GraphConfig config;
  const auto level = parse_level(doc.at("level").get<std::string>());
  if (!level) throw GraphParseError("bad level in graph document");
  config.level = *level;
  DimSet dims;
  for (const auto& name : doc.at("dims")) {
    const auto dim = parse_dim(name.get<std::string>());
    if (!dim) throw GraphParseError("bad dimension in graph document");
    dims.add(*dim);
  }
  config.dims = dims;

  std::map<NodeKey, detail::NodeAccum> accums;
  for (const auto& entry : doc.at("nodes")) {
    NodeKey key = node_key_from_json(entry.at("key"));
    detail::NodeAccum accum;
    accum.weight = entry.at("weight").get<std::uint64_t>();
    const auto& elements = entry.at("elements");
    for (int d = 0; d < 3; ++d) {
      const std::string dim_name{to_string(static_cast<Dim>(d))};
      if (elements.contains(dim_name)) {
        accum.tokens[d] = elements.at(dim_name).get<std::vector<std::string>>();
      }
    }
    if (!accums.emplace(std::move(key), std::move(accum)).second) {
      throw GraphParseError("duplicate node key in graph document");
    }
  }
  // Edges are recomputed from the element sets rather than trusted from the
  // file; the shared-element rule stays the single source of truth.
  return detail::assemble_graph(config, std::move(accums), {});
}

// ---------------------------------------------------------------------------
// Tripartite writers. The vertex class rides along as an attribute.

inline void write_tripartite_graphml(std::ostream& out, const TripartiteGraph& graph) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      << "  <key id=\"class\" for=\"node\" attr.name=\"class\" attr.type=\"string\"/>\n"
      << "  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      << "  <key id=\"support\" for=\"edge\" attr.name=\"support\" attr.type=\"long\"/>\n"
      << "  <graph id=\"tripartite\" edgedefault=\"undirected\">\n";
  std::map<std::pair<std::string_view, std::string>, std::size_t> vertex_ids;
  auto emit_class = [&](std::string_view cls, const std::set<std::string>& tokens) {
    for (const auto& token : tokens) {
      const std::size_t id = vertex_ids.size();
      vertex_ids.emplace(std::pair{cls, token}, id);
      out << "    <node id=\"n" << id << "\">\n"
          << "      <data key=\"label\">" << detail::xml_escape(token) << "</data>\n"
          << "      <data key=\"class\">" << cls << "</data>\n"
          << "    </node>\n";
    }
  };
  emit_class("pathology", graph.pathologies);
  emit_class("agent", graph.agents);
  emit_class("occupation", graph.occupations);

  std::size_t edge_id = 0;
  auto emit_edges = [&](const auto& edges, std::string_view kind, std::string_view cls) {
    for (const auto& [pair, support] : edges) {
      out << "    <edge id=\"e" << edge_id++ << "\" source=\"n"
          << vertex_ids.at({"agent", pair.first}) << "\" target=\"n"
          << vertex_ids.at({cls, pair.second}) << "\">\n"
          << "      <data key=\"kind\">" << kind << "</data>\n"
          << "      <data key=\"support\">" << support << "</data>\n"
          << "    </edge>\n";
    }
  };
  emit_edges(graph.agent_occupation, "agent-occupation", "occupation");
  emit_edges(graph.agent_pathology, "agent-pathology", "pathology");
  out << "  </graph>\n</graphml>\n";
}

inline void write_tripartite_dot(std::ostream& out, const TripartiteGraph& graph) {
  out << "graph tripartite {\n";
  auto emit_class = [&](std::string_view cls, const std::set<std::string>& tokens,
                        std::string_view shape) {
    for (const auto& token : tokens) {
      out << "  \"" << cls << ":" << detail::dot_escape(token) << "\" [class=" << cls
          << ", shape=" << shape << "];\n";
    }
  };
  // Mirrors the usual rendering: circles for diseases, squares for agents,
  // triangles for occupations.
  emit_class("pathology", graph.pathologies, "circle");
  emit_class("agent", graph.agents, "square");
  emit_class("occupation", graph.occupations, "triangle");
  for (const auto& [pair, support] : graph.agent_occupation) {
    out << "  \"agent:" << detail::dot_escape(pair.first) << "\" -- \"occupation:"
        << detail::dot_escape(pair.second) << "\" [support=" << support << "];\n";
  }
  for (const auto& [pair, support] : graph.agent_pathology) {
    out << "  \"agent:" << detail::dot_escape(pair.first) << "\" -- \"pathology:"
        << detail::dot_escape(pair.second) << "\" [support=" << support << "];\n";
  }
  out << "}\n";
}

inline void write_tripartite_json(std::ostream& out, const TripartiteGraph& graph) {
  nlohmann::ordered_json doc;
  doc["format"] = "exposome-tripartite";
  doc["version"] = 1;
  auto vertices = nlohmann::ordered_json::array();
  auto emit_class = [&](std::string_view cls, const std::set<std::string>& tokens) {
    for (const auto& token : tokens) {
      vertices.push_back({{"id", token}, {"class", std::string{cls}}});
    }
  };
  emit_class("pathology", graph.pathologies);
  emit_class("agent", graph.agents);
  emit_class("occupation", graph.occupations);
  doc["vertices"] = std::move(vertices);
  auto edges = nlohmann::ordered_json::array();
  auto emit_edges = [&](const auto& family, std::string_view kind) {
    for (const auto& [pair, support] : family) {
      edges.push_back({{"agent", pair.first},
                       {"other", pair.second},
                       {"kind", std::string{kind}},
                       {"support", support}});
    }
  };
  emit_edges(graph.agent_occupation, "agent-occupation");
  emit_edges(graph.agent_pathology, "agent-pathology");
  doc["edges"] = std::move(edges);
  out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Emergence events as JSON Lines

inline std::string event_to_json_line(const EmergenceEvent& event) {
  nlohmann::ordered_json object;
  object["kind"] = to_string(event.kind);
  object["window_start"] = event.window_start.to_string();
  object["window_end"] = event.window_end.to_string();
  if (event.kind == EventKind::NewConnection) {
    object["subject"] =
        nlohmann::ordered_json::array({node_key_to_json(event.subject),
                                       node_key_to_json(event.subject2)});
    nlohmann::ordered_json shared;
    for (int d = 0; d < 3; ++d) {
      shared[std::string{to_string(static_cast<Dim>(d))}] = event.shared[d];
    }
    object["shared"] = std::move(shared);
  } else {
    object["subject"] = node_key_to_json(event.subject);
    object["shared"] = nullptr;
  }
  object["evidence"] = event.evidence;
  return object.dump();
}

// ---------------------------------------------------------------------------
// Run statistics

struct DistributionSummary {
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  double mean = 0.0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;  // value -> frequency

  static DistributionSummary of(const std::vector<std::uint64_t>& values) {
    DistributionSummary summary;
    if (values.empty()) return summary;
    std::map<std::uint64_t, std::uint64_t> histogram;
    std::uint64_t total = 0;
    summary.min = values.front();
    summary.max = values.front();
    for (const std::uint64_t value : values) {
      summary.min = std::min(summary.min, value);
      summary.max = std::max(summary.max, value);
      total += value;
      ++histogram[value];
    }
    summary.mean = static_cast<double>(total) / static_cast<double>(values.size());
    summary.counts.assign(histogram.begin(), histogram.end());
    return summary;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json object;
    object["min"] = min;
    object["max"] = max;
    object["mean"] = mean;
    auto counts_json = nlohmann::ordered_json::array();
    for (const auto& [value, frequency] : counts) {
      counts_json.push_back({value, frequency});
    }
    object["counts"] = std::move(counts_json);
    return object;
  }
};

struct StatsReport {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  std::uint64_t components = 0;
  std::uint64_t isolated = 0;
  DistributionSummary node_weight;
  DistributionSummary degree;
  DistributionSummary multi_exposure;
  std::vector<HubElement> hub_elements;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json object;
    object["accepted"] = accepted;
    object["rejected"] = rejected;
    object["nodes"] = nodes;
    object["edges"] = edges;
    object["components"] = components;
    object["isolated"] = isolated;
    object["node_weight"] = node_weight.to_json();
    object["degree"] = degree.to_json();
    object["multi_exposure"] = multi_exposure.to_json();
    auto hubs = nlohmann::ordered_json::array();
    for (const auto& hub : hub_elements) {
      hubs.push_back({{"dim", std::string{to_string(hub.dim)}},
                      {"element", hub.token},
                      {"nodes", hub.node_count}});
    }
    object["hub_elements"] = std::move(hubs);
    return object;
  }
};

inline StatsReport make_stats(std::uint64_t accepted, std::uint64_t rejected,
                              const ExposomeGraph& graph) {
  StatsReport report;
  report.accepted = accepted;
  report.rejected = rejected;
  report.nodes = graph.node_count();
  report.edges = graph.edge_count();
  const Components comps = components(graph);
  report.components = comps.groups.size();
  report.isolated = comps.isolated_count;

  std::vector<std::uint64_t> weights, degrees, exposures;
  weights.reserve(graph.node_count());
  const auto metrics = node_metrics(graph);
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    weights.push_back(graph.nodes()[i].weight);
    degrees.push_back(metrics[i].degree);
    exposures.push_back(metrics[i].multi_exposure);
  }
  report.node_weight = DistributionSummary::of(weights);
  report.degree = DistributionSummary::of(degrees);
  report.multi_exposure = DistributionSummary::of(exposures);
  report.hub_elements = graph.hub_elements();
  return report;
}

}  // namespace exposome
