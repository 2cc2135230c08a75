#pragma once
// The exposome network: one node per OHP identity (or per pathology group at
// coarser levels) weighted by multiplicity, one undirected edge per pair of
// nodes sharing at least one exposure element in the configured dimensions.
// Construction goes through an inverted element index, so work is bounded by
// co-exposure frequency instead of the quadratic pair count; a definitional
// quadratic mode is kept for oracle checks and must produce equal output.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "exposome/ingest.hpp"
#include "exposome/ohp.hpp"

namespace exposome {

enum class Dim : std::uint8_t { Agent = 0, Occupation = 1, Sector = 2 };

inline constexpr std::array<Dim, 3> kAllDims = {Dim::Agent, Dim::Occupation, Dim::Sector};

inline std::string_view to_string(Dim dim) {
  switch (dim) {
    case Dim::Agent: return "agent";
    case Dim::Occupation: return "occupation";
    case Dim::Sector: return "sector";
  }
  return "?";
}

inline std::optional<Dim> parse_dim(std::string_view text) {
  if (text == "agent") return Dim::Agent;
  if (text == "occupation") return Dim::Occupation;
  if (text == "sector") return Dim::Sector;
  return std::nullopt;
}

// Subset of {Agent, Occupation, Sector} as a small bitmask.
class DimSet {
 public:
  constexpr DimSet() = default;
  constexpr DimSet(std::initializer_list<Dim> dims) {
    for (Dim d : dims) add(d);
  }

  static constexpr DimSet all() { return {Dim::Agent, Dim::Occupation, Dim::Sector}; }

  // Comma-separated dimension names, e.g. "agent,sector".
  static std::optional<DimSet> parse(std::string_view text) {
    DimSet dims;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto len = comma == std::string_view::npos ? text.size() - start : comma - start;
      const auto dim = parse_dim(trim(text.substr(start, len)));
      if (!dim) return std::nullopt;
      dims.add(*dim);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (dims.empty()) return std::nullopt;
    return dims;
  }

  constexpr void add(Dim dim) { mask_ |= static_cast<std::uint8_t>(1u << static_cast<int>(dim)); }
  constexpr bool contains(Dim dim) const {
    return mask_ & (1u << static_cast<int>(dim));
  }
  constexpr bool empty() const { return mask_ == 0; }

  std::string to_string() const {
    std::string s;
    for (Dim dim : kAllDims) {
      if (!contains(dim)) continue;
      if (!s.empty()) s += ',';
      s += exposome::to_string(dim);
    }
    return s;
  }

  friend constexpr auto operator<=>(const DimSet&, const DimSet&) = default;

 private:
  std::uint8_t mask_ = 0;
};

struct GraphConfig {
  DimSet dims = DimSet::all();
  PathologyLevel level = PathologyLevel::Disease;

  friend bool operator==(const GraphConfig&, const GraphConfig&) = default;
};

// Node key: the pathology code at the graph's level, extended with the full
// identity at Disease level so distinct exposures stay distinct nodes.
struct NodeKey {
  std::string pathology;
  std::vector<std::string> agents;  // empty at coarse levels
  std::string occupation;
  std::string sector;

  static NodeKey from_identity(const OhpIdentity& identity) {
    return {identity.pathology, identity.agent_set, identity.occupation, identity.sector};
  }
  static NodeKey coarse(std::string code) { return {std::move(code), {}, {}, {}}; }

  bool is_coarse() const {
    return agents.empty() && occupation.empty() && sector.empty();
  }

  std::string label() const {
    if (is_coarse()) return pathology;
    std::string joined;
    for (const auto& agent : agents) {
      if (!joined.empty()) joined += ';';
      joined += agent;
    }
    return pathology + "|" + occupation + "|" + sector + "|" + joined;
  }

  friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
};

// Every exposure element of a graph gets a dense id; ids are assigned in
// (dimension, token) order, so a sorted id list is also grouped by dimension.
class ElementTable {
 public:
  ElementTable() { offsets_.fill(0); }

  static ElementTable from_tokens(std::array<std::vector<std::string>, 3> by_dim) {
    ElementTable table;
    for (auto& tokens : by_dim) {
      std::sort(tokens.begin(), tokens.end());
      tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    }
    table.by_dim_ = std::move(by_dim);
    table.offsets_[0] = 0;
    for (int d = 0; d < 3; ++d) {
      table.offsets_[d + 1] =
          table.offsets_[d] + static_cast<std::uint32_t>(table.by_dim_[d].size());
    }
    return table;
  }

  std::uint32_t size() const { return offsets_[3]; }

  Dim dim_of(std::uint32_t id) const {
    if (id < offsets_[1]) return Dim::Agent;
    if (id < offsets_[2]) return Dim::Occupation;
    return Dim::Sector;
  }

  const std::string& token_of(std::uint32_t id) const {
    const int d = static_cast<int>(dim_of(id));
    return by_dim_[d][id - offsets_[d]];
  }

  std::optional<std::uint32_t> id_of(Dim dim, std::string_view token) const {
    const int d = static_cast<int>(dim);
    const auto& tokens = by_dim_[d];
    const auto it = std::lower_bound(tokens.begin(), tokens.end(), token);
    if (it == tokens.end() || *it != token) return std::nullopt;
    return offsets_[d] + static_cast<std::uint32_t>(it - tokens.begin());
  }

  std::uint32_t dim_begin(Dim dim) const { return offsets_[static_cast<int>(dim)]; }
  std::uint32_t dim_end(Dim dim) const { return offsets_[static_cast<int>(dim) + 1]; }

  friend bool operator==(const ElementTable&, const ElementTable&) = default;

 private:
  std::array<std::vector<std::string>, 3> by_dim_;
  std::array<std::uint32_t, 4> offsets_;
};

struct ExposomeNode {
  NodeKey key;
  std::uint64_t weight = 0;
  std::vector<std::uint32_t> elements;  // sorted element ids, all dimensions

  friend bool operator==(const ExposomeNode&, const ExposomeNode&) = default;
};

struct ExposomeEdge {
  std::uint32_t u = 0;  // node indices, u < v
  std::uint32_t v = 0;
  std::uint64_t shared_offset = 0;  // slice of the graph's shared-id pool
  std::uint32_t shared_count = 0;
};

struct HubElement {
  Dim dim;
  std::string token;
  std::size_t node_count = 0;

  friend bool operator==(const HubElement&, const HubElement&) = default;
};

struct BuildOptions {
  bool quadratic = false;        // definitional O(n^2) pass, for oracle checks
  unsigned threads = 1;          // index buckets may be scanned in parallel
  std::size_t hub_threshold = 5000;  // elements on more nodes get reported
};

class LevelNotCoarserError : public std::runtime_error {
 public:
  LevelNotCoarserError()
      : std::runtime_error("LEVEL_NOT_COARSER: target level must be coarser") {}
};

class ExposomeGraph {
 public:
  ExposomeGraph() = default;
  ExposomeGraph(GraphConfig config, ElementTable elements, std::vector<ExposomeNode> nodes,
                std::vector<ExposomeEdge> edges, std::vector<std::uint32_t> shared_pool,
                std::vector<HubElement> hubs)
      : config_(config),
        elements_(std::move(elements)),
        nodes_(std::move(nodes)),
        edges_(std::move(edges)),
        shared_pool_(std::move(shared_pool)),
        hubs_(std::move(hubs)) {}

  const GraphConfig& config() const { return config_; }
  const ElementTable& elements() const { return elements_; }
  const std::vector<ExposomeNode>& nodes() const { return nodes_; }
  const std::vector<ExposomeEdge>& edges() const { return edges_; }
  const std::vector<HubElement>& hub_elements() const { return hubs_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const std::uint32_t> shared_ids(const ExposomeEdge& edge) const {
    return {shared_pool_.data() + edge.shared_offset, edge.shared_count};
  }

  // Shared tokens of an edge, grouped per dimension (Agent, Occupation, Sector).
  std::array<std::vector<std::string>, 3> shared_tokens(const ExposomeEdge& edge) const {
    std::array<std::vector<std::string>, 3> out;
    for (std::uint32_t id : shared_ids(edge)) {
      out[static_cast<int>(elements_.dim_of(id))].push_back(elements_.token_of(id));
    }
    return out;
  }

  std::array<std::vector<std::string>, 3> node_tokens(const ExposomeNode& node) const {
    std::array<std::vector<std::string>, 3> out;
    for (std::uint32_t id : node.elements) {
      out[static_cast<int>(elements_.dim_of(id))].push_back(elements_.token_of(id));
    }
    return out;
  }

  std::optional<std::uint32_t> find_node(const NodeKey& key) const {
    const auto it = std::lower_bound(
        nodes_.begin(), nodes_.end(), key,
        [](const ExposomeNode& node, const NodeKey& k) { return node.key < k; });
    if (it == nodes_.end() || it->key != key) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes_.begin());
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> degree(nodes_.size(), 0);
    for (const auto& edge : edges_) {
      ++degree[edge.u];
      ++degree[edge.v];
    }
    return degree;
  }

  // Hub reports are derived diagnostics and deliberately not part of equality.
  friend bool operator==(const ExposomeGraph& a, const ExposomeGraph& b) {
    if (a.config_ != b.config_ || a.elements_ != b.elements_ || a.nodes_ != b.nodes_) {
      return false;
    }
    if (a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      const auto& ea = a.edges_[i];
      const auto& eb = b.edges_[i];
      if (ea.u != eb.u || ea.v != eb.v) return false;
      const auto sa = a.shared_ids(ea);
      const auto sb = b.shared_ids(eb);
      if (!std::equal(sa.begin(), sa.end(), sb.begin(), sb.end())) return false;
    }
    return true;
  }

 private:
  GraphConfig config_;
  ElementTable elements_;
  std::vector<ExposomeNode> nodes_;
  std::vector<ExposomeEdge> edges_;
  std::vector<std::uint32_t> shared_pool_;
  std::vector<HubElement> hubs_;
};

namespace detail {

struct NodeAccum {
  std::uint64_t weight = 0;
  std::array<std::vector<std::string>, 3> tokens;
};

struct PairTriple {
  std::uint32_t u, v, id;
  friend bool operator<(const PairTriple& a, const PairTriple& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.id < b.id;
  }
};

inline void append_unique_sorted(std::vector<std::string>& tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
}

// Shared edge-construction core over prepared nodes.
inline ExposomeGraph assemble_graph(GraphConfig config,
                                    std::map<NodeKey, NodeAccum>&& accums,
                                    const BuildOptions& options) {
  if (config.dims.empty()) {
    throw std::invalid_argument("graph config requires at least one dimension");
  }

  std::array<std::vector<std::string>, 3> universe;
  for (auto& [key, accum] : accums) {
    for (int d = 0; d < 3; ++d) {
      append_unique_sorted(accum.tokens[d]);
      universe[d].insert(universe[d].end(), accum.tokens[d].begin(),
                         accum.tokens[d].end());
    }
  }
  ElementTable table = ElementTable::from_tokens(std::move(universe));

  std::vector<ExposomeNode> nodes;
  nodes.reserve(accums.size());
  for (auto& [key, accum] : accums) {
    ExposomeNode node;
    node.key = key;
    node.weight = accum.weight;
    for (int d = 0; d < 3; ++d) {
      for (const auto& token : accum.tokens[d]) {
        node.elements.push_back(*table.id_of(static_cast<Dim>(d), token));
      }
    }
    std::sort(node.elements.begin(), node.elements.end());
    nodes.push_back(std::move(node));
  }
  accums.clear();

  std::vector<ExposomeEdge> edges;
  std::vector<std::uint32_t> shared_pool;
  std::vector<HubElement> hubs;

  auto in_dims = [&](std::uint32_t id) { return config.dims.contains(table.dim_of(id)); };

  if (options.quadratic) {
    // Definitional algorithm: intersect every pair's element sets.
    std::vector<std::uint32_t> shared;
    for (std::uint32_t i = 0; i < nodes.size(); ++i) {
      for (std::uint32_t j = i + 1; j < nodes.size(); ++j) {
        shared.clear();
        std::set_intersection(nodes[i].elements.begin(), nodes[i].elements.end(),
                              nodes[j].elements.begin(), nodes[j].elements.end(),
                              std::back_inserter(shared));
        std::erase_if(shared, [&](std::uint32_t id) { return !in_dims(id); });
        if (shared.empty()) continue;
        edges.push_back({i, j, shared_pool.size(),
                         static_cast<std::uint32_t>(shared.size())});
        shared_pool.insert(shared_pool.end(), shared.begin(), shared.end());
      }
    }
    // Hub accounting matches the indexed path.
    std::vector<std::size_t> bucket_sizes(table.size(), 0);
    for (const auto& node : nodes) {
      for (std::uint32_t id : node.elements) ++bucket_sizes[id];
    }
    for (std::uint32_t id = 0; id < table.size(); ++id) {
      if (in_dims(id) && bucket_sizes[id] > options.hub_threshold) {
        hubs.push_back({table.dim_of(id), table.token_of(id), bucket_sizes[id]});
      }
    }
    return ExposomeGraph(config, std::move(table), std::move(nodes), std::move(edges),
                         std::move(shared_pool), std::move(hubs));
  }

  // Inverted index: element id -> nodes carrying it (ascending, since nodes
  // are visited in key order).
  std::vector<std::vector<std::uint32_t>> buckets(table.size());
  for (std::uint32_t n = 0; n < nodes.size(); ++n) {
    for (std::uint32_t id : nodes[n].elements) {
      if (in_dims(id)) buckets[id].push_back(n);
    }
  }

  const unsigned threads = std::max(1u, options.threads);
  std::vector<std::vector<PairTriple>> triples_per_thread(threads);
  std::vector<std::vector<HubElement>> hubs_per_thread(threads);

  auto scan_range = [&](unsigned t, std::uint32_t begin, std::uint32_t end) {
    auto& triples = triples_per_thread[t];
    for (std::uint32_t id = begin; id < end; ++id) {
      const auto& bucket = buckets[id];
      if (bucket.size() > options.hub_threshold) {
        hubs_per_thread[t].push_back({table.dim_of(id), table.token_of(id), bucket.size()});
      }
      for (std::size_t i = 0; i < bucket.size(); ++i) {
        for (std::size_t j = i + 1; j < bucket.size(); ++j) {
          triples.push_back({bucket[i], bucket[j], id});
        }
      }
    }
  };

  if (threads == 1) {
    scan_range(0, 0, table.size());
  } else {
    std::vector<std::thread> workers;
    const std::uint32_t chunk = (table.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint32_t begin = std::min<std::uint32_t>(t * chunk, table.size());
      const std::uint32_t end = std::min<std::uint32_t>(begin + chunk, table.size());
      workers.emplace_back(scan_range, t, begin, end);
    }
    for (auto& worker : workers) worker.join();
  }

  std::size_t total = 0;
  for (const auto& triples : triples_per_thread) total += triples.size();
  std::vector<PairTriple> triples;
  triples.reserve(total);
  for (auto& part : triples_per_thread) {
    triples.insert(triples.end(), part.begin(), part.end());
    part.clear();
    part.shrink_to_fit();
  }
  std::sort(triples.begin(), triples.end());

  shared_pool.reserve(triples.size());
  for (std::size_t i = 0; i < triples.size();) {
    std::size_t j = i;
    const std::uint64_t offset = shared_pool.size();
    while (j < triples.size() && triples[j].u == triples[i].u && triples[j].v == triples[i].v) {
      shared_pool.push_back(triples[j].id);
      ++j;
    }
    edges.push_back({triples[i].u, triples[i].v, offset,
                     static_cast<std::uint32_t>(j - i)});
    i = j;
  }

  for (auto& part : hubs_per_thread) {
    hubs.insert(hubs.end(), part.begin(), part.end());
  }

  return ExposomeGraph(config, std::move(table), std::move(nodes), std::move(edges),
                       std::move(shared_pool), std::move(hubs));
}

}  // namespace detail

// Builds the exposome network from a ledger. Nodes group identities by
// pathology_at(pathology, level); at Disease level each identity is its own
// node. Edges connect nodes sharing an element in any configured dimension.
inline ExposomeGraph build_graph(const IdentityLedger& ledger, const GraphConfig& config,
                                 const HierarchyTable* hierarchy = nullptr,
                                 const BuildOptions& options = {}) {
  std::map<NodeKey, detail::NodeAccum> accums;
  for (const auto& [identity, entry] : ledger) {
    NodeKey key = config.level == PathologyLevel::Disease
                      ? NodeKey::from_identity(identity)
                      : NodeKey::coarse(pathology_at(identity.pathology, config.level,
                                                     hierarchy));
    auto& accum = accums[std::move(key)];
    accum.weight += entry.weight;
    auto& agent_tokens = accum.tokens[static_cast<int>(Dim::Agent)];
    agent_tokens.insert(agent_tokens.end(), identity.agent_set.begin(),
                        identity.agent_set.end());
    accum.tokens[static_cast<int>(Dim::Occupation)].push_back(identity.occupation);
    accum.tokens[static_cast<int>(Dim::Sector)].push_back(identity.sector);
  }
  return detail::assemble_graph(config, std::move(accums), options);
}

// Regroups an existing graph at a strictly coarser level. Equal to rebuilding
// from the original ledger at that level.
inline ExposomeGraph aggregate(const ExposomeGraph& graph, PathologyLevel level,
                               const HierarchyTable* hierarchy = nullptr,
                               const BuildOptions& options = {}) {
  if (!is_coarser(level, graph.config().level)) throw LevelNotCoarserError();
  std::map<NodeKey, detail::NodeAccum> accums;
  for (const auto& node : graph.nodes()) {
    NodeKey key = NodeKey::coarse(pathology_at(node.key.pathology, level, hierarchy));
    auto& accum = accums[std::move(key)];
    accum.weight += node.weight;
    for (std::uint32_t id : node.elements) {
      accum.tokens[static_cast<int>(graph.elements().dim_of(id))].push_back(
          graph.elements().token_of(id));
    }
  }
  GraphConfig config{graph.config().dims, level};
  return detail::assemble_graph(config, std::move(accums), options);
}

// ---------------------------------------------------------------------------
// Structural queries

struct Components {
  std::vector<std::uint32_t> component_of;         // node index -> component id
  std::vector<std::vector<std::uint32_t>> groups;  // sorted members, by first member
  std::size_t isolated_count = 0;                  // degree-0 nodes
};

inline Components components(const ExposomeGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& edge : graph.edges()) {
    const auto ru = find(edge.u);
    const auto rv = find(edge.v);
    if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
  }

  Components result;
  result.component_of.resize(n);
  std::map<std::uint32_t, std::uint32_t> component_ids;  // root -> dense id
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto root = find(i);
    auto [it, inserted] =
        component_ids.emplace(root, static_cast<std::uint32_t>(result.groups.size()));
    if (inserted) result.groups.emplace_back();
    result.component_of[i] = it->second;
    result.groups[it->second].push_back(i);
  }

  const auto degree = graph.degrees();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (degree[i] == 0) ++result.isolated_count;
  }
  return result;
}

struct NodeMetrics {
  std::size_t degree = 0;
  std::size_t multi_exposure = 0;  // distinct exposure elements across config dims
  std::size_t diversity = 0;       // distinct neighbours

  friend bool operator==(const NodeMetrics&, const NodeMetrics&) = default;
};

inline std::vector<NodeMetrics> node_metrics(const ExposomeGraph& graph) {
  std::vector<NodeMetrics> metrics(graph.node_count());
  const auto degree = graph.degrees();
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    metrics[i].degree = degree[i];
    metrics[i].diversity = degree[i];  // the graph is simple
    std::size_t elements = 0;
    for (std::uint32_t id : graph.nodes()[i].elements) {
      if (graph.config().dims.contains(graph.elements().dim_of(id))) ++elements;
    }
    metrics[i].multi_exposure = elements;
  }
  return metrics;
}

}  // namespace exposome
