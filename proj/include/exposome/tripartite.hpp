#pragma once
// Three-class projection of an identity ledger: pathology, agent and
// occupation vertices, with agent-occupation and agent-pathology edges only.
// Edge support counts accumulate identity weights, so the projection
// commutes with record deduplication.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "exposome/ingest.hpp"

namespace exposome {

struct TripartiteGraph {
  std::set<std::string> pathologies;
  std::set<std::string> agents;
  std::set<std::string> occupations;
  std::map<std::pair<std::string, std::string>, std::uint64_t> agent_occupation;
  std::map<std::pair<std::string, std::string>, std::uint64_t> agent_pathology;

  std::size_t vertex_count() const {
    return pathologies.size() + agents.size() + occupations.size();
  }
  std::size_t edge_count() const {
    return agent_occupation.size() + agent_pathology.size();
  }
  bool empty() const { return vertex_count() == 0; }

  friend bool operator==(const TripartiteGraph&, const TripartiteGraph&) = default;
};

// For every identity passing the pathology-prefix filter and every agent in
// its agent set, adds (agent, occupation) and (agent, pathology) edges
// carrying the identity weight. Vertex sets are exactly the endpoints used.
inline TripartiteGraph project_tripartite(const IdentityLedger& ledger,
                                          std::string_view pathology_prefix = {}) {
  TripartiteGraph graph;
  for (const auto& [identity, entry] : ledger) {
    if (!identity.pathology.starts_with(pathology_prefix)) continue;
    graph.pathologies.insert(identity.pathology);
    graph.occupations.insert(identity.occupation);
    for (const auto& agent : identity.agent_set) {
      graph.agents.insert(agent);
      graph.agent_occupation[{agent, identity.occupation}] += entry.weight;
      graph.agent_pathology[{agent, identity.pathology}] += entry.weight;
    }
  }
  return graph;
}

}  // namespace exposome
