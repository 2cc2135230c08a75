#pragma once
// Temporal surveillance: replay a dated record stream against a baseline and
// emit emergence events per fixed-length window.
//   NEW_NODE       a node key never seen in any earlier history
//   NEW_CONNECTION a first-time edge between two nodes that both pre-existed
//   WEIGHT_GROWTH  a node gaining at least growth_threshold records in one window
// A connection whose endpoint first appears in the same window is attributed
// to that NEW_NODE and not reported separately.
//
// The replay is incremental (per-element index deltas); diff_graphs() gives
// the definitional full-rebuild comparison used to cross-check it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "exposome/dates.hpp"
#include "exposome/graph.hpp"
#include "exposome/ingest.hpp"
#include "exposome/ohp.hpp"

namespace exposome {

struct SurveillanceConfig {
  GraphConfig graph;
  Date baseline_end;
  std::int32_t window_days = 30;       // >= 1
  std::uint64_t growth_threshold = 3;  // records per window, >= 1
};

enum class EventKind { NewNode, NewConnection, WeightGrowth };

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NewNode: return "NEW_NODE";
    case EventKind::NewConnection: return "NEW_CONNECTION";
    case EventKind::WeightGrowth: return "WEIGHT_GROWTH";
  }
  return "?";
}

struct EmergenceEvent {
  EventKind kind = EventKind::NewNode;
  Date window_start;
  Date window_end;
  NodeKey subject;
  NodeKey subject2;  // NewConnection only; subject < subject2
  std::array<std::vector<std::string>, 3> shared;  // NewConnection only, per Dim
  std::vector<std::string> evidence;               // sorted record ids, non-empty

  friend bool operator==(const EmergenceEvent&, const EmergenceEvent&) = default;
};

class ConfigMismatchError : public std::runtime_error {
 public:
  ConfigMismatchError()
      : std::runtime_error("CONFIG_MISMATCH: graphs built with different configs") {}
};

// Node-key and edge-key set differences between two graphs of equal config.
struct GraphDiff {
  std::vector<NodeKey> added_nodes;
  std::vector<std::pair<NodeKey, NodeKey>> added_edges;

  bool empty() const { return added_nodes.empty() && added_edges.empty(); }
};

inline GraphDiff diff_graphs(const ExposomeGraph& before, const ExposomeGraph& after) {
  if (before.config() != after.config()) throw ConfigMismatchError();
  GraphDiff diff;
  for (const auto& node : after.nodes()) {
    if (!before.find_node(node.key)) diff.added_nodes.push_back(node.key);
  }
  std::set<std::pair<NodeKey, NodeKey>> before_edges;
  for (const auto& edge : before.edges()) {
    before_edges.emplace(before.nodes()[edge.u].key, before.nodes()[edge.v].key);
  }
  for (const auto& edge : after.edges()) {
    std::pair<NodeKey, NodeKey> key{after.nodes()[edge.u].key, after.nodes()[edge.v].key};
    if (!before_edges.contains(key)) diff.added_edges.push_back(std::move(key));
  }
  return diff;
}

namespace detail {

// Replay state: node element sets (restricted to configured dimensions) and
// an inverted element index, both keyed by dense internal ids.
struct ReplayState {
  std::map<NodeKey, std::uint32_t> node_ids;
  std::vector<NodeKey> keys;
  std::vector<std::set<std::pair<Dim, std::string>>> node_elements;
  std::map<std::pair<Dim, std::string>, std::vector<std::uint32_t>> element_nodes;
  std::set<std::pair<std::uint32_t, std::uint32_t>> connected;

  std::uint32_t intern_node(const NodeKey& key, bool& inserted) {
    auto [it, fresh] = node_ids.try_emplace(key, static_cast<std::uint32_t>(keys.size()));
    inserted = fresh;
    if (fresh) {
      keys.push_back(key);
      node_elements.emplace_back();
    }
    return it->second;
  }
};

inline std::vector<std::pair<Dim, std::string>> identity_elements(
    const OhpIdentity& identity, DimSet dims) {
  std::vector<std::pair<Dim, std::string>> elements;
  if (dims.contains(Dim::Agent)) {
    for (const auto& agent : identity.agent_set) elements.emplace_back(Dim::Agent, agent);
  }
  if (dims.contains(Dim::Occupation)) elements.emplace_back(Dim::Occupation, identity.occupation);
  if (dims.contains(Dim::Sector)) elements.emplace_back(Dim::Sector, identity.sector);
  return elements;
}

}  // namespace detail

// Replays records through consecutive windows after the baseline. Records are
// sorted stably by (date, record_id) first; an empty stream is a no-op.
inline std::vector<EmergenceEvent> replay(std::vector<OhpRecord> records,
                                          const SurveillanceConfig& config,
                                          const HierarchyTable* hierarchy = nullptr) {
  if (config.window_days < 1) {
    throw std::invalid_argument("surveillance window must be at least one day");
  }
  if (config.growth_threshold < 1) {
    throw std::invalid_argument("growth threshold must be at least one record");
  }
  std::vector<EmergenceEvent> events;
  if (records.empty()) return events;  // EMPTY_STREAM: a no-op run

  std::stable_sort(records.begin(), records.end(),
                   [](const OhpRecord& a, const OhpRecord& b) {
                     if (a.reported_on != b.reported_on) return a.reported_on < b.reported_on;
                     return a.record_id < b.record_id;
                   });

  detail::ReplayState state;

  auto node_key_of = [&](const OhpIdentity& identity) {
    return config.graph.level == PathologyLevel::Disease
               ? NodeKey::from_identity(identity)
               : NodeKey::coarse(
                     pathology_at(identity.pathology, config.graph.level, hierarchy));
  };

  // Ingests one record; when `track` is set, records node creations and
  // per-node element additions for the current window.
  std::map<std::uint32_t, std::vector<std::pair<Dim, std::string>>> window_delta;
  std::set<std::uint32_t> window_new_nodes;
  std::map<std::uint32_t, std::vector<std::string>> window_records;

  auto ingest = [&](const OhpRecord& record, bool track) {
    const OhpIdentity identity = identity_of(record);
    bool fresh = false;
    const std::uint32_t node = state.intern_node(node_key_of(identity), fresh);
    if (track) {
      if (fresh) window_new_nodes.insert(node);
      window_records[node].push_back(record.record_id);
    }
    for (auto& element : detail::identity_elements(identity, config.graph.dims)) {
      if (!state.node_elements[node].insert(element).second) continue;
      state.element_nodes[element].push_back(node);
      if (track) window_delta[node].push_back(element);
    }
  };

  std::size_t next = 0;
  while (next < records.size() && records[next].reported_on <= config.baseline_end) {
    ingest(records[next], false);
    ++next;
  }
  // Baseline pairs are connected from the start; record them without events.
  for (const auto& [element, bucket] : state.element_nodes) {
    for (std::size_t i = 0; i < bucket.size(); ++i) {
      for (std::size_t j = i + 1; j < bucket.size(); ++j) {
        state.connected.emplace(std::min(bucket[i], bucket[j]),
                                std::max(bucket[i], bucket[j]));
      }
    }
  }

  while (next < records.size()) {
    const std::int32_t offset =
        days_between(config.baseline_end, records[next].reported_on) - 1;
    const std::int32_t window_index = offset / config.window_days;
    const Date window_start =
        config.baseline_end.plus_days(window_index * config.window_days + 1);
    const Date window_end = window_start.plus_days(config.window_days - 1);

    window_delta.clear();
    window_new_nodes.clear();
    window_records.clear();
    while (next < records.size() && records[next].reported_on <= window_end) {
      ingest(records[next], true);
      ++next;
    }

    // New connections reachable from this window's element additions.
    std::set<std::pair<std::uint32_t, std::uint32_t>> candidate_pairs;
    for (const auto& [node, elements] : window_delta) {
      for (const auto& element : elements) {
        for (const std::uint32_t other : state.element_nodes[element]) {
          if (other == node) continue;
          candidate_pairs.emplace(std::min(node, other), std::max(node, other));
        }
      }
    }

    std::vector<EmergenceEvent> node_events;
    for (const auto& [node, record_ids] : window_records) {
      if (!window_new_nodes.contains(node)) continue;
      EmergenceEvent event;
      event.kind = EventKind::NewNode;
      event.window_start = window_start;
      event.window_end = window_end;
      event.subject = state.keys[node];
      event.evidence = record_ids;
      std::sort(event.evidence.begin(), event.evidence.end());
      event.evidence.erase(std::unique(event.evidence.begin(), event.evidence.end()),
                           event.evidence.end());
      node_events.push_back(std::move(event));
    }
    std::sort(node_events.begin(), node_events.end(),
              [](const EmergenceEvent& a, const EmergenceEvent& b) {
                return a.subject < b.subject;
              });
    for (auto& event : node_events) events.push_back(std::move(event));

    std::vector<EmergenceEvent> connection_events;
    for (const auto& pair : candidate_pairs) {
      if (!state.connected.insert(pair).second) continue;  // already connected
      if (window_new_nodes.contains(pair.first) || window_new_nodes.contains(pair.second)) {
        continue;  // attributed to the NEW_NODE
      }
      EmergenceEvent event;
      event.kind = EventKind::NewConnection;
      event.window_start = window_start;
      event.window_end = window_end;
      NodeKey a = state.keys[pair.first];
      NodeKey b = state.keys[pair.second];
      if (b < a) std::swap(a, b);
      event.subject = std::move(a);
      event.subject2 = std::move(b);
      std::vector<std::pair<Dim, std::string>> shared;
      std::set_intersection(state.node_elements[pair.first].begin(),
                            state.node_elements[pair.first].end(),
                            state.node_elements[pair.second].begin(),
                            state.node_elements[pair.second].end(),
                            std::back_inserter(shared));
      for (auto& [dim, token] : shared) {
        event.shared[static_cast<int>(dim)].push_back(std::move(token));
      }
      // Evidence: this window's records on either endpoint.
      std::set<std::string> evidence;
      for (const std::uint32_t endpoint : {pair.first, pair.second}) {
        const auto it = window_records.find(endpoint);
        if (it == window_records.end()) continue;
        evidence.insert(it->second.begin(), it->second.end());
      }
      event.evidence.assign(evidence.begin(), evidence.end());
      connection_events.push_back(std::move(event));
    }
    std::sort(connection_events.begin(), connection_events.end(),
              [](const EmergenceEvent& a, const EmergenceEvent& b) {
                if (a.subject != b.subject) return a.subject < b.subject;
                return a.subject2 < b.subject2;
              });
    for (auto& event : connection_events) events.push_back(std::move(event));

    std::vector<EmergenceEvent> growth_events;
    for (const auto& [node, record_ids] : window_records) {
      if (record_ids.size() < config.growth_threshold) continue;
      EmergenceEvent event;
      event.kind = EventKind::WeightGrowth;
      event.window_start = window_start;
      event.window_end = window_end;
      event.subject = state.keys[node];
      event.evidence = record_ids;
      std::sort(event.evidence.begin(), event.evidence.end());
      event.evidence.erase(std::unique(event.evidence.begin(), event.evidence.end()),
                           event.evidence.end());
      growth_events.push_back(std::move(event));
    }
    std::sort(growth_events.begin(), growth_events.end(),
              [](const EmergenceEvent& a, const EmergenceEvent& b) {
                return a.subject < b.subject;
              });
    for (auto& event : growth_events) events.push_back(std::move(event));
  }
  return events;
}

}  // namespace exposome
