#pragma once
// Partial comparability analysis around an anchor vertex and the uncertainty
// dictionary that feeds "may" conditions in explanations.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "hasse/core.hpp"

namespace hasse {

/// Partition of a diagram's vertices relative to an anchor: those with a
/// known ordering (ancestors, descendants, and the anchor itself) versus the
/// incomparable rest.
struct ComparabilitySplit {
  int anchor = 0;
  std::set<int> comparable;
  std::set<int> incomparable;
};

namespace detail {

inline void collect_reachable(const std::vector<std::vector<int>>& adj, int from,
                              std::set<int>& out) {
  std::vector<int> stack{from};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)])
      if (out.insert(v).second) stack.push_back(v);
  }
}

}  // namespace detail

inline ComparabilitySplit comparability_split(const HasseDiagram& d, int anchor) {
  if (anchor < 0 || anchor >= static_cast<int>(d.vertices.size()))
    throw ValidationError("comparability_split: unknown vertex " + std::to_string(anchor));
  ComparabilitySplit split;
  split.anchor = anchor;
  split.comparable.insert(anchor);
  detail::collect_reachable(d.adjacency(), anchor, split.comparable);
  detail::collect_reachable(d.reverse_adjacency(), anchor, split.comparable);
  for (const auto& v : d.vertices)
    if (!split.comparable.count(v.id)) split.incomparable.insert(v.id);
  return split;
}

/// Features contributed by one vertex: the task-completion predicate plus one
/// agent-participation predicate per performing agent. The root contributes
/// nothing.
inline std::set<Feature> vertex_features(const Vertex& v) {
  std::set<Feature> out;
  for (const auto& [task, agents] : v.entries) {
    out.insert(Feature::task_done(task));
    for (AgentId a : agents) out.insert(Feature::agent_did_task(a, task));
  }
  return out;
}

/// Per-diagram set of features whose ordering relative to the query anchor is
/// unknown. Keyed by diagram index; diagrams for which the selector yields no
/// anchor are absent.
using UncertaintyDictionary = std::map<std::size_t, std::set<Feature>>;

/// Selector: the vertex where the query task is completed by the queried
/// group in this diagram, or nullopt when the diagram does not match.
using AnchorSelector = std::function<std::optional<int>(const HasseDiagram&, std::size_t)>;

inline UncertaintyDictionary build_uncertainty(const std::vector<HasseDiagram>& diagrams,
                                               const AnchorSelector& anchor_of) {
  UncertaintyDictionary dict;
  for (std::size_t j = 0; j < diagrams.size(); ++j) {
    const auto anchor = anchor_of(diagrams[j], j);
    if (!anchor) continue;
    const auto split = comparability_split(diagrams[j], *anchor);
    std::set<Feature> features;
    for (int vid : split.incomparable) {
      const auto vf = vertex_features(diagrams[j].vertices[static_cast<std::size_t>(vid)]);
      features.insert(vf.begin(), vf.end());
    }
    dict.emplace(j, std::move(features));
  }
  return dict;
}

}  // namespace hasse
