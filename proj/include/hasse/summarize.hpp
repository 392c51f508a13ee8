#pragma once
// Hasse diagram construction from episodes, transitive reduction, the
// correctness/completeness verifiers, and corpus-level aggregation.

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hasse/core.hpp"

namespace hasse {

inline constexpr std::size_t kDefaultPathLimit = 10000;

/// Unique transitive reduction of a DAG given as an edge set over vertices
/// 0..n-1. Removes every edge for which an alternate path exists; throws on
/// cyclic input.
inline std::set<std::pair<int, int>> transitive_reduction(std::size_t n,
                                                          std::set<std::pair<int, int>> edges) {
  if (!detail::is_acyclic(n, edges)) throw CyclicInputError("transitive reduction of a cyclic graph");
  // Iterating a snapshot: removal order does not matter for a DAG, the
  // reduction is unique.
  const std::vector<std::pair<int, int>> snapshot(edges.begin(), edges.end());
  for (const auto& [u, v] : snapshot) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& [a, b] : edges) adj[static_cast<std::size_t>(a)].push_back(b);
    if (detail::reachable_excluding(adj, u, v, u, v)) edges.erase({u, v});
  }
  return edges;
}

inline HasseDiagram transitive_reduction(HasseDiagram d) {
  d.edges = transitive_reduction(d.vertices.size(), std::move(d.edges));
  return d;
}

/// Builds the Hasse diagram of one episode: one vertex per completed task
/// annotated with its performing agents, an edge chain per agent sequence,
/// then transitive reduction. Agents are processed in ascending id order, so
/// the result is deterministic and independent of sequence storage order.
/// Joint tasks whose positions contradict each other across agents produce a
/// cycle and are rejected.
inline HasseDiagram hds_build(const Episode& episode) {
  HasseDiagram d;
  d.vertices.push_back(Vertex{0, {}});
  std::map<TaskId, int> where;  // task -> vertex id

  std::vector<const TaskSequence*> order;
  for (const auto& s : episode.sequences) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const TaskSequence* a, const TaskSequence* b) { return a->agent < b->agent; });

  for (const TaskSequence* seq : order) {
    std::set<TaskId> seen;
    for (std::size_t k = 0; k < seq->tasks.size(); ++k) {
      const TaskId& task = seq->tasks[k];
      if (!seen.insert(task).second)
        throw DuplicateTaskError("episode " + episode.id + ": task " + task +
                                 " completed twice by agent " + std::to_string(seq->agent));
      auto it = where.find(task);
      int vid;
      if (it != where.end()) {
        vid = it->second;
        d.vertices[static_cast<std::size_t>(vid)].entries[task].insert(seq->agent);
      } else {
        vid = static_cast<int>(d.vertices.size());
        d.vertices.push_back(Vertex{vid, {{task, {seq->agent}}}});
        where.emplace(task, vid);
      }
      const int prev = k == 0 ? d.root : where.at(seq->tasks[k - 1]);
      d.edges.insert({prev, vid});
    }
  }

  if (!detail::is_acyclic(d.vertices.size(), d.edges))
    throw InconsistentEpisodeError("episode " + episode.id +
                                   ": joint task positions are contradictory across agents");
  d.edges = transitive_reduction(d.vertices.size(), std::move(d.edges));
  return d;
}

/// All root-to-sink paths in deterministic order (successors visited in
/// ascending id order). Throws once more than `limit` paths exist.
inline std::vector<Path> enumerate_maximal_paths(const HasseDiagram& d,
                                                 std::size_t limit = kDefaultPathLimit) {
  auto adj = d.adjacency();
  for (auto& succ : adj) std::sort(succ.begin(), succ.end());

  std::vector<Path> paths;
  std::vector<int> current;
  std::function<void(int)> dfs = [&](int v) {
    current.push_back(v);
    if (adj[static_cast<std::size_t>(v)].empty()) {
      if (paths.size() >= limit)
        throw PathExplosionError("more than " + std::to_string(limit) + " maximal paths");
      paths.push_back(Path{current});
    } else {
      for (int next : adj[static_cast<std::size_t>(v)]) dfs(next);
    }
    current.pop_back();
  };
  dfs(d.root);
  return paths;
}

/// Correctness: every path's projection onto every agent is empty or a
/// subsequence of that agent's trace.
inline bool verify_correct(const HasseDiagram& d, const Episode& episode,
                           std::size_t limit = kDefaultPathLimit) {
  const auto paths = enumerate_maximal_paths(d, limit);
  for (const auto& p : paths)
    for (const auto& seq : episode.sequences)
      if (!conforms(project(d, p, seq.agent), seq.tasks)) return false;
  return true;
}

/// Completeness: every agent's full trace is realized by some path's
/// projection.
inline bool verify_complete(const HasseDiagram& d, const Episode& episode,
                            std::size_t limit = kDefaultPathLimit) {
  const auto paths = enumerate_maximal_paths(d, limit);
  for (const auto& seq : episode.sequences) {
    bool found = false;
    for (const auto& p : paths)
      if (project(d, p, seq.agent) == seq.tasks) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

/// Restricts an episode to the selected agents and tasks, preserving order.
/// Passing nullopt keeps everything.
inline Episode filter_episode(const Episode& episode,
                              const std::optional<std::set<AgentId>>& agents,
                              const std::optional<std::set<TaskId>>& tasks) {
  if (agents) {
    const auto known = episode.agent_ids();
    for (AgentId a : *agents)
      if (!known.count(a))
        throw UnknownAgentError("episode " + episode.id + ": no agent " + std::to_string(a));
  }
  if (tasks) {
    const auto known = episode.task_ids();
    for (const TaskId& t : *tasks)
      if (!known.count(t)) throw UnknownTaskError("episode " + episode.id + ": no task " + t);
  }
  Episode out;
  out.id = episode.id;
  out.meta = episode.meta;
  for (const auto& seq : episode.sequences) {
    if (agents && !agents->count(seq.agent)) continue;
    TaskSequence kept;
    kept.agent = seq.agent;
    for (const auto& t : seq.tasks)
      if (!tasks || tasks->count(t)) kept.tasks.push_back(t);
    out.sequences.push_back(std::move(kept));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

struct DiagramStats {
  int vertex_count = 0;
  int edge_count = 0;
  int occurrence_count = 0;
  double likelihood = 0.0;
};

struct DiagramGroup {
  HasseDiagram diagram;  // representative: first occurrence in corpus order
  DiagramStats stats;
};

struct AggregateResult {
  std::vector<DiagramGroup> groups;    // descending occurrence, ties by key
  std::map<int, int> edge_histogram;   // edge count -> episodes
  std::size_t total_episodes = 0;

  double mean_vertices() const {
    double sum = 0;
    for (const auto& g : groups) sum += double(g.stats.vertex_count) * g.stats.occurrence_count;
    return total_episodes ? sum / double(total_episodes) : 0.0;
  }
  double mean_edges() const {
    double sum = 0;
    for (const auto& g : groups) sum += double(g.stats.edge_count) * g.stats.occurrence_count;
    return total_episodes ? sum / double(total_episodes) : 0.0;
  }
};

/// Labeled structural key: vertices are uniquely labeled by task, so two
/// diagrams are structurally equal iff their task/agent annotations and
/// task-labeled edge sets coincide. Ids are normalized away.
inline std::string canonical_key(const HasseDiagram& d) {
  std::map<int, std::string> label;
  for (const auto& v : d.vertices) {
    if (v.is_root()) {
      label[v.id] = "^";
      continue;
    }
    std::string l;
    for (const auto& [task, agents] : v.entries) {
      l += task;
      l += '|';
      for (AgentId a : agents) l += std::to_string(a) + ",";
      l += ';';
    }
    label[v.id] = l;
  }
  std::vector<std::string> vparts;
  for (const auto& [_, l] : label) vparts.push_back(l);
  std::sort(vparts.begin(), vparts.end());
  std::vector<std::string> eparts;
  for (const auto& [u, v] : d.edges) eparts.push_back(label.at(u) + ">" + label.at(v));
  std::sort(eparts.begin(), eparts.end());

  std::ostringstream key;
  key << "V:";
  for (const auto& p : vparts) key << "[" << p << "]";
  key << "E:";
  for (const auto& p : eparts) key << "[" << p << "]";
  return key.str();
}

/// Builds one diagram per episode, optionally fanning episodes out to a
/// worker pool. Results are merged by episode index, so the output is
/// independent of scheduling.
inline std::vector<HasseDiagram> build_all(const std::vector<Episode>& episodes,
                                           unsigned threads = 1) {
  std::vector<HasseDiagram> out(episodes.size());
  if (threads <= 1 || episodes.size() < 2) {
    for (std::size_t i = 0; i < episodes.size(); ++i) out[i] = hds_build(episodes[i]);
    return out;
  }
  threads = std::min<unsigned>(threads, static_cast<unsigned>(episodes.size()));
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < episodes.size(); i += threads) out[i] = hds_build(episodes[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

/// Groups episode diagrams by structural equality and reports per-group
/// occurrence counts plus the corpus edge-count histogram. Groups are sorted
/// by descending occurrence, ties broken by canonical key.
inline AggregateResult aggregate(const std::vector<Episode>& episodes, unsigned threads = 1) {
  if (episodes.empty()) throw ValidationError("aggregate: empty corpus");
  const auto diagrams = build_all(episodes, threads);

  AggregateResult result;
  result.total_episodes = episodes.size();
  std::map<std::string, std::size_t> group_of;  // key -> index into groups
  for (const auto& d : diagrams) {
    ++result.edge_histogram[static_cast<int>(d.edges.size())];
    const std::string key = canonical_key(d);
    auto it = group_of.find(key);
    if (it == group_of.end()) {
      group_of.emplace(key, result.groups.size());
      DiagramGroup g;
      g.diagram = d;
      g.stats.vertex_count = static_cast<int>(d.vertices.size());
      g.stats.edge_count = static_cast<int>(d.edges.size());
      g.stats.occurrence_count = 1;
      result.groups.push_back(std::move(g));
    } else {
      ++result.groups[it->second].stats.occurrence_count;
    }
  }
  std::stable_sort(result.groups.begin(), result.groups.end(),
                   [](const DiagramGroup& a, const DiagramGroup& b) {
                     if (a.stats.occurrence_count != b.stats.occurrence_count)
                       return a.stats.occurrence_count > b.stats.occurrence_count;
                     return canonical_key(a.diagram) < canonical_key(b.diagram);
                   });
  for (auto& g : result.groups)
    g.stats.likelihood =
        double(g.stats.occurrence_count) / double(result.total_episodes);
  return result;
}

}  // namespace hasse
