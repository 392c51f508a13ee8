#pragma once
// Core domain types for partial-order task summaries: tasks, agents,
// episodes, Hasse diagrams, and boolean features over them.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hasse {

using TaskId = std::string;
using AgentId = int;

// ---------------------------------------------------------------------------
// Errors. The CLI maps the three families to distinct exit codes:
// validation -> 2, unanswerable query -> 3, resource cap -> 4.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};
struct DuplicateTaskError : ValidationError {
  using ValidationError::ValidationError;
};
struct InconsistentEpisodeError : ValidationError {
  using ValidationError::ValidationError;
};
struct CyclicInputError : ValidationError {
  using ValidationError::ValidationError;
};
struct UnknownAgentError : ValidationError {
  using ValidationError::ValidationError;
};
struct UnknownTaskError : ValidationError {
  using ValidationError::ValidationError;
};
struct InfeasibleConfigError : ValidationError {
  using ValidationError::ValidationError;
};
struct EmptyTargetsError : ValidationError {
  using ValidationError::ValidationError;
};
struct ConflictingSpecError : ValidationError {
  using ValidationError::ValidationError;
};

struct QueryError : Error {
  using Error::Error;
};
struct TaskNeverObservedError : QueryError {
  using QueryError::QueryError;
};
struct NoMatchingDiagramError : QueryError {
  using QueryError::QueryError;
};
struct ConditionUnsatisfiableError : QueryError {
  using QueryError::QueryError;
};

struct ResourceError : Error {
  using Error::Error;
};
struct PathExplosionError : ResourceError {
  using ResourceError::ResourceError;
};
struct TooManyVariablesError : ResourceError {
  using ResourceError::ResourceError;
};

// ---------------------------------------------------------------------------
// Episodes

/// One agent's ordered task completions from a single episode.
struct TaskSequence {
  AgentId agent = 0;
  std::vector<TaskId> tasks;

  bool operator==(const TaskSequence&) const = default;
};

struct EpisodeMeta {
  std::string domain;
  std::uint64_t seed = 0;
  int agents = 0;
  int tasks = 0;
  int regenerated = 0;  // stalled simulations replaced to fill the corpus

  bool operator==(const EpisodeMeta&) const = default;
};

/// Per-agent task sequences from one decentralized execution. A TaskId shared
/// by several sequences denotes a single joint completion.
struct Episode {
  std::string id;
  std::vector<TaskSequence> sequences;  // sorted by agent id
  EpisodeMeta meta;

  bool operator==(const Episode&) const = default;

  const TaskSequence* find_agent(AgentId a) const {
    for (const auto& s : sequences)
      if (s.agent == a) return &s;
    return nullptr;
  }

  std::set<AgentId> agent_ids() const {
    std::set<AgentId> ids;
    for (const auto& s : sequences) ids.insert(s.agent);
    return ids;
  }

  std::set<TaskId> task_ids() const {
    std::set<TaskId> ids;
    for (const auto& s : sequences) ids.insert(s.tasks.begin(), s.tasks.end());
    return ids;
  }
};

/// Builds an episode, sorting sequences by agent id. Rejects agent ids < 1,
/// duplicate agents, and a task repeated within one agent's sequence.
inline Episode make_episode(std::string id, std::vector<TaskSequence> sequences,
                            EpisodeMeta meta = {}) {
  std::sort(sequences.begin(), sequences.end(),
            [](const TaskSequence& a, const TaskSequence& b) { return a.agent < b.agent; });
  std::set<AgentId> seen;
  for (const auto& s : sequences) {
    if (s.agent < 1)
      throw ValidationError("episode " + id + ": agent index must be >= 1, got " +
                            std::to_string(s.agent));
    if (!seen.insert(s.agent).second)
      throw ValidationError("episode " + id + ": duplicate sequence for agent " +
                            std::to_string(s.agent));
    std::set<TaskId> tasks;
    for (const auto& t : s.tasks) {
      if (t.empty()) throw ValidationError("episode " + id + ": empty task id");
      if (!tasks.insert(t).second)
        throw DuplicateTaskError("episode " + id + ": task " + t +
                                 " completed twice by agent " + std::to_string(s.agent));
    }
  }
  return Episode{std::move(id), std::move(sequences), std::move(meta)};
}

/// Checks that agent ids form the dense range 1..N. Enforced at ingestion;
/// filtered episodes may legitimately be sparse.
inline void require_dense_agents(const Episode& e) {
  AgentId expect = 1;
  for (const auto& s : e.sequences) {
    if (s.agent != expect)
      throw ValidationError("episode " + e.id + ": agent indices not dense, expected " +
                            std::to_string(expect) + " got " + std::to_string(s.agent));
    ++expect;
  }
}

/// True iff seq is a (not necessarily contiguous) subsequence of trace.
inline bool conforms(const std::vector<TaskId>& seq, const std::vector<TaskId>& trace) {
  std::size_t i = 0;
  for (const auto& t : trace) {
    if (i == seq.size()) break;
    if (seq[i] == t) ++i;
  }
  return i == seq.size();
}

// ---------------------------------------------------------------------------
// Hasse diagrams

/// A diagram vertex: the tasks completed at this point and the agents that
/// performed each. The root holds no entries; every other vertex holds
/// exactly one task (the builder never merges distinct tasks).
struct Vertex {
  int id = 0;
  std::map<TaskId, std::set<AgentId>> entries;

  bool operator==(const Vertex&) const = default;

  bool is_root() const { return entries.empty(); }

  /// Single task of a non-root vertex.
  const TaskId& task() const { return entries.begin()->first; }
  const std::set<AgentId>& agents() const { return entries.begin()->second; }
};

/// Transitively reduced DAG over task completions; vertex ids are dense and
/// index the vertices vector, with the root at index 0.
struct HasseDiagram {
  std::vector<Vertex> vertices;
  std::set<std::pair<int, int>> edges;
  int root = 0;

  bool operator==(const HasseDiagram&) const = default;

  const Vertex* find_task(const TaskId& t) const {
    for (const auto& v : vertices)
      if (v.entries.count(t)) return &v;
    return nullptr;
  }

  std::set<TaskId> tasks() const {
    std::set<TaskId> out;
    for (const auto& v : vertices)
      for (const auto& [t, _] : v.entries) out.insert(t);
    return out;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& [u, v] : edges) adj[static_cast<std::size_t>(u)].push_back(v);
    return adj;
  }

  std::vector<std::vector<int>> reverse_adjacency() const {
    std::vector<std::vector<int>> radj(vertices.size());
    for (const auto& [u, v] : edges) radj[static_cast<std::size_t>(v)].push_back(u);
    return radj;
  }
};

/// Root-to-sink vertex sequence.
struct Path {
  std::vector<int> vertices;

  bool operator==(const Path&) const = default;
};

/// Tasks along the path performed by the given agent, in path order.
inline std::vector<TaskId> project(const HasseDiagram& d, const Path& p, AgentId agent) {
  std::vector<TaskId> out;
  for (int vid : p.vertices)
    for (const auto& [task, agents] : d.vertices[static_cast<std::size_t>(vid)].entries)
      if (agents.count(agent)) out.push_back(task);
  return out;
}

namespace detail {

/// Set of vertices reachable from `from`, excluding one edge. Used both by
/// reduction and by the validity check.
inline bool reachable_excluding(const std::vector<std::vector<int>>& adj, int from, int to,
                                int skip_u, int skip_v) {
  std::vector<int> stack{from};
  std::vector<bool> seen(adj.size(), false);
  seen[static_cast<std::size_t>(from)] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (u == skip_u && v == skip_v) continue;
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return false;
}

/// Kahn's topological check; returns false when the edge set has a cycle.
inline bool is_acyclic(std::size_t n, const std::set<std::pair<int, int>>& edges) {
  std::vector<int> indeg(n, 0);
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    ++indeg[static_cast<std::size_t>(v)];
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
  std::size_t visited = 0;
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    ++visited;
    for (int v : adj[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  }
  return visited == n;
}

}  // namespace detail

/// Checks all structural invariants of a diagram; returns a description of
/// the first violation, or nullopt when the diagram is well formed.
inline std::optional<std::string> validate(const HasseDiagram& d) {
  if (d.vertices.empty()) return "no vertices";
  if (d.root != 0) return "root id must be 0";
  for (std::size_t i = 0; i < d.vertices.size(); ++i)
    if (d.vertices[i].id != static_cast<int>(i)) return "vertex ids not dense";
  if (!d.vertices[0].is_root()) return "root vertex has entries";
  for (std::size_t i = 1; i < d.vertices.size(); ++i) {
    if (d.vertices[i].entries.size() != 1)
      return "vertex " + std::to_string(i) + " does not hold exactly one task";
    if (d.vertices[i].agents().empty())
      return "vertex " + std::to_string(i) + " has an empty agent set";
  }
  for (const auto& [u, v] : d.edges) {
    if (u < 0 || v < 0 || u >= static_cast<int>(d.vertices.size()) ||
        v >= static_cast<int>(d.vertices.size()))
      return "edge endpoint out of range";
    if (u == v) return "self edge";
  }
  if (!detail::is_acyclic(d.vertices.size(), d.edges)) return "cycle";
  // Each task in exactly one vertex.
  std::set<TaskId> seen;
  for (const auto& v : d.vertices)
    for (const auto& [t, _] : v.entries)
      if (!seen.insert(t).second) return "task " + t + " appears in two vertices";
  // Reachability from the root.
  auto adj = d.adjacency();
  for (std::size_t i = 1; i < d.vertices.size(); ++i)
    if (!detail::reachable_excluding(adj, d.root, static_cast<int>(i), -1, -1))
      return "vertex " + std::to_string(i) + " unreachable from root";
  // Transitive reduction: no edge has an alternate path.
  for (const auto& [u, v] : d.edges)
    if (detail::reachable_excluding(adj, u, v, u, v))
      return "edge " + std::to_string(u) + "->" + std::to_string(v) + " is redundant";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Features

/// Boolean predicate over an execution: a task was completed, or a specific
/// agent completed it.
struct Feature {
  enum class Kind { TaskDone, AgentDidTask };

  Kind kind = Kind::TaskDone;
  TaskId task;
  AgentId agent = 0;  // meaningful for AgentDidTask only

  auto operator<=>(const Feature&) const = default;

  static Feature task_done(TaskId t) { return Feature{Kind::TaskDone, std::move(t), 0}; }
  static Feature agent_did_task(AgentId a, TaskId t) {
    return Feature{Kind::AgentDidTask, std::move(t), a};
  }

  std::string describe() const {
    if (kind == Kind::TaskDone) return "task " + task + " completed";
    return "agent " + std::to_string(agent) + " completes task " + task;
  }
};

}  // namespace hasse
