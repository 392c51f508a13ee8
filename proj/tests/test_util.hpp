#pragma once
// Shared helpers for the test suites: worked corpora, randomized generators,
// and independent oracles (reachability closure, reduction, minimum cover, a
// small DOT grammar checker).

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hasse/boolmin.hpp"
#include "hasse/core.hpp"
#include "hasse/scenario.hpp"
#include "hasse/summarize.hpp"

namespace testutil {

using namespace hasse;
using sim::Rng;

// Worked corpora used across suites. estar: two agents meet on a joint task.
// e3: task B unordered relative to C. e4: like e3 but with agents 2 and 4
// performing the joint task. ew: C has two certain successors and one
// unordered task.
inline Episode estar() {
  return make_episode("estar", {{1, {"A", "C"}}, {2, {"B", "C"}}});
}
inline Episode edagger() {
  return make_episode("edagger", {{1, {"B", "A", "C"}}, {2, {"B", "C"}}});
}
inline Episode e3() {
  return make_episode("e3", {{1, {"A", "C"}}, {2, {"C"}}, {3, {"B"}}});
}
inline Episode e4() {
  return make_episode("e4", {{1, {}}, {2, {"A", "C"}}, {3, {"B"}}, {4, {"A", "C"}}});
}
inline Episode ew() {
  return make_episode("ew", {{1, {"C", "D"}}, {2, {"C", "E"}}, {3, {"B"}}});
}

/// Task-labeled edge set; the root is labeled "^". Structure checks stay
/// independent of vertex id assignment.
inline std::set<std::pair<std::string, std::string>> edge_tasks(const HasseDiagram& d) {
  auto label = [&](int id) {
    const auto& v = d.vertices[static_cast<std::size_t>(id)];
    return v.is_root() ? std::string("^") : v.task();
  };
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [u, v] : d.edges) out.insert({label(u), label(v)});
  return out;
}

/// Random episode from a simulated global completion order: each task gets a
/// distinct tick and a random non-empty agent subset, and each agent's trace
/// is the order restricted to its tasks. Any such episode satisfies the
/// simultaneity assumption, so summaries must verify correct and complete.
inline Episode random_episode(Rng& rng, const std::string& id, int max_agents = 6,
                              int max_tasks = 10) {
  const int agents = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_agents)));
  const int tasks = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_tasks + 1)));
  std::vector<int> order;
  for (int t = 0; t < tasks; ++t) order.push_back(t);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<std::set<AgentId>> performers(static_cast<std::size_t>(tasks));
  for (int t = 0; t < tasks; ++t) {
    const int size = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(agents)));
    std::vector<AgentId> pool;
    for (int a = 1; a <= agents; ++a) pool.push_back(a);
    for (int k = 0; k < size; ++k) {
      const std::size_t pick = rng.below(pool.size());
      performers[static_cast<std::size_t>(t)].insert(pool[pick]);
      pool.erase(pool.begin() + static_cast<long>(pick));
    }
  }

  std::vector<TaskSequence> sequences;
  for (int a = 1; a <= agents; ++a) {
    TaskSequence seq;
    seq.agent = a;
    for (int t : order)
      if (performers[static_cast<std::size_t>(t)].count(a))
        seq.tasks.push_back(sim::task_name(t));
    sequences.push_back(std::move(seq));
  }
  return make_episode(id, std::move(sequences));
}

// ---------------------------------------------------------------------------
// Graph oracles

struct TestDag {
  std::size_t n = 0;
  std::set<std::pair<int, int>> edges;
};

inline TestDag random_dag(Rng& rng, int max_n = 12) {
  TestDag dag;
  dag.n = 1 + rng.below(static_cast<std::uint64_t>(max_n));
  std::vector<int> perm;
  for (std::size_t i = 0; i < dag.n; ++i) perm.push_back(static_cast<int>(i));
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  for (std::size_t i = 0; i < dag.n; ++i)
    for (std::size_t j = i + 1; j < dag.n; ++j)
      if (rng.below(100) < 35) dag.edges.insert({perm[i], perm[j]});
  return dag;
}

/// Floyd-Warshall style reachability closure (excluding trivial self-paths).
inline std::vector<std::vector<bool>> closure_oracle(std::size_t n,
                                                     const std::set<std::pair<int, int>>& edges) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [u, v] : edges) reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  return reach;
}

/// Unique reduction of a DAG via its closure: keep exactly the covering
/// pairs, i.e. reachable pairs with no intermediate vertex.
inline std::set<std::pair<int, int>> reduction_oracle(std::size_t n,
                                                      const std::set<std::pair<int, int>>& edges) {
  const auto reach = closure_oracle(n, edges);
  std::set<std::pair<int, int>> out;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (!reach[u][v]) continue;
      bool shortcut = false;
      for (std::size_t w = 0; w < n && !shortcut; ++w)
        if (w != u && w != v && reach[u][w] && reach[w][v]) shortcut = true;
      if (!shortcut) out.insert({static_cast<int>(u), static_cast<int>(v)});
    }
  return out;
}

// ---------------------------------------------------------------------------
// Boolean oracles

/// Minterm from a pattern string; position i is variables[i].
inline Minterm mt(const std::string& pattern) {
  Minterm m = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i)
    if (pattern[i] == '1') m |= 1u << i;
  return m;
}

struct CoverCost {
  int count = 1 << 20;
  int literals = 1 << 20;
  bool operator<(const CoverCost& o) const {
    return count != o.count ? count < o.count : literals < o.literals;
  }
};

/// Exact minimum (implicant count, then literal total) over all DNFs built
/// from cubes that avoid every non-target, via subset dynamic programming on
/// the target set. Independent of the minimizer's search.
inline CoverCost min_cover_oracle(const BooleanSpec& spec) {
  const std::size_t n = spec.variables.size();
  if (spec.non_targets.empty()) return CoverCost{1, 0};
  const std::vector<Minterm> targets(spec.targets.begin(), spec.targets.end());
  const std::uint32_t full_mask = n == 0 ? 0 : (1u << n) - 1;

  struct CubeCover {
    std::uint32_t covered = 0;
    int literals = 0;
  };
  std::vector<CubeCover> cubes;
  for (std::uint32_t mask = 0; mask <= full_mask; ++mask) {
    // Enumerate value subsets of the mask.
    std::uint32_t value = 0;
    while (true) {
      Implicant cube{mask, value};
      bool valid = true;
      for (Minterm m : spec.non_targets)
        if (cube.covers(m)) {
          valid = false;
          break;
        }
      if (valid) {
        std::uint32_t covered = 0;
        for (std::size_t i = 0; i < targets.size(); ++i)
          if (cube.covers(targets[i])) covered |= 1u << i;
        if (covered) cubes.push_back({covered, cube.literal_count()});
      }
      if (value == mask) break;
      value = (value - mask) & mask;  // next subset
    }
    if (mask == full_mask) break;
  }

  const std::uint32_t all = targets.size() == 32 ? 0xffffffffu : (1u << targets.size()) - 1;
  std::vector<CoverCost> dp(static_cast<std::size_t>(all) + 1);
  dp[0] = CoverCost{0, 0};
  for (std::uint32_t s = 0; s <= all; ++s) {
    if (dp[s].count >= (1 << 20)) continue;
    if (s == all) break;
    std::uint32_t lowest = 0;
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (!(s & (1u << i))) {
        lowest = static_cast<std::uint32_t>(i);
        break;
      }
    for (const auto& cube : cubes) {
      if (!(cube.covered & (1u << lowest))) continue;
      const std::uint32_t s2 = s | cube.covered;
      CoverCost cost{dp[s].count + 1, dp[s].literals + cube.literals};
      if (cost < dp[s2]) dp[s2] = cost;
    }
  }
  return dp[all];
}

// ---------------------------------------------------------------------------
// DOT grammar checker

/// Accepts the digraph subset the exporter emits: a named digraph block of
/// node statements (with a quoted label attribute), edge statements, and
/// plain attribute assignments.
inline bool valid_dot(const std::string& text) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '"') {
      std::string tok = "\"";
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) tok += text[i++];
        tok += text[i++];
      }
      if (i >= text.size()) return false;
      tok += '"';
      ++i;
      tokens.push_back(tok);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      tokens.push_back("->");
      i += 2;
      continue;
    }
    if (c == '{' || c == '}' || c == '[' || c == ']' || c == ';' || c == '=') {
      tokens.push_back(std::string(1, c));
      ++i;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string tok;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
        tok += text[i++];
      tokens.push_back(tok);
      continue;
    }
    return false;
  }

  std::size_t p = 0;
  auto id_like = [&](const std::string& t) {
    return !t.empty() && t != "{" && t != "}" && t != "[" && t != "]" && t != ";" && t != "=" &&
           t != "->";
  };
  if (p >= tokens.size() || tokens[p++] != "digraph") return false;
  if (p >= tokens.size() || !id_like(tokens[p++])) return false;
  if (p >= tokens.size() || tokens[p++] != "{") return false;
  while (p < tokens.size() && tokens[p] != "}") {
    if (!id_like(tokens[p])) return false;
    const std::size_t start = p++;
    if (p < tokens.size() && tokens[p] == "->") {
      ++p;
      if (p >= tokens.size() || !id_like(tokens[p++])) return false;
    } else if (p < tokens.size() && tokens[p] == "[") {
      ++p;
      if (p >= tokens.size() || !id_like(tokens[p++])) return false;
      if (p >= tokens.size() || tokens[p++] != "=") return false;
      if (p >= tokens.size() || !id_like(tokens[p++])) return false;
      if (p >= tokens.size() || tokens[p++] != "]") return false;
    } else if (p < tokens.size() && tokens[p] == "=") {
      ++p;
      if (p >= tokens.size() || !id_like(tokens[p++])) return false;
    } else {
      (void)start;
      return false;
    }
    if (p >= tokens.size() || tokens[p++] != ";") return false;
  }
  return p < tokens.size() && tokens[p] == "}";
}

}  // namespace testutil
