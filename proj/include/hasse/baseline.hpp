#pragma once
// Per-agent baseline summaries (prefix trees over observed task sequences
// annotated with empirical probabilities) and corpus statistics.

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "hasse/core.hpp"
#include "hasse/summarize.hpp"

namespace hasse {

/// Prefix tree over one agent's distinct observed sequences; sequence
/// probabilities annotate the node where each sequence ends.
struct BaselineGraph {
  struct Node {
    int id = 0;
    TaskId task;  // empty for the root
    int parent = -1;
    std::vector<int> children;
    int terminal_count = 0;
    double probability = 0.0;
  };

  AgentId agent = 0;
  std::vector<Node> nodes;  // [0] is the root
  int episodes = 0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

inline BaselineGraph baseline_build(const std::vector<Episode>& episodes, AgentId agent) {
  BaselineGraph g;
  g.agent = agent;
  g.nodes.push_back(BaselineGraph::Node{});

  for (const auto& e : episodes) {
    const TaskSequence* seq = e.find_agent(agent);
    if (!seq) continue;
    ++g.episodes;
    int at = 0;
    for (const auto& task : seq->tasks) {
      int next = -1;
      for (int child : g.nodes[static_cast<std::size_t>(at)].children)
        if (g.nodes[static_cast<std::size_t>(child)].task == task) {
          next = child;
          break;
        }
      if (next < 0) {
        next = static_cast<int>(g.nodes.size());
        BaselineGraph::Node node;
        node.id = next;
        node.task = task;
        node.parent = at;
        g.nodes.push_back(std::move(node));
        g.nodes[static_cast<std::size_t>(at)].children.push_back(next);
      }
      at = next;
    }
    ++g.nodes[static_cast<std::size_t>(at)].terminal_count;
  }
  if (g.episodes == 0)
    throw UnknownAgentError("agent " + std::to_string(agent) + " not present in the corpus");
  for (auto& node : g.nodes)
    node.probability = double(node.terminal_count) / double(g.episodes);
  return g;
}

// ---------------------------------------------------------------------------
// Corpus statistics

struct StatsReport {
  std::size_t episodes = 0;
  std::size_t distinct_diagrams = 0;
  std::map<int, int> edge_histogram;
  double mean_vertices = 0.0;
  double mean_edges = 0.0;
  bool with_baseline = false;
  std::size_t baseline_nodes = 0;  // summed over agents
  std::size_t baseline_edges = 0;
  double summarize_seconds = 0.0;
};

inline StatsReport stats(const std::vector<Episode>& episodes, bool with_baseline = false,
                         unsigned threads = 1) {
  StatsReport report;
  const auto start = std::chrono::steady_clock::now();
  const auto agg = aggregate(episodes, threads);
  report.summarize_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.episodes = agg.total_episodes;
  report.distinct_diagrams = agg.groups.size();
  report.edge_histogram = agg.edge_histogram;
  report.mean_vertices = agg.mean_vertices();
  report.mean_edges = agg.mean_edges();
  if (with_baseline) {
    report.with_baseline = true;
    std::set<AgentId> agents;
    for (const auto& e : episodes)
      for (const auto& s : e.sequences) agents.insert(s.agent);
    for (AgentId a : agents) {
      const auto g = baseline_build(episodes, a);
      report.baseline_nodes += g.node_count();
      report.baseline_edges += g.edge_count();
    }
  }
  return report;
}

}  // namespace hasse
