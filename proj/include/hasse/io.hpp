#pragma once
// Episode JSONL and diagram JSON serialization plus Graphviz DOT export.
// One episode per line; diagrams as {vertices:[{id,task,agents[]}],
// edges:[[from,to]]}.

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hasse/core.hpp"
#include "json.hpp"

namespace hasse {

inline nlohmann::json episode_to_json(const Episode& e) {
  nlohmann::json sequences = nlohmann::json::array();
  for (const auto& s : e.sequences)
    sequences.push_back({{"agent", s.agent}, {"tasks", s.tasks}});
  nlohmann::json j{{"id", e.id}, {"sequences", sequences}};
  if (!e.meta.domain.empty()) {
    j["metadata"] = {{"domain", e.meta.domain}, {"seed", e.meta.seed},
                     {"agents", e.meta.agents}, {"tasks", e.meta.tasks},
                     {"regenerated", e.meta.regenerated}};
  }
  return j;
}

inline Episode episode_from_json(const nlohmann::json& j, const std::string& locus) {
  if (!j.is_object()) throw ParseError(locus + ": episode must be a JSON object");
  if (!j.contains("id") || !j.at("id").is_string())
    throw ParseError(locus + ": missing string field 'id'");
  if (!j.contains("sequences") || !j.at("sequences").is_array())
    throw ParseError(locus + ": missing array field 'sequences'");

  std::vector<TaskSequence> sequences;
  for (const auto& s : j.at("sequences")) {
    if (!s.is_object() || !s.contains("agent") || !s.at("agent").is_number_integer() ||
        !s.contains("tasks") || !s.at("tasks").is_array())
      throw ParseError(locus + ": sequence needs integer 'agent' and array 'tasks'");
    TaskSequence seq;
    seq.agent = s.at("agent").get<AgentId>();
    if (seq.agent < 1)
      throw ParseError(locus + ": agent index must be >= 1, got " + std::to_string(seq.agent));
    for (const auto& t : s.at("tasks")) {
      if (!t.is_string() || t.get<std::string>().empty())
        throw ParseError(locus + ": tasks must be non-empty strings");
      seq.tasks.push_back(t.get<std::string>());
    }
    sequences.push_back(std::move(seq));
  }

  EpisodeMeta meta;
  if (j.contains("metadata") && j.at("metadata").is_object()) {
    const auto& m = j.at("metadata");
    meta.domain = m.value("domain", std::string{});
    meta.seed = m.value("seed", std::uint64_t{0});
    meta.agents = m.value("agents", 0);
    meta.tasks = m.value("tasks", 0);
    meta.regenerated = m.value("regenerated", 0);
  }

  Episode e;
  try {
    e = make_episode(j.at("id").get<std::string>(), std::move(sequences), std::move(meta));
  } catch (const DuplicateTaskError& err) {
    throw DuplicateTaskError(locus + ": " + err.what());
  } catch (const ValidationError& err) {
    throw ParseError(locus + ": " + err.what());
  }
  try {
    require_dense_agents(e);
  } catch (const ValidationError& err) {
    throw ParseError(locus + ": " + err.what());
  }
  return e;
}

inline std::vector<Episode> load_episodes(std::istream& in, const std::string& name = "<input>") {
  std::vector<Episode> episodes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string locus = name + ":" + std::to_string(line_no);
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(locus + ": invalid JSON");
    episodes.push_back(episode_from_json(j, locus));
  }
  return episodes;
}

inline std::vector<Episode> load_episodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return load_episodes(in, path);
}

inline void save_episodes(std::ostream& out, const std::vector<Episode>& episodes) {
  for (const auto& e : episodes) out << episode_to_json(e).dump() << "\n";
}

inline void save_episodes(const std::string& path, const std::vector<Episode>& episodes) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  save_episodes(out, episodes);
}

// ---------------------------------------------------------------------------
// Diagrams

inline nlohmann::json diagram_to_json(const HasseDiagram& d) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& v : d.vertices) {
    nlohmann::json jv{{"id", v.id}};
    if (v.is_root()) {
      jv["task"] = nullptr;
      jv["agents"] = nlohmann::json::array();
    } else {
      jv["task"] = v.task();
      jv["agents"] = v.agents();
    }
    vertices.push_back(std::move(jv));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [u, v] : d.edges) edges.push_back({u, v});
  return nlohmann::json{{"vertices", vertices}, {"edges", edges}};
}

inline HasseDiagram diagram_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw ParseError("diagram needs 'vertices' and 'edges'");
  HasseDiagram d;
  std::vector<Vertex> vertices;
  for (const auto& jv : j.at("vertices")) {
    Vertex v;
    v.id = jv.at("id").get<int>();
    if (!jv.at("task").is_null()) {
      std::set<AgentId> agents;
      for (const auto& a : jv.at("agents")) agents.insert(a.get<AgentId>());
      v.entries.emplace(jv.at("task").get<std::string>(), std::move(agents));
    }
    vertices.push_back(std::move(v));
  }
  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  d.vertices = std::move(vertices);
  for (const auto& je : j.at("edges")) d.edges.insert({je.at(0).get<int>(), je.at(1).get<int>()});
  if (auto problem = validate(d)) throw ParseError("invalid diagram: " + *problem);
  return d;
}

// ---------------------------------------------------------------------------
// DOT export

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

/// Graphviz digraph with one node per vertex; non-root nodes are labeled
/// "TASK {agents}", the root "start".
inline std::string export_dot(const HasseDiagram& d) {
  std::string out = "digraph hasse {\n  rankdir=LR;\n";
  for (const auto& v : d.vertices) {
    std::string label = "start";
    if (!v.is_root()) {
      label.clear();
      for (const auto& [task, agents] : v.entries) {
        if (!label.empty()) label += ", ";
        label += task + " {";
        bool first = true;
        for (AgentId a : agents) {
          if (!first) label += ",";
          label += std::to_string(a);
          first = false;
        }
        label += "}";
      }
    }
    out += "  n" + std::to_string(v.id) + " [label=\"" + detail::dot_escape(label) + "\"];\n";
  }
  for (const auto& [u, v] : d.edges)
    out += "  n" + std::to_string(u) + " -> n" + std::to_string(v) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace hasse
