// Command-line front end: generate scenario corpora, summarize them as Hasse
// diagrams, answer When / Why Not / What queries, report statistics, and
// export DOT renderings.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hasse/baseline.hpp"
#include "hasse/core.hpp"
#include "hasse/explain.hpp"
#include "hasse/io.hpp"
#include "hasse/scenario.hpp"
#include "hasse/summarize.hpp"

namespace {

using namespace hasse;

unsigned worker_threads() {
  if (const char* env = std::getenv("HASSE_EXPLAIN_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::set<AgentId> parse_agents(const std::string& s) {
  std::set<AgentId> out;
  for (const auto& item : split_commas(s)) {
    try {
      out.insert(std::stoi(item));
    } catch (const std::exception&) {
      throw ValidationError("bad agent id: " + item);
    }
  }
  if (out.empty()) throw ValidationError("empty agent list");
  return out;
}

// Feature atom grammar: "TASK" marks the task completed, "i:TASK" marks it
// completed by agent i.
Feature parse_feature_atom(const std::string& atom) {
  const auto colon = atom.find(':');
  if (colon == std::string::npos) {
    if (atom.empty()) throw ValidationError("empty feature atom");
    return Feature::task_done(atom);
  }
  const std::string agent = atom.substr(0, colon);
  const std::string task = atom.substr(colon + 1);
  if (task.empty()) throw ValidationError("bad feature atom: " + atom);
  try {
    return Feature::agent_did_task(std::stoi(agent), task);
  } catch (const std::exception&) {
    throw ValidationError("bad feature atom: " + atom);
  }
}

nlohmann::json feature_to_json(const Feature& f) {
  if (f.kind == Feature::Kind::TaskDone) return {{"kind", "task_done"}, {"task", f.task}};
  return {{"kind", "agent_did_task"}, {"agent", f.agent}, {"task", f.task}};
}

void write_text_or_file(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot open " + out_path + " for writing");
  out << content;
}

std::string histogram_line(const std::map<int, int>& histogram) {
  std::string line = "edge counts:";
  for (const auto& [edges, count] : histogram)
    line += " " + std::to_string(edges) + ":" + std::to_string(count);
  return line;
}

struct GenerateArgs {
  std::string domain = "sr";
  ScenarioConfig config;
  std::string out;
};

void run_generate(const GenerateArgs& args) {
  ScenarioConfig config = args.config;
  const auto domain = parse_domain(args.domain);
  if (!domain) throw ValidationError("unknown domain: " + args.domain);
  config.domain = *domain;
  const auto episodes = generate(config);
  save_episodes(args.out, episodes);
  std::cout << "wrote " << episodes.size() << " episodes to " << args.out << "\n";
}

struct SummarizeArgs {
  std::string episodes_path;
  std::string filter_agents;
  std::string filter_tasks;
  int top_k = 3;
  bool verify = false;
  std::string format = "text";
  std::string out;
};

std::vector<Episode> load_filtered(const std::string& path, const std::string& filter_agents,
                                   const std::string& filter_tasks) {
  auto episodes = load_episodes(path);
  std::optional<std::set<AgentId>> agents;
  std::optional<std::set<TaskId>> tasks;
  if (!filter_agents.empty()) agents = parse_agents(filter_agents);
  if (!filter_tasks.empty()) {
    const auto items = split_commas(filter_tasks);
    tasks = std::set<TaskId>(items.begin(), items.end());
  }
  if (agents || tasks)
    for (auto& e : episodes) e = filter_episode(e, agents, tasks);
  return episodes;
}

void run_summarize(const SummarizeArgs& args) {
  const auto episodes = load_filtered(args.episodes_path, args.filter_agents, args.filter_tasks);
  const auto agg = aggregate(episodes, worker_threads());

  int verified = 0;
  if (args.verify) {
    for (const auto& e : episodes) {
      const auto d = hds_build(e);
      if (verify_correct(d, e) && verify_complete(d, e)) ++verified;
    }
  }

  const int shown = std::min<int>(args.top_k, static_cast<int>(agg.groups.size()));
  if (args.format == "dot") {
    write_text_or_file(args.out, export_dot(agg.groups.front().diagram));
  } else if (args.format == "json") {
    nlohmann::json groups = nlohmann::json::array();
    for (int i = 0; i < shown; ++i) {
      const auto& g = agg.groups[static_cast<std::size_t>(i)];
      groups.push_back({{"likelihood", g.stats.likelihood},
                        {"count", g.stats.occurrence_count},
                        {"vertices", g.stats.vertex_count},
                        {"edges", g.stats.edge_count},
                        {"diagram", diagram_to_json(g.diagram)}});
    }
    nlohmann::json j{{"episodes", agg.total_episodes},
                     {"distinct_diagrams", agg.groups.size()},
                     {"edge_histogram", nlohmann::json::object()},
                     {"groups", groups}};
    for (const auto& [edges, count] : agg.edge_histogram)
      j["edge_histogram"][std::to_string(edges)] = count;
    if (args.verify) j["verified_episodes"] = verified;
    write_text_or_file(args.out, j.dump(2) + "\n");
  } else {
    std::string text;
    text += "episodes: " + std::to_string(agg.total_episodes) + "\n";
    text += "distinct diagrams: " + std::to_string(agg.groups.size()) + "\n";
    text += histogram_line(agg.edge_histogram) + "\n";
    for (int i = 0; i < shown; ++i) {
      const auto& g = agg.groups[static_cast<std::size_t>(i)];
      text += "group " + std::to_string(i + 1) + ": likelihood " +
              fixed(g.stats.likelihood, 3) + " count " + std::to_string(g.stats.occurrence_count) +
              " vertices " + std::to_string(g.stats.vertex_count) + " edges " +
              std::to_string(g.stats.edge_count) + "\n";
    }
    if (args.verify)
      text += "verification: " + std::to_string(verified) + "/" +
              std::to_string(episodes.size()) + " episodes correct and complete\n";
    write_text_or_file(args.out, text);
  }
  if (args.verify && verified != static_cast<int>(episodes.size()))
    throw Error("verification failed for " + std::to_string(episodes.size() - verified) +
                " episodes");
}

struct ExplainArgs {
  std::string episodes_path;
  std::string agents;
  std::string task;
  std::string given;
  std::string features;
  std::string nontargets = "matching";
  bool superset = false;
  std::string format = "text";
};

void run_explain(QueryKind kind, const ExplainArgs& args) {
  const auto episodes = load_episodes(args.episodes_path);
  if (episodes.empty()) throw ValidationError("empty corpus: " + args.episodes_path);
  const auto diagrams = build_all(episodes, worker_threads());

  Query q;
  q.kind = kind;
  q.task = args.task;
  if (kind != QueryKind::What) q.agents = parse_agents(args.agents);
  if (kind == QueryKind::WhyNot)
    for (const auto& atom : split_commas(args.given)) q.conditions.insert(parse_feature_atom(atom));
  if (!args.features.empty()) {
    std::vector<Feature> override_list;
    for (const auto& atom : split_commas(args.features))
      override_list.push_back(parse_feature_atom(atom));
    q.feature_override = std::move(override_list);
  }
  if (args.nontargets == "all")
    q.nontargets_all = true;
  else if (args.nontargets != "matching")
    throw ValidationError("--nontargets must be 'matching' or 'all'");
  q.superset_match = args.superset;

  const Explanation ex = explain(q, diagrams);

  if (args.format == "json") {
    nlohmann::json j{{"text", ex.text},
                     {"diagnostics",
                      {{"dropped_conflicts", ex.diag.dropped_conflicts},
                       {"diagrams_consulted", ex.diag.diagrams_consulted},
                       {"diagrams_matched", ex.diag.diagrams_matched},
                       {"truncated_features", ex.diag.truncated_features},
                       {"approximate", ex.diag.approximate}}}};
    if (kind == QueryKind::What) {
      j["certain"] = ex.certain_tasks;
      j["uncertain"] = ex.uncertain_tasks;
    } else {
      j["certain"] = nlohmann::json::array();
      j["uncertain"] = nlohmann::json::array();
      for (const auto& f : ex.certain_features) j["certain"].push_back(feature_to_json(f));
      for (const auto& f : ex.uncertain_features) j["uncertain"].push_back(feature_to_json(f));
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << ex.text << "\n";
    if (ex.diag.dropped_conflicts > 0)
      std::cout << "note: " << ex.diag.dropped_conflicts
                << (ex.diag.dropped_conflicts == 1 ? " indistinguishable observation dropped"
                                                   : " indistinguishable observations dropped")
                << "\n";
    if (ex.diag.truncated_features > 0)
      std::cout << "note: feature set truncated, " << ex.diag.truncated_features
                << " features dropped\n";
    if (ex.diag.approximate) std::cout << "note: cover selection approximate\n";
  }
}

struct StatsArgs {
  std::string episodes_path;
  bool baseline = false;
  std::string format = "text";
};

void run_stats(const StatsArgs& args) {
  const auto episodes = load_episodes(args.episodes_path);
  const auto report = stats(episodes, args.baseline, worker_threads());
  // Wall-clock goes to stderr: stdout stays byte-identical across runs.
  std::cerr << "summarize time: " << fixed(report.summarize_seconds, 4) << "s\n";
  if (args.format == "json") {
    nlohmann::json j{{"episodes", report.episodes},
                     {"distinct_diagrams", report.distinct_diagrams},
                     {"edge_histogram", nlohmann::json::object()},
                     {"mean_vertices", report.mean_vertices},
                     {"mean_edges", report.mean_edges}};
    for (const auto& [edges, count] : report.edge_histogram)
      j["edge_histogram"][std::to_string(edges)] = count;
    if (report.with_baseline) {
      j["baseline_nodes"] = report.baseline_nodes;
      j["baseline_edges"] = report.baseline_edges;
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "episodes: " << report.episodes << "\n"
              << "distinct diagrams: " << report.distinct_diagrams << "\n"
              << histogram_line(report.edge_histogram) << "\n"
              << "mean vertices: " << fixed(report.mean_vertices, 2) << "\n"
              << "mean edges: " << fixed(report.mean_edges, 2) << "\n";
    if (report.with_baseline)
      std::cout << "baseline nodes: " << report.baseline_nodes << "\n"
                << "baseline edges: " << report.baseline_edges << "\n";
  }
}

struct ExportDotArgs {
  std::string episodes_path;
  std::string episode_id;
  std::string out;
};

void run_export_dot(const ExportDotArgs& args) {
  const auto episodes = load_episodes(args.episodes_path);
  const Episode* episode = nullptr;
  for (const auto& e : episodes)
    if (e.id == args.episode_id) {
      episode = &e;
      break;
    }
  if (!episode) throw ValidationError("no episode with id " + args.episode_id);
  write_text_or_file(args.out, export_dot(hds_build(*episode)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hasse-diagram summaries and query explanations for decentralized "
               "multi-agent task logs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Generate an episode corpus");
  generate_cmd->add_option("--domain", gen.domain, "Domain: sr|lbf|rw|pp")->required();
  generate_cmd->add_option("--agents", gen.config.agents, "Number of agents")->required();
  generate_cmd->add_option("--tasks", gen.config.tasks, "Number of tasks")->required();
  generate_cmd->add_option("--episodes", gen.config.episodes, "Number of episodes")->required();
  generate_cmd->add_option("--seed", gen.config.seed, "Corpus seed");
  generate_cmd->add_option("--out", gen.out, "Output JSONL path")->required();
  generate_cmd->add_option("--grid-width", gen.config.grid_width, "Grid width (default 10)");
  generate_cmd->add_option("--grid-height", gen.config.grid_height, "Grid height (default 10)");
  generate_cmd->add_option("--joint-fraction", gen.config.joint_fraction,
                           "Share of joint tasks for sr/lbf (default 0.35)");
  generate_cmd->add_option("--pp-depth", gen.config.precedence_depth,
                           "Pressure-plate chain length (default: all tasks)");
  generate_cmd->add_option("--route-length", gen.config.route_length,
                           "Warehouse route legs per task (default 1)");
  generate_cmd->add_option("--radius", gen.config.observation_radius,
                           "Observation radius (default 4 for pp, 1 otherwise)");

  SummarizeArgs sum;
  auto* summarize_cmd = app.add_subcommand("summarize", "Summarize a corpus as Hasse diagrams");
  summarize_cmd->add_option("--episodes", sum.episodes_path, "Corpus JSONL path")->required();
  summarize_cmd->add_option("--filter-agents", sum.filter_agents, "Keep these agents, e.g. 1,2");
  summarize_cmd->add_option("--filter-tasks", sum.filter_tasks, "Keep these tasks, e.g. A,B");
  summarize_cmd->add_option("--top-k", sum.top_k, "Diagram groups to show (default 3)");
  summarize_cmd->add_flag("--verify", sum.verify, "Verify correctness and completeness");
  summarize_cmd->add_option("--format", sum.format, "Output format: text|json|dot");
  summarize_cmd->add_option("--out", sum.out, "Write output to a file instead of stdout");

  ExplainArgs exp;
  auto* explain_cmd = app.add_subcommand("explain", "Answer a query about the corpus");
  explain_cmd->require_subcommand(1);
  auto* when_cmd = explain_cmd->add_subcommand("when", "When do agents complete a task?");
  auto* whynot_cmd =
      explain_cmd->add_subcommand("whynot", "Why don't agents complete a task under conditions?");
  auto* what_cmd = explain_cmd->add_subcommand("what", "What do the agents do after a task?");
  for (auto* cmd : {when_cmd, whynot_cmd, what_cmd}) {
    cmd->add_option("--episodes", exp.episodes_path, "Corpus JSONL path")->required();
    cmd->add_option("--task", exp.task, "Queried task")->required();
    cmd->add_option("--format", exp.format, "Output format: text|json");
  }
  for (auto* cmd : {when_cmd, whynot_cmd}) {
    cmd->add_option("--agents", exp.agents, "Queried agent group, e.g. 2,4")->required();
    cmd->add_option("--features", exp.features,
                    "Override relevant features: atoms TASK or i:TASK, comma-separated");
    cmd->add_option("--nontargets", exp.nontargets, "Non-target nodes: matching|all");
    cmd->add_flag("--superset", exp.superset, "Match groups containing the queried agents");
  }
  whynot_cmd
      ->add_option("--given", exp.given,
                   "Scenario conditions: atoms TASK or i:TASK, comma-separated")
      ->required();

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("--episodes", st.episodes_path, "Corpus JSONL path")->required();
  stats_cmd->add_flag("--baseline", st.baseline, "Include per-agent baseline graph sizes");
  stats_cmd->add_option("--format", st.format, "Output format: text|json");

  ExportDotArgs dot;
  auto* export_cmd = app.add_subcommand("export-dot", "Export one episode's diagram as DOT");
  export_cmd->add_option("--episodes", dot.episodes_path, "Corpus JSONL path")->required();
  export_cmd->add_option("--episode", dot.episode_id, "Episode id, e.g. e1")->required();
  export_cmd->add_option("--out", dot.out, "Output DOT path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate_cmd->parsed()) run_generate(gen);
    if (summarize_cmd->parsed()) run_summarize(sum);
    if (when_cmd->parsed()) run_explain(QueryKind::When, exp);
    if (whynot_cmd->parsed()) run_explain(QueryKind::WhyNot, exp);
    if (what_cmd->parsed()) run_explain(QueryKind::What, exp);
    if (stats_cmd->parsed()) run_stats(st);
    if (export_cmd->parsed()) run_export_dot(dot);
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const QueryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
