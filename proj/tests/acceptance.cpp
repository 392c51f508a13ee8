// Acceptance suite: exercises every top-level guarantee end to end and
// prints one PASS/FAIL line per criterion. Usage:
//   hasse_acceptance <path-to-cli> [work-dir]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hasse/baseline.hpp"
#include "hasse/explain.hpp"
#include "hasse/io.hpp"
#include "hasse/scenario.hpp"
#include "hasse/summarize.hpp"
#include "test_util.hpp"

namespace {

using namespace hasse;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void criterion(int number, const std::string& name, bool pass, const std::string& detail = "") {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << number << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- criterion 1: correctness and completeness on randomized episodes ------

void run_theorem_suite() {
  testutil::Rng rng(20240001);
  const auto start = Clock::now();
  int checked = 0, good = 0;
  for (int round = 0; round < 500; ++round) {
    const auto e = testutil::random_episode(rng, "t" + std::to_string(round));
    const auto d = hds_build(e);
    ++checked;
    if (validate(d) == std::nullopt && verify_correct(d, e) && verify_complete(d, e)) ++good;
  }
  const double elapsed = seconds_since(start);
  criterion(1, "summaries of randomized episodes verify correct and complete",
            checked == 500 && good == checked && elapsed < 30.0,
            std::to_string(good) + "/" + std::to_string(checked) + " in " +
                std::to_string(elapsed) + "s");
}

// --- criterion 2: transitive reduction against the closure oracle ----------

void run_reduction_suite() {
  testutil::Rng rng(20240002);
  int good = 0;
  const int rounds = 250;
  for (int round = 0; round < rounds; ++round) {
    const auto dag = testutil::random_dag(rng);
    const auto reduced = transitive_reduction(dag.n, dag.edges);
    if (reduced == testutil::reduction_oracle(dag.n, dag.edges) &&
        testutil::closure_oracle(dag.n, reduced) == testutil::closure_oracle(dag.n, dag.edges))
      ++good;
  }
  criterion(2, "transitive reduction matches the unique-reduction oracle", good == rounds,
            std::to_string(good) + "/" + std::to_string(rounds));
}

// --- criterion 3: minimizer correctness and minimality ----------------------

BooleanSpec random_spec(testutil::Rng& rng, int max_vars) {
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_vars)));
  const Minterm space = 1u << n;
  std::set<Minterm> targets, non_targets;
  const int n_targets = 1 + static_cast<int>(rng.below(8));
  const int n_off = static_cast<int>(rng.below(9));
  for (int i = 0; i < n_targets; ++i) targets.insert(static_cast<Minterm>(rng.below(space)));
  for (int i = 0; i < n_off; ++i) {
    const Minterm m = static_cast<Minterm>(rng.below(space));
    if (!targets.count(m)) non_targets.insert(m);
  }
  std::vector<Feature> variables;
  for (int i = 0; i < n; ++i) variables.push_back(Feature::task_done(sim::task_name(i)));
  return BooleanSpec::make(std::move(variables), std::move(targets), std::move(non_targets));
}

void run_minimizer_suite() {
  testutil::Rng rng(20240003);
  const auto start = Clock::now();
  int truth_checked = 0, truth_good = 0;
  int minimal_checked = 0, minimal_good = 0;
  for (int round = 0; round < 1000; ++round) {
    const bool small = round % 10 < 3;  // 300 specs go through the minimality oracle
    const auto spec = random_spec(rng, small ? 4 : 10);
    const auto f = minimize(spec);
    ++truth_checked;
    bool ok = !f.approximate;
    for (Minterm m : spec.targets)
      if (!f.evaluate(m)) ok = false;
    for (Minterm m : spec.non_targets)
      if (f.evaluate(m)) ok = false;
    if (ok) ++truth_good;
    if (small) {
      ++minimal_checked;
      const auto oracle = testutil::min_cover_oracle(spec);
      if (static_cast<int>(f.implicants.size()) == oracle.count) ++minimal_good;
    }
  }
  const double elapsed = seconds_since(start);
  criterion(3, "minimized formulas separate targets and are minimal",
            truth_good == truth_checked && minimal_good == minimal_checked && elapsed < 60.0,
            std::to_string(truth_good) + "/" + std::to_string(truth_checked) + " separations, " +
                std::to_string(minimal_good) + "/" + std::to_string(minimal_checked) +
                " minimal, " + std::to_string(elapsed) + "s");
}

// --- criteria 4, 5, 8: generated corpora ------------------------------------

struct CorpusSpec {
  Domain domain;
  int agents;
  int tasks;
  int expected_vertices;
};

std::vector<Episode> corpus_for(const CorpusSpec& cs, std::uint64_t seed) {
  ScenarioConfig config;
  config.domain = cs.domain;
  config.agents = cs.agents;
  config.tasks = cs.tasks;
  config.episodes = 100;
  config.seed = seed;
  return generate(config);
}

struct BaselineOutcome {
  bool ok = true;
  std::string detail;
};

BaselineOutcome run_structure_and_performance() {
  const std::vector<CorpusSpec> specs{{Domain::SR, 9, 7, 8},
                                      {Domain::LBF, 9, 9, 10},
                                      {Domain::RW, 4, 19, 20},
                                      {Domain::PP, 7, 6, 7}};
  bool sizes_ok = true;
  bool baseline_ok = true;
  std::string size_detail, baseline_detail;
  double rw_seconds = -1.0;

  for (const auto& cs : specs) {
    const auto episodes = corpus_for(cs, 1337);

    const auto start = Clock::now();
    const auto diagrams = build_all(episodes);
    const auto agg = aggregate(episodes);
    const double elapsed = seconds_since(start);
    if (cs.domain == Domain::RW) rw_seconds = elapsed;

    for (const auto& d : diagrams)
      if (static_cast<int>(d.vertices.size()) != cs.expected_vertices) sizes_ok = false;
    size_detail += domain_name(cs.domain) + "=" +
                   std::to_string(agg.groups.front().stats.vertex_count) + " ";

    // Baseline comparison needs behavioral diversity to be meaningful.
    if (agg.groups.size() < 2) {
      baseline_ok = false;
      baseline_detail += domain_name(cs.domain) + ":no-diversity ";
      continue;
    }
    std::size_t baseline_size = 0;
    for (int a = 1; a <= cs.agents; ++a) {
      const auto g = baseline_build(episodes, a);
      baseline_size += g.node_count() + g.edge_count();
    }
    const double hds_size = agg.mean_vertices() + agg.mean_edges();
    if (double(baseline_size) <= hds_size) baseline_ok = false;
    baseline_detail += domain_name(cs.domain) + "=" + std::to_string(baseline_size) + "vs" +
                       std::to_string(static_cast<int>(hds_size)) + " ";
  }

  criterion(4, "generated corpora reproduce the expected diagram sizes", sizes_ok, size_detail);
  criterion(5, "summarizing 100 warehouse episodes stays under one second",
            rw_seconds >= 0 && rw_seconds < 1.0, std::to_string(rw_seconds) + "s");
  return BaselineOutcome{baseline_ok, baseline_detail};
}

// --- criterion 6: golden explanation texts ----------------------------------

void run_golden_explanations() {
  bool ok = true;
  std::string detail;
  auto expect = [&](const std::string& label, const std::string& got, const std::string& want) {
    if (got != want) {
      ok = false;
      detail += label + " ";
    }
  };

  const auto estar = build_all({testutil::estar()});
  const auto e3 = build_all({testutil::e3()});
  const auto e4 = build_all({testutil::e4()});
  const auto ew = build_all({testutil::ew()});

  Query when;
  when.kind = QueryKind::When;
  when.agents = {1, 2};
  when.task = "C";
  expect("when-ordered", explain_when(when, estar).text,
         "For agents 1 and 2 to complete task C, agent 1 must complete task C, agent 2 must "
         "complete task C, task A must be completed, and task B must be completed.");
  expect("when-uncertain", explain_when(when, e3).text,
         "For agents 1 and 2 to complete task C, agent 1 must complete task C, agent 2 must "
         "complete task C, and task A must be completed. Additionally, task B may need to be "
         "completed.");

  Query when24 = when;
  when24.agents = {2, 4};
  expect("when-template", explain_when(when24, e4).text,
         "For agents 2 and 4 to complete task C, agent 2 must complete task C, agent 4 must "
         "complete task C, and task A must be completed. Additionally, task B may need to be "
         "completed.");

  Query whynot = when;
  whynot.kind = QueryKind::WhyNot;
  whynot.conditions = {Feature::task_done("A")};
  expect("whynot-ordered", explain_whynot(whynot, estar).text,
         "Task B must be completed, and agents 1 and 2 must complete task C, for agents 1 and 2 "
         "to complete task C.");
  expect("whynot-uncertain", explain_whynot(whynot, e3).text,
         "Task B may need to be completed, and agents 1 and 2 must complete task C, for agents 1 "
         "and 2 to complete task C.");

  Query whynot24 = whynot;
  whynot24.agents = {2, 4};
  whynot24.conditions = {Feature::task_done("A"), Feature::agent_did_task(2, "C"),
                         Feature::agent_did_task(4, "C")};
  expect("whynot-template", explain_whynot(whynot24, e4).text,
         "Task B may need to be completed for agents 2 and 4 to complete task C.");

  Query what;
  what.kind = QueryKind::What;
  what.task = "A";
  expect("what-successor", explain_what(what, estar).text,
         "After task A is completed, task C is completed. Additionally, task B may be "
         "completed.");
  what.task = "C";
  expect("what-sink", explain_what(what, estar).text, "No tasks follow task C.");
  expect("what-template", explain_what(what, ew).text,
         "After task C is completed, tasks D and E are completed. Additionally, task B may be "
         "completed.");

  criterion(6, "worked corpora reproduce the golden explanation texts", ok, detail);
}

// --- criterion 7: uncertainty soundness --------------------------------------

void run_uncertainty_soundness() {
  bool ok = true;
  std::string detail;

  // Chain-only corpora: no explanation may contain a may condition.
  ScenarioConfig chain_config;
  chain_config.domain = Domain::RW;
  chain_config.agents = 1;
  chain_config.tasks = 5;
  chain_config.episodes = 20;
  chain_config.seed = 5;
  const auto chain_corpus = generate(chain_config);
  const auto chain_diagrams = build_all(chain_corpus);
  for (const auto& d : chain_diagrams)
    if (d.edges.size() != d.vertices.size() - 1) ok = false;  // must actually be chains
  for (int t = 0; t < chain_config.tasks; ++t) {
    Query q;
    q.kind = QueryKind::When;
    q.agents = {1};
    q.task = sim::task_name(t);
    if (!explain_when(q, chain_diagrams).uncertain_features.empty()) {
      ok = false;
      detail += "chain-when ";
    }
    q.kind = QueryKind::What;
    if (!explain_what(q, chain_diagrams).uncertain_tasks.empty()) {
      ok = false;
      detail += "chain-what ";
    }
  }

  // A deliberately unordered task must surface as uncertain, never certain.
  const auto e3 = build_all({testutil::e3()});
  Query when;
  when.kind = QueryKind::When;
  when.agents = {1, 2};
  when.task = "C";
  const auto ex_when = explain_when(when, e3);
  bool b_uncertain = false, b_certain = false;
  for (const auto& f : ex_when.uncertain_features)
    if (f == Feature::task_done("B")) b_uncertain = true;
  for (const auto& f : ex_when.certain_features)
    if (f == Feature::task_done("B")) b_certain = true;
  if (!b_uncertain || b_certain) {
    ok = false;
    detail += "e3-when ";
  }
  Query what;
  what.kind = QueryKind::What;
  what.task = "C";
  const auto ex_what = explain_what(what, e3);
  if (ex_what.uncertain_tasks != std::vector<TaskId>{"B"} || !ex_what.certain_tasks.empty()) {
    ok = false;
    detail += "e3-what ";
  }

  // Directly ordered evidence wins over co-occurrence (the overlap rule).
  const auto overlap = build_all({make_episode("direct", {{1, {"C", "B"}}}),
                                  make_episode("apart", {{1, {"C"}}, {2, {"B"}}})});
  const auto ex_overlap = explain_what(what, overlap);
  if (ex_overlap.certain_tasks != std::vector<TaskId>{"B"} ||
      !ex_overlap.uncertain_tasks.empty()) {
    ok = false;
    detail += "overlap ";
  }

  criterion(7, "uncertain conditions appear exactly when ordering is unknown", ok, detail);
}

// --- criterion 9: CLI determinism --------------------------------------------

struct CliRun {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run_cli(const std::string& cli, const std::string& args,
               const std::filesystem::path& work, const std::string& tag) {
  const auto out_path = work / (tag + ".out");
  const std::string cmd =
      "\"" + cli + "\" " + args + " > \"" + out_path.string() + "\" 2> /dev/null";
  CliRun run;
  const int rc = std::system(cmd.c_str());
  run.exit_code = rc < 0 ? rc : WEXITSTATUS(rc);
  run.out = slurp(out_path);
  return run;
}

void run_cli_determinism(const std::string& cli, const std::filesystem::path& work) {
  bool ok = true;
  std::string detail;
  auto twice = [&](const std::string& label, const std::string& args) {
    const auto a = run_cli(cli, args, work, label + "-1");
    const auto b = run_cli(cli, args, work, label + "-2");
    if (a.exit_code != 0 || b.exit_code != 0 || a.out != b.out) {
      ok = false;
      detail += label + "(rc=" + std::to_string(a.exit_code) + ") ";
    }
  };

  const auto corpus1 = (work / "corpus1.jsonl").string();
  const auto corpus2 = (work / "corpus2.jsonl").string();
  const std::string gen_args = "generate --domain sr --agents 3 --tasks 4 --episodes 12 --seed 7";
  const auto g1 = run_cli(cli, gen_args + " --out \"" + corpus1 + "\"", work, "gen-1");
  const auto g2 = run_cli(cli, gen_args + " --out \"" + corpus2 + "\"", work, "gen-2");
  if (g1.exit_code != 0 || g2.exit_code != 0 || slurp(corpus1) != slurp(corpus2)) {
    ok = false;
    detail += "generate ";
  }

  // Pick a real completion from the corpus for the queries.
  const auto episodes = load_episodes(corpus1);
  const auto d0 = hds_build(episodes.front());
  std::string task, agents, other_task;
  for (const auto& v : d0.vertices) {
    if (v.is_root()) continue;
    if (task.empty()) {
      task = v.task();
      for (AgentId a : v.agents()) agents += (agents.empty() ? "" : ",") + std::to_string(a);
    } else if (other_task.empty()) {
      other_task = v.task();
    }
  }

  twice("summarize", "summarize --episodes \"" + corpus1 + "\" --top-k 5");
  twice("summarize-verify", "summarize --episodes \"" + corpus1 + "\" --verify --format json");
  twice("stats", "stats --episodes \"" + corpus1 + "\" --baseline");
  twice("explain-when",
        "explain when --episodes \"" + corpus1 + "\" --agents " + agents + " --task " + task);
  twice("explain-whynot", "explain whynot --episodes \"" + corpus1 + "\" --agents " + agents +
                              " --task " + task + " --given \"" + other_task + "\"");
  twice("explain-what", "explain what --episodes \"" + corpus1 + "\" --task " + task);
  twice("export-dot", "export-dot --episodes \"" + corpus1 + "\" --episode e1");

  criterion(9, "repeated CLI invocations are byte-identical", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: hasse_acceptance <path-to-cli> [work-dir]\n";
    return 64;
  }
  const std::string cli = argv[1];
  const std::filesystem::path work = argc > 2 ? argv[2] : "acceptance_work";
  std::filesystem::create_directories(work);

  run_theorem_suite();
  run_reduction_suite();
  run_minimizer_suite();
  const auto baseline = run_structure_and_performance();
  run_golden_explanations();
  run_uncertainty_soundness();
  criterion(8, "per-agent baselines are larger than the mean diagram", baseline.ok,
            baseline.detail);
  run_cli_determinism(cli, work);

  if (g_failures == 0) {
    std::cout << "all criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria failed\n";
  return 1;
}
