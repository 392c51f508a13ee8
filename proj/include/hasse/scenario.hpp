#pragma once
// Scripted decentralized gridworld scenarios. Four domains produce episode
// corpora with seeded stochastic task orderings: search-and-rescue and
// foraging (with joint tasks), warehouse pickup/delivery routes, and
// pressure-plate precedence chains. Controllers act on local observations
// only; joint tasks complete when all assigned agents co-occupy the cell.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hasse/core.hpp"

namespace hasse {

enum class Domain { SR, LBF, RW, PP };

inline std::string domain_name(Domain d) {
  switch (d) {
    case Domain::SR: return "sr";
    case Domain::LBF: return "lbf";
    case Domain::RW: return "rw";
    case Domain::PP: return "pp";
  }
  return "?";
}

inline std::optional<Domain> parse_domain(const std::string& s) {
  if (s == "sr") return Domain::SR;
  if (s == "lbf") return Domain::LBF;
  if (s == "rw") return Domain::RW;
  if (s == "pp") return Domain::PP;
  return std::nullopt;
}

struct ScenarioConfig {
  Domain domain = Domain::SR;
  int agents = 2;
  int tasks = 4;
  int episodes = 1;
  std::uint64_t seed = 0;
  int grid_width = 0;        // 0 -> 10
  int grid_height = 0;       // 0 -> 10
  double joint_fraction = -1.0;  // SR/LBF share of joint tasks; <0 -> 0.35
  int precedence_depth = -1;     // PP chain length; -1 -> all tasks
  int route_length = -1;         // RW legs per task; -1 -> 1 (pickup then deliver)
  int observation_radius = -1;   // -1 -> 4 for PP, 1 otherwise
};

inline constexpr double kCompletionReward = 1.0;
inline constexpr double kCompletionThreshold = 0.5;

struct StepRecord {
  AgentId agent = 0;
  int step = 0;
  std::string observation;
  std::string action;
  double reward = 0.0;
  std::optional<TaskId> completed;  // set iff reward >= kCompletionThreshold
};

/// Ordered completions of one agent's step stream.
inline TaskSequence trace_of(const std::vector<StepRecord>& records) {
  TaskSequence seq;
  std::set<TaskId> seen;
  int last_step = -1;
  for (const auto& r : records) {
    if (seq.agent == 0) seq.agent = r.agent;
    if (r.agent != seq.agent) throw ValidationError("trace_of: records from multiple agents");
    if (r.step < last_step) throw ValidationError("trace_of: records not step-sorted");
    last_step = r.step;
    if (!r.completed) continue;
    if (!seen.insert(*r.completed).second)
      throw DuplicateTaskError("trace_of: task " + *r.completed + " completed twice by agent " +
                               std::to_string(seq.agent));
    seq.tasks.push_back(*r.completed);
  }
  return seq;
}

namespace sim {

/// SplitMix64; avoids the standard distributions so that streams are
/// identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : next() % n; }

  double unit() { return double(next() >> 11) / double(1ull << 53); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t episode, std::uint64_t attempt) {
  Rng r(seed ^ (episode + 1) * 0x9e3779b97f4a7c15ull ^ (attempt + 1) * 0xd1b54a32d192ed03ull);
  return r.next();
}

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

struct TaskSite {
  TaskId id;
  std::vector<Cell> waypoints;  // completion at the last one
  std::set<AgentId> assigned;
  int precedence = -1;  // PP chain index; -1 unconstrained
};

struct Action {
  int dx = 0;
  int dy = 0;
  std::string label = "stay";
};

/// What one agent can see: its own position plus cell contents within the
/// observation radius. Controllers receive nothing else about the world.
struct Observation {
  AgentId agent = 0;
  int step = 0;
  Cell position;
  int radius = 1;
  std::vector<int> patch;  // (2r+1)^2 cells; -1 off-grid, else bit0 other agent, bit1 task cell

  bool operator==(const Observation&) const = default;

  std::string summary() const {
    std::string s = "pos=" + std::to_string(position.x) + "," + std::to_string(position.y) +
                    " patch=";
    for (int c : patch) s += c < 0 ? 'x' : static_cast<char>('0' + c);
    return s;
  }
};

/// Policy memory of one agent: its mission briefing (assigned tasks and their
/// waypoint cells), its own completion history, and navigation state. The
/// decision function reads this and the local observation only.
struct AgentMind {
  AgentId id = 0;
  Rng rng{0};
  std::vector<std::size_t> assigned;                 // world task indices
  std::map<std::size_t, std::vector<Cell>> routes;   // briefing: waypoints per assigned task
  std::set<std::size_t> done;                        // own observed completions
  std::optional<std::size_t> target;
  std::size_t waypoint = 0;
  int waiting = 0;
  int patience = 40;
  bool ordered = false;  // visit assigned tasks in listed order (pressure plates)
};

struct World {
  ScenarioConfig config;
  int width = 0;
  int height = 0;
  std::vector<TaskSite> tasks;
  std::vector<Cell> positions;     // index agent-1
  std::vector<AgentMind> minds;    // index agent-1
  std::vector<bool> complete;      // per task
  std::vector<std::size_t> progress;  // per task: waypoints reached (solo routes)
  int step = 0;
};

inline Observation observe(const World& w, AgentId agent) {
  Observation obs;
  obs.agent = agent;
  obs.step = w.step;
  obs.position = w.positions[static_cast<std::size_t>(agent - 1)];
  obs.radius = w.config.observation_radius;
  const int r = obs.radius;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int x = obs.position.x + dx;
      const int y = obs.position.y + dy;
      if (x < 0 || y < 0 || x >= w.width || y >= w.height) {
        obs.patch.push_back(-1);
        continue;
      }
      int v = 0;
      for (std::size_t a = 0; a < w.positions.size(); ++a)
        if (static_cast<AgentId>(a + 1) != agent && w.positions[a] == Cell{x, y}) v |= 1;
      for (std::size_t t = 0; t < w.tasks.size(); ++t)
        if (!w.complete[t])
          for (const Cell& c : w.tasks[t].waypoints)
            if (c == Cell{x, y}) v |= 2;
      obs.patch.push_back(v);
    }
  }
  return obs;
}

/// Greedy navigation with seeded tie-breaking. Depends only on the mind and
/// the local observation; retargets after waiting too long at a cell that
/// will not complete (e.g. a joint task whose partners are elsewhere).
inline Action decide(AgentMind& mind, const Observation& obs) {
  auto remaining = [&] {
    std::vector<std::size_t> out;
    for (std::size_t t : mind.assigned)
      if (!mind.done.count(t)) out.push_back(t);
    return out;
  };

  const auto todo = remaining();
  if (todo.empty()) return Action{0, 0, "idle"};

  if (mind.target && mind.done.count(*mind.target)) {
    mind.target.reset();
    mind.waypoint = 0;
    mind.waiting = 0;
  }
  if (!mind.target) {
    if (mind.ordered) {
      mind.target = todo.front();
    } else {
      int best = -1;
      std::vector<std::size_t> ties;
      for (std::size_t t : todo) {
        const int d = manhattan(obs.position, mind.routes.at(t).front());
        if (best < 0 || d < best) {
          best = d;
          ties.assign(1, t);
        } else if (d == best) {
          ties.push_back(t);
        }
      }
      mind.target = ties[mind.rng.below(ties.size())];
    }
    mind.waypoint = 0;
    mind.waiting = 0;
  }

  const auto& route = mind.routes.at(*mind.target);
  if (obs.position == route[mind.waypoint] && mind.waypoint + 1 < route.size()) {
    ++mind.waypoint;
    mind.waiting = 0;
  }
  const Cell goal = route[mind.waypoint];
  if (obs.position == goal) {
    // Standing on the completion cell; completion is adjudicated by the
    // environment (partners or a precedence predecessor may be pending).
    ++mind.waiting;
    if (!mind.ordered && mind.waiting > mind.patience && todo.size() > 1) {
      std::vector<std::size_t> others;
      for (std::size_t t : todo)
        if (t != *mind.target) others.push_back(t);
      mind.target = others[mind.rng.below(others.size())];
      mind.waypoint = 0;
      mind.waiting = 0;
    }
    return Action{0, 0, "wait"};
  }
  mind.waiting = 0;

  const int dx = goal.x > obs.position.x ? 1 : goal.x < obs.position.x ? -1 : 0;
  const int dy = goal.y > obs.position.y ? 1 : goal.y < obs.position.y ? -1 : 0;
  if (dx != 0 && dy != 0) {
    if (mind.rng.below(2) == 0) return Action{dx, 0, dx > 0 ? "right" : "left"};
    return Action{0, dy, dy > 0 ? "down" : "up"};
  }
  if (dx != 0) return Action{dx, 0, dx > 0 ? "right" : "left"};
  return Action{0, dy, dy > 0 ? "down" : "up"};
}

inline std::string task_name(int index) {
  std::string name(1, static_cast<char>('A' + index % 26));
  if (index >= 26) name += std::to_string(index / 26);
  return name;
}

inline ScenarioConfig with_defaults(ScenarioConfig c) {
  if (c.grid_width <= 0) c.grid_width = 10;
  if (c.grid_height <= 0) c.grid_height = 10;
  if (c.joint_fraction < 0) c.joint_fraction = 0.35;
  if (c.domain != Domain::SR && c.domain != Domain::LBF) c.joint_fraction = 0.0;
  if (c.agents < 2) c.joint_fraction = 0.0;
  if (c.route_length < 0) c.route_length = 1;
  if (c.domain != Domain::RW) c.route_length = 0;
  if (c.precedence_depth < 0) c.precedence_depth = c.domain == Domain::PP ? c.tasks : 0;
  if (c.observation_radius < 0) c.observation_radius = c.domain == Domain::PP ? 4 : 1;
  return c;
}

inline void check_config(const ScenarioConfig& c) {
  if (c.agents < 1) throw InfeasibleConfigError("agents must be >= 1");
  if (c.tasks < 1) throw InfeasibleConfigError("tasks must be >= 1");
  if (c.episodes < 1) throw InfeasibleConfigError("episodes must be >= 1");
  if (c.joint_fraction < 0.0 || c.joint_fraction > 1.0)
    throw InfeasibleConfigError("joint fraction must lie in [0,1]");
  if (c.precedence_depth > c.tasks)
    throw InfeasibleConfigError("precedence chain longer than the task count");
  const long long cells = static_cast<long long>(c.grid_width) * c.grid_height;
  const long long needed = static_cast<long long>(c.tasks) * (c.route_length + 1);
  if (needed > cells) throw InfeasibleConfigError("grid too small for the requested tasks");
}

inline World make_world(const ScenarioConfig& config, std::uint64_t world_seed) {
  World w;
  w.config = config;
  w.width = config.grid_width;
  w.height = config.grid_height;
  Rng rng(world_seed);

  // Distinct cells for all task waypoints.
  std::set<Cell> used;
  auto fresh_cell = [&] {
    while (true) {
      Cell c{static_cast<int>(rng.below(static_cast<std::uint64_t>(w.width))),
             static_cast<int>(rng.below(static_cast<std::uint64_t>(w.height)))};
      if (used.insert(c).second) return c;
    }
  };

  for (int t = 0; t < config.tasks; ++t) {
    TaskSite site;
    site.id = task_name(t);
    for (int leg = 0; leg <= config.route_length; ++leg) site.waypoints.push_back(fresh_cell());
    if (t < config.precedence_depth) site.precedence = t;
    w.tasks.push_back(std::move(site));
  }

  // Assignment: joint groups for SR/LBF, balanced solo round-robin otherwise.
  if (config.domain == Domain::SR || config.domain == Domain::LBF) {
    for (auto& site : w.tasks) {
      int size = 1;
      if (rng.unit() < config.joint_fraction)
        size = 2 + static_cast<int>(config.agents >= 3 ? rng.below(2) : 0);
      std::vector<AgentId> pool;
      for (int a = 1; a <= config.agents; ++a) pool.push_back(a);
      for (int k = 0; k < size; ++k) {
        const std::size_t pick = rng.below(pool.size());
        site.assigned.insert(pool[static_cast<std::size_t>(pick)]);
        pool.erase(pool.begin() + static_cast<long>(pick));
      }
    }
  } else {
    std::vector<AgentId> order;
    for (int a = 1; a <= config.agents; ++a) order.push_back(a);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t t = 0; t < w.tasks.size(); ++t)
      w.tasks[t].assigned.insert(order[t % order.size()]);
  }

  for (int a = 1; a <= config.agents; ++a) {
    w.positions.push_back(Cell{static_cast<int>(rng.below(static_cast<std::uint64_t>(w.width))),
                               static_cast<int>(rng.below(static_cast<std::uint64_t>(w.height)))});
    AgentMind mind;
    mind.id = a;
    mind.rng = Rng(rng.next());
    mind.patience = 2 * (w.width + w.height);
    mind.ordered = config.domain == Domain::PP;
    w.minds.push_back(std::move(mind));
  }
  for (std::size_t t = 0; t < w.tasks.size(); ++t)
    for (AgentId a : w.tasks[t].assigned) {
      auto& mind = w.minds[static_cast<std::size_t>(a - 1)];
      mind.assigned.push_back(t);
      mind.routes[t] = w.tasks[t].waypoints;
    }
  // Pressure plates are visited in chain order; a later plate cannot fire
  // before its predecessor, so pursuing it early would stall the chain.
  for (auto& mind : w.minds)
    if (mind.ordered)
      std::sort(mind.assigned.begin(), mind.assigned.end(), [&](std::size_t a, std::size_t b) {
        return w.tasks[a].precedence != w.tasks[b].precedence
                   ? w.tasks[a].precedence < w.tasks[b].precedence
                   : a < b;
      });

  w.complete.assign(w.tasks.size(), false);
  w.progress.assign(w.tasks.size(), 0);
  return w;
}

/// One synchronous tick: observe and decide for every agent against the same
/// pre-move state, apply moves, then adjudicate completions. Precedence is
/// checked against completions from previous ticks, so a chain advances at
/// most one link per tick.
inline std::vector<StepRecord> step_world(World& w) {
  const std::vector<bool> completed_before = w.complete;
  auto advance_routes = [&] {
    for (std::size_t t = 0; t < w.tasks.size(); ++t) {
      const auto& site = w.tasks[t];
      if (w.complete[t] || site.waypoints.size() < 2) continue;
      const AgentId a = *site.assigned.begin();
      while (w.progress[t] < site.waypoints.size() &&
             w.positions[static_cast<std::size_t>(a - 1)] == site.waypoints[w.progress[t]])
        ++w.progress[t];
    }
  };
  advance_routes();
  std::vector<Action> actions;
  std::vector<Observation> observations;
  for (int a = 1; a <= w.config.agents; ++a) {
    observations.push_back(observe(w, a));
    actions.push_back(decide(w.minds[static_cast<std::size_t>(a - 1)], observations.back()));
  }
  for (std::size_t i = 0; i < w.positions.size(); ++i) {
    auto& p = w.positions[i];
    p.x = std::clamp(p.x + actions[i].dx, 0, w.width - 1);
    p.y = std::clamp(p.y + actions[i].dy, 0, w.height - 1);
  }

  std::vector<StepRecord> records(w.positions.size());
  for (std::size_t i = 0; i < w.positions.size(); ++i) {
    records[i].agent = static_cast<AgentId>(i + 1);
    records[i].step = w.step;
    records[i].observation = observations[i].summary();
    records[i].action = actions[i].label;
  }

  advance_routes();
  for (std::size_t t = 0; t < w.tasks.size(); ++t) {
    if (w.complete[t]) continue;
    const auto& site = w.tasks[t];
    if (site.precedence > 0 && !completed_before[static_cast<std::size_t>(t - 1)]) continue;
    if (site.waypoints.size() > 1) {
      if (w.progress[t] < site.waypoints.size()) continue;
    } else {
      bool all_present = true;
      for (AgentId a : site.assigned)
        if (!(w.positions[static_cast<std::size_t>(a - 1)] == site.waypoints.back()))
          all_present = false;
      if (!all_present) continue;
    }
    w.complete[t] = true;
    for (AgentId a : site.assigned) {
      auto& rec = records[static_cast<std::size_t>(a - 1)];
      rec.reward = kCompletionReward;
      rec.completed = site.id;
      w.minds[static_cast<std::size_t>(a - 1)].done.insert(t);
    }
  }
  ++w.step;
  return records;
}

struct EpisodeRun {
  bool success = false;
  std::vector<std::vector<StepRecord>> records;  // per agent, index agent-1
};

inline EpisodeRun run_episode(const ScenarioConfig& config, std::uint64_t world_seed) {
  World w = make_world(config, world_seed);
  const int cap = 50 * w.width * w.height;
  EpisodeRun run;
  run.records.resize(static_cast<std::size_t>(config.agents));
  while (w.step < cap) {
    auto records = step_world(w);
    for (std::size_t i = 0; i < records.size(); ++i) run.records[i].push_back(records[i]);
    bool all = true;
    for (bool c : w.complete)
      if (!c) all = false;
    if (all) {
      run.success = true;
      break;
    }
  }
  return run;
}

}  // namespace sim

/// Generates a corpus of fully completed episodes. Deterministic for a given
/// seed; stalled simulations are retried with an advanced seed and counted in
/// the episode metadata.
inline std::vector<Episode> generate(const ScenarioConfig& raw) {
  const ScenarioConfig config = sim::with_defaults(raw);
  sim::check_config(config);

  constexpr int kMaxAttempts = 50;
  std::vector<Episode> episodes;
  for (int e = 0; e < config.episodes; ++e) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      const auto run = sim::run_episode(
          config, sim::mix_seed(config.seed, static_cast<std::uint64_t>(e),
                                static_cast<std::uint64_t>(attempt)));
      if (!run.success) continue;
      std::vector<TaskSequence> sequences;
      for (int a = 1; a <= config.agents; ++a) {
        auto seq = trace_of(run.records[static_cast<std::size_t>(a - 1)]);
        seq.agent = a;  // agents with no completions still get a sequence
        sequences.push_back(std::move(seq));
      }
      EpisodeMeta meta;
      meta.domain = domain_name(config.domain);
      meta.seed = config.seed;
      meta.agents = config.agents;
      meta.tasks = config.tasks;
      meta.regenerated = attempt;
      episodes.push_back(make_episode("e" + std::to_string(e + 1), std::move(sequences), meta));
      done = true;
    }
    if (!done)
      throw InfeasibleConfigError("episode " + std::to_string(e + 1) + " stalled after " +
                                  std::to_string(kMaxAttempts) + " attempts");
  }
  return episodes;
}

}  // namespace hasse
