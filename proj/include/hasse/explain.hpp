#pragma once
// "When", "Why Not", and "What" query engines over sets of Hasse diagrams:
// feature relevance, node encoding with uncertainty, boolean minimization,
// and the must/may sentence renderer.

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hasse/boolmin.hpp"
#include "hasse/core.hpp"
#include "hasse/uncertainty.hpp"

namespace hasse {

enum class QueryKind { When, WhyNot, What };

struct Query {
  QueryKind kind = QueryKind::When;
  std::set<AgentId> agents;      // G_q; required for When/WhyNot, ignored by What
  TaskId task;                   // the queried task
  std::set<Feature> conditions;  // WhyNot only: the user-provided scenario
  bool superset_match = false;   // match groups containing G_q instead of equal to it
  bool nontargets_all = false;   // draw non-target nodes from all diagrams
  std::optional<std::vector<Feature>> feature_override;
};

struct ExplanationDiagnostics {
  int dropped_conflicts = 0;  // indistinguishable observations removed
  int diagrams_consulted = 0;
  int diagrams_matched = 0;
  int truncated_features = 0;
  bool approximate = false;

  // Replay data: the minimized separator and the encoded vectors it was
  // derived from, over `minimized_variables`.
  std::vector<Feature> minimized_variables;
  Formula formula;
  std::vector<Minterm> target_vectors;
  std::vector<Minterm> non_target_vectors;
};

struct Explanation {
  QueryKind kind = QueryKind::When;
  std::vector<Feature> certain_features;
  std::vector<Feature> uncertain_features;
  std::vector<TaskId> certain_tasks;    // What only
  std::vector<TaskId> uncertain_tasks;  // What only
  std::string text;
  ExplanationDiagnostics diag;
};

// ---------------------------------------------------------------------------
// Feature relevance and node encoding

/// Default relevance for a query on `task`: the queried agents' completion
/// features, then one completion feature per other task co-occurring in any
/// diagram that contains `task`, lexicographically. Truncated to the variable
/// cap from the tail; the dropped count is reported through `truncated`.
inline std::vector<Feature> relevant_features(const TaskId& task, const std::set<AgentId>& group,
                                              const std::vector<HasseDiagram>& diagrams,
                                              std::size_t cap = kDefaultVariableCap,
                                              int* truncated = nullptr) {
  std::set<TaskId> others;
  bool observed = false;
  for (const auto& d : diagrams) {
    if (!d.find_task(task)) continue;
    observed = true;
    for (const auto& t : d.tasks())
      if (t != task) others.insert(t);
  }
  if (!observed) throw TaskNeverObservedError("task " + task + " is never completed");

  std::vector<Feature> features;
  for (AgentId a : group) features.push_back(Feature::agent_did_task(a, task));
  for (const auto& t : others) features.push_back(Feature::task_done(t));
  if (truncated) *truncated = 0;
  if (features.size() > cap) {
    if (truncated) *truncated = static_cast<int>(features.size() - cap);
    features.resize(cap);
  }
  return features;
}

/// Boolean vector of a vertex over the feature list: a bit is set when the
/// feature holds at the vertex or any ancestor, or when the diagram's
/// uncertainty set forces it true.
inline Minterm encode_node(const HasseDiagram& d, int vertex, const std::vector<Feature>& features,
                           const std::set<Feature>& uncertain) {
  std::set<Feature> holds;
  std::set<int> closure{vertex};
  detail::collect_reachable(d.reverse_adjacency(), vertex, closure);
  for (int vid : closure) {
    const auto vf = vertex_features(d.vertices[static_cast<std::size_t>(vid)]);
    holds.insert(vf.begin(), vf.end());
  }
  Minterm m = 0;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (holds.count(features[i]) || uncertain.count(features[i])) m |= 1u << i;
  return m;
}

namespace detail {

inline std::string join_names(const std::vector<std::string>& items) {
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += i + 1 == items.size() ? ", and " : ", ";
    out += items[i];
  }
  return out;
}

inline std::string join_clauses(const std::vector<std::string>& clauses) {
  if (clauses.size() == 1) return clauses[0];
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) out += i + 1 == clauses.size() ? ", and " : ", ";
    out += clauses[i];
  }
  return out;
}

inline std::string agents_phrase(const std::set<AgentId>& agents) {
  std::vector<std::string> names;
  for (AgentId a : agents) names.push_back(std::to_string(a));
  return (agents.size() == 1 ? "agent " : "agents ") + join_names(names);
}

inline std::string tasks_phrase(const std::vector<TaskId>& tasks, const std::string& verb) {
  std::vector<std::string> names(tasks.begin(), tasks.end());
  return (tasks.size() == 1 ? "task " : "tasks ") + join_names(names) +
         (tasks.size() == 1 && verb == "are completed" ? " is completed" : " " + verb);
}

inline std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct QueryContext {
  std::vector<Feature> features;            // full width, seeds first by default
  std::vector<Feature> seed_features;       // AgentDidTask(i, task) for i in G_q
  std::vector<std::size_t> keep;            // indices of non-seed features
  std::vector<Feature> minimized_variables; // features[keep]
  std::vector<std::size_t> matching;        // indices of diagrams matching the query
  UncertaintyDictionary dict;
  std::set<Feature> uncertain_union;
  int truncated = 0;
};

inline std::optional<int> query_anchor(const HasseDiagram& d, const Query& q) {
  const Vertex* v = d.find_task(q.task);
  if (!v) return std::nullopt;
  const auto& performers = v->agents();
  const bool match = q.superset_match
                         ? std::includes(performers.begin(), performers.end(),
                                         q.agents.begin(), q.agents.end())
                         : performers == q.agents;
  return match ? std::optional<int>(v->id) : std::nullopt;
}

/// Shared front half of When/WhyNot: relevance, group matching, uncertainty
/// dictionary, and the seed/minimized variable split.
inline QueryContext prepare_query(const Query& q, const std::vector<HasseDiagram>& diagrams,
                                  const std::vector<Feature>& required,
                                  std::size_t cap = kDefaultVariableCap) {
  if (q.agents.empty()) throw ValidationError("query requires a non-empty agent group");
  QueryContext ctx;
  if (q.feature_override) {
    ctx.features = *q.feature_override;
    if (ctx.features.size() > 32)
      throw TooManyVariablesError("feature override has " + std::to_string(ctx.features.size()) +
                                  " features, limit is 32");
    bool observed = false;
    for (const auto& d : diagrams)
      if (d.find_task(q.task)) observed = true;
    if (!observed) throw TaskNeverObservedError("task " + q.task + " is never completed");
  } else {
    ctx.features =
        relevant_features(q.task, q.agents, diagrams, std::numeric_limits<std::size_t>::max());
    for (const auto& f : required)
      if (std::find(ctx.features.begin(), ctx.features.end(), f) == ctx.features.end())
        ctx.features.push_back(f);
    if (ctx.features.size() > cap) {
      // Truncate from the tail, but condition features must stay expressible.
      const std::set<Feature> must_keep(required.begin(), required.end());
      const std::size_t original = ctx.features.size();
      for (auto it = ctx.features.end(); it != ctx.features.begin() && ctx.features.size() > cap;) {
        --it;
        if (!must_keep.count(*it)) it = ctx.features.erase(it);
      }
      ctx.truncated = static_cast<int>(original - ctx.features.size());
      if (ctx.features.size() > cap)
        throw TooManyVariablesError("query needs " + std::to_string(ctx.features.size()) +
                                    " features, cap is " + std::to_string(cap));
    }
  }
  for (const auto& f : required)
    if (std::find(ctx.features.begin(), ctx.features.end(), f) == ctx.features.end())
      throw ValidationError("condition feature not in the feature set: " + f.describe());

  for (AgentId a : q.agents) ctx.seed_features.push_back(Feature::agent_did_task(a, q.task));
  for (std::size_t i = 0; i < ctx.features.size(); ++i) {
    const bool seed = std::find(ctx.seed_features.begin(), ctx.seed_features.end(),
                                ctx.features[i]) != ctx.seed_features.end();
    if (!seed) {
      ctx.keep.push_back(i);
      ctx.minimized_variables.push_back(ctx.features[i]);
    }
  }

  for (std::size_t j = 0; j < diagrams.size(); ++j)
    if (query_anchor(diagrams[j], q)) ctx.matching.push_back(j);
  if (ctx.matching.empty())
    throw NoMatchingDiagramError("no diagram where " + agents_phrase(q.agents) +
                                 " complete task " + q.task);
  ctx.dict = build_uncertainty(
      diagrams, [&](const HasseDiagram& d, std::size_t) { return query_anchor(d, q); });
  for (const auto& [_, fs] : ctx.dict) ctx.uncertain_union.insert(fs.begin(), fs.end());
  return ctx;
}

inline Minterm project(Minterm full, const std::vector<std::size_t>& keep) {
  Minterm out = 0;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (full & (1u << keep[k])) out |= 1u << k;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rendering

/// Deterministic sentence rendering from fixed templates; certain features
/// become "must" clauses and uncertain ones "may" clauses.
inline std::string render(QueryKind kind, const std::set<AgentId>& agents, const TaskId& task,
                          const std::vector<Feature>& certain,
                          const std::vector<Feature>& uncertain,
                          const std::vector<TaskId>& certain_tasks,
                          const std::vector<TaskId>& uncertain_tasks) {
  using detail::agents_phrase;
  using detail::capitalize;
  using detail::join_clauses;
  using detail::tasks_phrase;

  if (kind == QueryKind::What) {
    if (certain_tasks.empty() && uncertain_tasks.empty()) return "No tasks follow task " + task + ".";
    std::string text;
    if (!certain_tasks.empty())
      text = "After task " + task + " is completed, " + tasks_phrase(certain_tasks, "are completed") + ".";
    if (!uncertain_tasks.empty()) {
      if (text.empty())
        text = "After task " + task + " is completed, " +
               tasks_phrase(uncertain_tasks, "may be completed") + ".";
      else
        text += " Additionally, " + tasks_phrase(uncertain_tasks, "may be completed") + ".";
    }
    return text;
  }

  if (kind == QueryKind::When) {
    std::vector<std::string> clauses;
    for (const auto& f : certain) {
      if (f.kind == Feature::Kind::AgentDidTask)
        clauses.push_back("agent " + std::to_string(f.agent) + " must complete task " + f.task);
      else
        clauses.push_back("task " + f.task + " must be completed");
    }
    std::string text = "For " + agents_phrase(agents) + " to complete task " + task + ", " +
                       join_clauses(clauses) + ".";
    if (!uncertain.empty()) {
      std::vector<std::string> may;
      std::vector<TaskId> done;
      for (const auto& f : uncertain) {
        if (f.kind == Feature::Kind::TaskDone)
          done.push_back(f.task);
        else
          may.push_back("agent " + std::to_string(f.agent) + " may need to complete task " + f.task);
      }
      if (!done.empty()) may.insert(may.begin(), tasks_phrase(done, "may need to be completed"));
      text += " Additionally, " + join_clauses(may) + ".";
    }
    return text;
  }

  // WhyNot: missing conditions first, then the queried completion itself,
  // closed by the purpose clause.
  std::vector<std::string> clauses;
  std::set<AgentId> missing_group;
  for (const auto& f : certain)
    if (f.kind == Feature::Kind::AgentDidTask && f.task == task) missing_group.insert(f.agent);
  for (const auto& f : certain)
    if (f.kind == Feature::Kind::TaskDone)
      clauses.push_back("task " + f.task + " must be completed");
    else if (f.task != task)
      clauses.push_back("agent " + std::to_string(f.agent) + " must complete task " + f.task);
  for (const auto& f : uncertain) {
    if (f.kind == Feature::Kind::TaskDone)
      clauses.push_back("task " + f.task + " may need to be completed");
    else
      clauses.push_back("agent " + std::to_string(f.agent) + " may need to complete task " + f.task);
  }
  if (!missing_group.empty())
    clauses.push_back(agents_phrase(missing_group) + " must complete task " + task);
  std::string text = capitalize(join_clauses(clauses));
  if (clauses.size() > 1) text += ",";
  text += " for " + agents_phrase(agents) + " to complete task " + task + ".";
  return text;
}

// ---------------------------------------------------------------------------
// Query engines

/// "When do agents G_q perform task τ_q?" Labels the matching completion
/// vertices as targets and every other node as a non-target, minimizes a
/// separating formula over the non-seed features, and reports its positive
/// literals as musts. Non-target observations whose encoding collides with a
/// target are indistinguishable and dropped.
inline Explanation explain_when(const Query& q, const std::vector<HasseDiagram>& diagrams) {
  auto ctx = detail::prepare_query(q, diagrams, {});

  std::set<Minterm> targets;
  std::vector<Minterm> non_target_observations;
  auto encode_all = [&](std::size_t j, const std::set<Feature>& forced) {
    const auto anchor = detail::query_anchor(diagrams[j], q);
    for (const auto& v : diagrams[j].vertices) {
      const Minterm m = detail::project(encode_node(diagrams[j], v.id, ctx.features, forced),
                                        ctx.keep);
      if (anchor && v.id == *anchor)
        targets.insert(m);
      else
        non_target_observations.push_back(m);
    }
  };
  for (std::size_t j : ctx.matching) encode_all(j, ctx.dict.at(j));
  if (q.nontargets_all) {
    for (std::size_t j = 0; j < diagrams.size(); ++j)
      if (!detail::query_anchor(diagrams[j], q)) encode_all(j, {});
  }

  Explanation ex;
  ex.kind = QueryKind::When;
  std::set<Minterm> non_targets;
  for (Minterm m : non_target_observations) {
    if (targets.count(m))
      ++ex.diag.dropped_conflicts;
    else
      non_targets.insert(m);
  }

  auto spec = BooleanSpec::make(ctx.minimized_variables, targets, non_targets);
  const Formula formula = minimize(spec);

  std::set<Feature> certain(ctx.seed_features.begin(), ctx.seed_features.end());
  for (std::size_t var : formula.positive_variables()) certain.insert(ctx.minimized_variables[var]);
  for (const auto& f : ctx.seed_features) ex.certain_features.push_back(f);
  for (std::size_t i : ctx.keep)
    if (certain.count(ctx.features[i]) &&
        std::find(ex.certain_features.begin(), ex.certain_features.end(), ctx.features[i]) ==
            ex.certain_features.end())
      ex.certain_features.push_back(ctx.features[i]);
  for (const auto& f : ctx.features)
    if (ctx.uncertain_union.count(f) && !certain.count(f)) ex.uncertain_features.push_back(f);

  ex.diag.diagrams_consulted = static_cast<int>(diagrams.size());
  ex.diag.diagrams_matched = static_cast<int>(ctx.matching.size());
  ex.diag.truncated_features = ctx.truncated;
  ex.diag.approximate = formula.approximate;
  ex.diag.minimized_variables = ctx.minimized_variables;
  ex.diag.formula = formula;
  ex.diag.target_vectors.assign(spec.targets.begin(), spec.targets.end());
  ex.diag.non_target_vectors.assign(spec.non_targets.begin(), spec.non_targets.end());
  ex.text = render(QueryKind::When, q.agents, q.task, ex.certain_features, ex.uncertain_features,
                   {}, {});
  return ex;
}

/// "Why don't agents G_q do task τ_q under conditions Φ_q?" Separates the
/// successful completion encodings from the condition vector and reports, as
/// missing, the positive separator literals that are false in Φ_q plus the
/// queried completions Φ_q lacks.
inline Explanation explain_whynot(const Query& q, const std::vector<HasseDiagram>& diagrams) {
  std::vector<Feature> required(q.conditions.begin(), q.conditions.end());
  auto ctx = detail::prepare_query(q, diagrams, required);

  Minterm phi_full = 0;
  for (std::size_t i = 0; i < ctx.features.size(); ++i)
    if (q.conditions.count(ctx.features[i])) phi_full |= 1u << i;
  const Minterm phi = detail::project(phi_full, ctx.keep);

  std::set<Minterm> success;
  for (std::size_t j : ctx.matching) {
    const auto anchor = detail::query_anchor(diagrams[j], q);
    success.insert(
        detail::project(encode_node(diagrams[j], *anchor, ctx.features, ctx.dict.at(j)), ctx.keep));
  }

  Explanation ex;
  ex.kind = QueryKind::WhyNot;
  std::set<Minterm> non_targets{phi};
  if (success.count(phi)) {
    // The scenario is indistinguishable from a success state.
    ++ex.diag.dropped_conflicts;
    non_targets.clear();
  }

  auto spec = BooleanSpec::make(ctx.minimized_variables, success, non_targets);
  const Formula formula = minimize(spec);

  std::set<Feature> missing;
  for (std::size_t var : formula.positive_variables())
    if (!(phi & (1u << var))) missing.insert(ctx.minimized_variables[var]);
  for (const auto& f : ctx.seed_features)
    if (!q.conditions.count(f)) missing.insert(f);
  if (missing.empty())
    throw ConditionUnsatisfiableError(
        "the given conditions already include every feature required to complete task " + q.task);

  // Seeds are certain by definition; other features are uncertain when they
  // come from the uncertainty dictionary.
  auto ordered = [&](const Feature& f) {
    return std::find(ctx.features.begin(), ctx.features.end(), f) - ctx.features.begin();
  };
  std::vector<Feature> missing_ordered(missing.begin(), missing.end());
  std::sort(missing_ordered.begin(), missing_ordered.end(),
            [&](const Feature& a, const Feature& b) { return ordered(a) < ordered(b); });
  for (const auto& f : missing_ordered) {
    const bool seed = std::find(ctx.seed_features.begin(), ctx.seed_features.end(), f) !=
                      ctx.seed_features.end();
    if (!seed && ctx.uncertain_union.count(f))
      ex.uncertain_features.push_back(f);
    else
      ex.certain_features.push_back(f);
  }

  ex.diag.diagrams_consulted = static_cast<int>(diagrams.size());
  ex.diag.diagrams_matched = static_cast<int>(ctx.matching.size());
  ex.diag.truncated_features = ctx.truncated;
  ex.diag.approximate = formula.approximate;
  ex.diag.minimized_variables = ctx.minimized_variables;
  ex.diag.formula = formula;
  ex.diag.target_vectors.assign(spec.targets.begin(), spec.targets.end());
  ex.diag.non_target_vectors.assign(spec.non_targets.begin(), spec.non_targets.end());
  ex.text = render(QueryKind::WhyNot, q.agents, q.task, ex.certain_features,
                   ex.uncertain_features, {}, {});
  return ex;
}

/// "What do the agents do after task τ_q?" Certain successors are the tasks
/// of immediate children of the completion vertex across diagrams; uncertain
/// successors come from incomparable vertices. A task observed as a direct
/// child anywhere is reported certain only.
inline Explanation explain_what(const Query& q, const std::vector<HasseDiagram>& diagrams) {
  std::set<TaskId> certain, uncertain;
  int matched = 0;
  for (const auto& d : diagrams) {
    const Vertex* anchor = d.find_task(q.task);
    if (!anchor) continue;
    ++matched;
    const auto adj = d.adjacency();
    for (int child : adj[static_cast<std::size_t>(anchor->id)])
      for (const auto& [t, _] : d.vertices[static_cast<std::size_t>(child)].entries)
        certain.insert(t);
    const auto split = comparability_split(d, anchor->id);
    for (int vid : split.incomparable)
      for (const auto& [t, _] : d.vertices[static_cast<std::size_t>(vid)].entries)
        uncertain.insert(t);
  }
  if (matched == 0) throw TaskNeverObservedError("task " + q.task + " is never completed");
  for (const auto& t : certain) uncertain.erase(t);

  Explanation ex;
  ex.kind = QueryKind::What;
  ex.certain_tasks.assign(certain.begin(), certain.end());
  ex.uncertain_tasks.assign(uncertain.begin(), uncertain.end());
  ex.diag.diagrams_consulted = static_cast<int>(diagrams.size());
  ex.diag.diagrams_matched = matched;
  ex.text = render(QueryKind::What, {}, q.task, {}, {}, ex.certain_tasks, ex.uncertain_tasks);
  return ex;
}

/// Dispatch on query kind.
inline Explanation explain(const Query& q, const std::vector<HasseDiagram>& diagrams) {
  switch (q.kind) {
    case QueryKind::When:
      return explain_when(q, diagrams);
    case QueryKind::WhyNot:
      return explain_whynot(q, diagrams);
    case QueryKind::What:
      return explain_what(q, diagrams);
  }
  throw Error("unknown query kind");
}

}  // namespace hasse
