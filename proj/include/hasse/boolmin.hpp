#pragma once
// Exact two-level boolean minimization over feature vectors: prime implicant
// generation (Quine-McCluskey) and minimum cover selection. Observed target
// minterms must be covered, observed non-targets avoided; everything
// unobserved is a don't-care.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "hasse/core.hpp"

namespace hasse {

/// Full variable assignment; bit i corresponds to variables[i].
using Minterm = std::uint32_t;

inline constexpr std::size_t kDefaultVariableCap = 16;

/// Conjunction of literals: variables selected by `mask` fixed to the bits of
/// `value`, the rest free.
struct Implicant {
  std::uint32_t mask = 0;
  std::uint32_t value = 0;  // subset of mask

  bool operator==(const Implicant&) const = default;
  auto operator<=>(const Implicant&) const = default;

  bool covers(Minterm m) const { return (m & mask) == value; }
  int literal_count() const { return std::popcount(mask); }

  /// "1-0-" style form, position i = variables[i]; used for deterministic
  /// ordering and debugging.
  std::string pattern(std::size_t width) const {
    std::string s(width, '-');
    for (std::size_t i = 0; i < width; ++i)
      if (mask & (1u << i)) s[i] = (value & (1u << i)) ? '1' : '0';
    return s;
  }
};

struct BooleanSpec {
  std::vector<Feature> variables;
  std::set<Minterm> targets;
  std::set<Minterm> non_targets;
  int dropped_conflicts = 0;

  /// Resolves target/non-target conflicts by removing the offending minterms
  /// from both sets and counting them; a minterm observed on both sides
  /// carries no separating information.
  static BooleanSpec make(std::vector<Feature> variables, std::set<Minterm> targets,
                          std::set<Minterm> non_targets) {
    BooleanSpec spec;
    spec.variables = std::move(variables);
    std::vector<Minterm> conflicts;
    for (Minterm m : targets)
      if (non_targets.count(m)) conflicts.push_back(m);
    for (Minterm m : conflicts) {
      targets.erase(m);
      non_targets.erase(m);
    }
    spec.dropped_conflicts = static_cast<int>(conflicts.size());
    spec.targets = std::move(targets);
    spec.non_targets = std::move(non_targets);
    return spec;
  }
};

/// Disjunction of implicants. `approximate` marks covers selected greedily
/// after the exact-search budget ran out.
struct Formula {
  std::vector<Implicant> implicants;  // sorted by pattern
  bool approximate = false;

  bool evaluate(Minterm m) const {
    for (const auto& imp : implicants)
      if (imp.covers(m)) return true;
    return false;
  }

  /// Variables appearing with positive polarity in any implicant.
  std::vector<std::size_t> positive_variables() const {
    std::set<std::size_t> vars;
    for (const auto& imp : implicants)
      for (std::size_t i = 0; i < 32; ++i)
        if ((imp.mask & (1u << i)) && (imp.value & (1u << i))) vars.insert(i);
    return {vars.begin(), vars.end()};
  }

  std::string pattern(std::size_t width) const {
    std::string s;
    for (const auto& imp : implicants) {
      if (!s.empty()) s += " + ";
      s += imp.pattern(width);
    }
    return s.empty() ? "true" : s;
  }
};

namespace detail {

// Pair-merging route: generates all prime implicants of the function that is
// true on every minterm outside `off`. Tractable while the explicit pool
// 2^n \ off stays small; used for n <= 12.
inline std::vector<Implicant> primes_by_merging(std::size_t width,
                                                const std::set<Minterm>& off) {
  std::vector<Implicant> pool;
  const Minterm space = width == 0 ? 1u : (1u << width);
  for (Minterm m = 0; m < space; ++m)
    if (!off.count(m)) pool.push_back(Implicant{space - 1, m});

  std::vector<Implicant> primes;
  while (!pool.empty()) {
    std::vector<bool> merged(pool.size(), false);
    std::set<Implicant> next;
    // Group indices by popcount of value to only compare adjacent groups.
    std::vector<std::vector<std::size_t>> by_ones(width + 1);
    for (std::size_t i = 0; i < pool.size(); ++i)
      by_ones[static_cast<std::size_t>(std::popcount(pool[i].value))].push_back(i);
    for (std::size_t ones = 0; ones < width; ++ones) {
      for (std::size_t i : by_ones[ones]) {
        for (std::size_t j : by_ones[ones + 1]) {
          if (pool[i].mask != pool[j].mask) continue;
          const std::uint32_t diff = pool[i].value ^ pool[j].value;
          if (std::popcount(diff) != 1) continue;
          merged[i] = merged[j] = true;
          next.insert(Implicant{pool[i].mask & ~diff, pool[i].value & ~diff});
        }
      }
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!merged[i]) primes.push_back(pool[i]);
    pool.assign(next.begin(), next.end());
  }
  std::sort(primes.begin(), primes.end());
  return primes;
}

// Expansion route: a cube containing target t avoids an off-minterm o iff it
// fixes some variable where t and o differ. Maximal cubes around t therefore
// correspond to minimal hitting sets of the difference masks, which this
// enumerates directly. Exact, and independent of the don't-care volume, so it
// scales to wide variable sets with few observations.
struct ExpansionState {
  std::set<Implicant> out;
  std::size_t budget = 1u << 20;
  bool exhausted = false;
};

inline void enumerate_minimal_hitting_sets(const std::vector<std::uint32_t>& diffs,
                                           Minterm t, std::uint32_t chosen,
                                           ExpansionState& state) {
  if (state.budget == 0) {
    state.exhausted = true;
    return;
  }
  --state.budget;
  std::uint32_t first_unhit = 0;
  for (std::uint32_t d : diffs)
    if ((d & chosen) == 0) {
      first_unhit = d;
      break;
    }
  if (first_unhit == 0) {
    // Minimal iff every chosen variable is the sole hitter of some diff.
    std::uint32_t critical = 0;
    for (std::uint32_t d : diffs) {
      const std::uint32_t hits = d & chosen;
      if (std::popcount(hits) == 1) critical |= hits;
    }
    if (critical == chosen) state.out.insert(Implicant{chosen, t & chosen});
    return;
  }
  for (std::uint32_t bits = first_unhit; bits;) {
    const std::uint32_t bit = bits & (~bits + 1);
    bits &= bits - 1;
    enumerate_minimal_hitting_sets(diffs, t, chosen | bit, state);
    if (state.exhausted) return;
  }
}

// Greedy maximal expansion of one target minterm; always yields a prime cube
// covering it, guaranteeing cover feasibility even when enumeration is cut
// short by the budget.
inline Implicant expand_greedy(std::size_t width, Minterm t, const std::set<Minterm>& off) {
  std::uint32_t mask = width == 32 ? 0xffffffffu : (1u << width) - 1;
  for (std::size_t i = 0; i < width; ++i) {
    const std::uint32_t candidate = mask & ~(1u << i);
    const Implicant cube{candidate, t & candidate};
    bool hits_off = false;
    for (Minterm o : off)
      if (cube.covers(o)) {
        hits_off = true;
        break;
      }
    if (!hits_off) mask = candidate;
  }
  return Implicant{mask, t & mask};
}

inline std::vector<Implicant> primes_by_expansion(std::size_t width,
                                                  const std::set<Minterm>& on,
                                                  const std::set<Minterm>& off,
                                                  bool* budget_exhausted = nullptr) {
  ExpansionState state;
  std::set<Implicant> result;
  for (Minterm t : on) result.insert(expand_greedy(width, t, off));
  for (Minterm t : on) {
    std::vector<std::uint32_t> diffs;
    diffs.reserve(off.size());
    for (Minterm o : off) diffs.push_back(t ^ o);
    std::sort(diffs.begin(), diffs.end(), [](std::uint32_t a, std::uint32_t b) {
      const int pa = std::popcount(a), pb = std::popcount(b);
      return pa != pb ? pa < pb : a < b;
    });
    enumerate_minimal_hitting_sets(diffs, t, 0, state);
    if (state.exhausted) break;
  }
  result.insert(state.out.begin(), state.out.end());
  if (budget_exhausted) *budget_exhausted = state.exhausted;
  return {result.begin(), result.end()};
}

// ---------------------------------------------------------------------------
// Cover selection

struct CoverObjective {
  int count = 0;
  int literals = 0;
  std::vector<std::string> patterns;  // sorted

  bool better_than(const CoverObjective& other) const {
    if (count != other.count) return count < other.count;
    if (literals != other.literals) return literals < other.literals;
    return patterns < other.patterns;
  }
};

struct CoverSearch {
  std::size_t width = 0;
  const std::vector<Implicant>* primes = nullptr;
  std::vector<Minterm> columns;
  std::vector<std::vector<std::size_t>> candidates;  // per column
  std::size_t budget = 1u << 20;
  bool exhausted = false;

  std::vector<std::size_t> best;
  CoverObjective best_objective;
  bool have_best = false;

  CoverObjective objective_of(const std::vector<std::size_t>& chosen) const {
    CoverObjective obj;
    obj.count = static_cast<int>(chosen.size());
    for (std::size_t p : chosen) {
      obj.literals += (*primes)[p].literal_count();
      obj.patterns.push_back((*primes)[p].pattern(width));
    }
    std::sort(obj.patterns.begin(), obj.patterns.end());
    return obj;
  }

  void offer(const std::vector<std::size_t>& chosen) {
    CoverObjective obj = objective_of(chosen);
    if (!have_best || obj.better_than(best_objective)) {
      best = chosen;
      best_objective = std::move(obj);
      have_best = true;
    }
  }

  void dfs(std::vector<bool>& covered, std::size_t n_covered, std::vector<std::size_t>& chosen) {
    if (budget == 0) {
      exhausted = true;
      return;
    }
    --budget;
    if (n_covered == columns.size()) {
      offer(chosen);
      return;
    }
    // One more prime is a lower bound on any completion.
    if (have_best && static_cast<int>(chosen.size()) + 1 > best_objective.count) return;
    // Branch on the uncovered column with the fewest candidates.
    std::size_t pick = columns.size();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (covered[c]) continue;
      if (pick == columns.size() || candidates[c].size() < candidates[pick].size()) pick = c;
    }
    for (std::size_t p : candidates[pick]) {
      std::vector<std::size_t> newly;
      for (std::size_t c = 0; c < columns.size(); ++c)
        if (!covered[c] && (*primes)[p].covers(columns[c])) {
          covered[c] = true;
          newly.push_back(c);
        }
      chosen.push_back(p);
      dfs(covered, n_covered + newly.size(), chosen);
      chosen.pop_back();
      for (std::size_t c : newly) covered[c] = false;
      if (exhausted) return;
    }
  }
};

inline std::vector<std::size_t> cover_greedy(const std::vector<Implicant>& primes,
                                             std::size_t width,
                                             const std::vector<Minterm>& columns,
                                             std::vector<bool> covered) {
  std::vector<std::size_t> chosen;
  auto uncovered_left = [&] {
    for (bool c : covered)
      if (!c) return true;
    return false;
  };
  while (uncovered_left()) {
    std::size_t best_p = primes.size();
    std::size_t best_gain = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      std::size_t gain = 0;
      for (std::size_t c = 0; c < columns.size(); ++c)
        if (!covered[c] && primes[p].covers(columns[c])) ++gain;
      if (gain == 0) continue;
      const bool better =
          best_p == primes.size() || gain > best_gain ||
          (gain == best_gain &&
           (primes[p].literal_count() < primes[best_p].literal_count() ||
            (primes[p].literal_count() == primes[best_p].literal_count() &&
             primes[p].pattern(width) < primes[best_p].pattern(width))));
      if (better) {
        best_p = p;
        best_gain = gain;
      }
    }
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (!covered[c] && primes[best_p].covers(columns[c])) covered[c] = true;
    chosen.push_back(best_p);
  }
  return chosen;
}

}  // namespace detail

/// Minimal DNF separating targets from non-targets: covers every target,
/// excludes every non-target, and among all such formulas has the fewest
/// implicants, then the fewest literals, then the lexicographically smallest
/// pattern list. Deterministic. Unobserved minterms are don't-cares.
inline Formula minimize(const BooleanSpec& spec, std::size_t variable_cap = kDefaultVariableCap) {
  const std::size_t width = spec.variables.size();
  if (width > variable_cap)
    throw TooManyVariablesError("minimize: " + std::to_string(width) +
                                " variables exceed cap " + std::to_string(variable_cap));
  if (spec.targets.empty()) throw EmptyTargetsError("minimize: no target minterms");
  for (Minterm m : spec.targets)
    if (spec.non_targets.count(m))
      throw ConflictingSpecError("minimize: minterm is both target and non-target");

  Formula formula;
  if (spec.non_targets.empty()) {
    // Nothing to avoid: the empty conjunction covers everything.
    formula.implicants.push_back(Implicant{0, 0});
    return formula;
  }

  // Prime implicants; only those covering at least one target can appear in a
  // minimum cover.
  bool primes_incomplete = false;
  std::vector<Implicant> primes;
  if (width <= 12) {
    primes = detail::primes_by_merging(width, spec.non_targets);
  } else {
    primes = detail::primes_by_expansion(width, spec.targets, spec.non_targets,
                                         &primes_incomplete);
  }
  std::vector<Implicant> useful;
  for (const auto& p : primes)
    for (Minterm t : spec.targets)
      if (p.covers(t)) {
        useful.push_back(p);
        break;
      }
  std::sort(useful.begin(), useful.end(), [&](const Implicant& a, const Implicant& b) {
    return a.pattern(width) < b.pattern(width);
  });

  detail::CoverSearch search;
  search.width = width;
  search.primes = &useful;
  search.columns.assign(spec.targets.begin(), spec.targets.end());
  search.candidates.resize(search.columns.size());
  for (std::size_t c = 0; c < search.columns.size(); ++c)
    for (std::size_t p = 0; p < useful.size(); ++p)
      if (useful[p].covers(search.columns[c])) search.candidates[c].push_back(p);

  // Essential primes: a column with a single candidate forces it.
  std::vector<bool> covered(search.columns.size(), false);
  std::vector<std::size_t> essential;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t c = 0; c < search.columns.size(); ++c) {
      if (covered[c] || search.candidates[c].size() != 1) continue;
      const std::size_t p = search.candidates[c][0];
      if (std::find(essential.begin(), essential.end(), p) == essential.end())
        essential.push_back(p);
      for (std::size_t c2 = 0; c2 < search.columns.size(); ++c2)
        if (!covered[c2] && useful[p].covers(search.columns[c2])) covered[c2] = true;
      changed = true;
    }
  }

  std::size_t n_covered = 0;
  for (bool c : covered)
    if (c) ++n_covered;

  std::vector<std::size_t> chosen = essential;
  if (n_covered < search.columns.size()) {
    // Seed the bound with a greedy cover, then branch and bound for the
    // optimum; ties explored fully so the lexicographic rule is honored.
    auto greedy_rest = detail::cover_greedy(useful, width, search.columns, covered);
    auto seed = essential;
    seed.insert(seed.end(), greedy_rest.begin(), greedy_rest.end());
    search.offer(seed);
    auto work_covered = covered;
    auto work_chosen = essential;
    search.dfs(work_covered, n_covered, work_chosen);
    chosen = search.best;
    formula.approximate = search.exhausted;
  }
  formula.approximate = formula.approximate || primes_incomplete;

  std::set<Implicant> dedup;
  for (std::size_t p : chosen) dedup.insert(useful[p]);
  formula.implicants.assign(dedup.begin(), dedup.end());
  std::sort(formula.implicants.begin(), formula.implicants.end(),
            [&](const Implicant& a, const Implicant& b) {
              return a.pattern(width) < b.pattern(width);
            });
  return formula;
}

}  // namespace hasse
