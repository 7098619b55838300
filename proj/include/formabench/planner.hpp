#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "formabench/grounding.hpp"
#include "formabench/pddl/ast.hpp"
#include "formabench/validator.hpp"

namespace formabench {

struct SearchConfig {
  enum class Mode { Optimal, Satisficing };
  Mode mode = Mode::Optimal;
  std::size_t max_nodes = 2'000'000;
  double max_seconds = 60.0;
};

struct PlanResult {
  enum class Status { Found, Unsolvable, Limit };
  enum class LimitKind { Nodes, Time };

  Status status = Status::Unsolvable;
  Plan plan;
  int cost = 0;
  std::size_t nodes_expanded = 0;
  LimitKind limit_kind = LimitKind::Nodes;

  bool found() const { return status == Status::Found; }
};

namespace detail {

// Fixed-width bitset over the interned atom universe.
struct StateBits {
  std::vector<std::uint64_t> w;

  friend bool operator==(const StateBits& a, const StateBits& b) {
    return a.w == b.w;
  }
};

struct StateBitsHash {
  std::size_t operator()(const StateBits& s) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t x : s.w) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct CompiledAction {
  std::size_t index;  // into the canonical ground action list
  StateBits pre_pos, pre_neg, add, del;
};

inline bool subset(const StateBits& needle, const StateBits& hay) {
  for (std::size_t i = 0; i < needle.w.size(); ++i) {
    if ((needle.w[i] & hay.w[i]) != needle.w[i]) return false;
  }
  return true;
}

inline bool disjoint(const StateBits& a, const StateBits& b) {
  for (std::size_t i = 0; i < a.w.size(); ++i) {
    if ((a.w[i] & b.w[i]) != 0) return false;
  }
  return true;
}

struct GroundTask {
  std::vector<GroundAtom> universe;  // sorted
  std::vector<GroundAction> actions;
  std::vector<CompiledAction> compiled;
  StateBits init, goal;
  std::size_t words = 0;

  std::size_t atom_index(const GroundAtom& a) const {
    auto it = std::lower_bound(universe.begin(), universe.end(), a);
    return static_cast<std::size_t>(it - universe.begin());
  }

  void set_bit(StateBits& s, const GroundAtom& a) const {
    std::size_t i = atom_index(a);
    s.w[i >> 6] |= (1ull << (i & 63));
  }

  StateBits empty_bits() const { return StateBits{std::vector<std::uint64_t>(words, 0)}; }
};

inline GroundTask compile_task(const Domain& domain, const Problem& problem,
                               const GroundingConfig& grounding) {
  GroundTask task;
  task.universe = enumerate_atoms(domain, problem.objects, grounding);
  // Init/goal atoms outside the enumerated universe (e.g. reflexive tuples
  // with repeats excluded) must still be representable.
  task.universe.insert(task.universe.end(), problem.init.begin(),
                       problem.init.end());
  task.universe.insert(task.universe.end(), problem.goal.begin(),
                       problem.goal.end());
  std::sort(task.universe.begin(), task.universe.end());
  task.universe.erase(
      std::unique(task.universe.begin(), task.universe.end()),
      task.universe.end());
  task.words = (task.universe.size() + 63) / 64;
  if (task.words == 0) task.words = 1;

  task.init = task.empty_bits();
  for (const auto& a : problem.init) task.set_bit(task.init, a);
  task.goal = task.empty_bits();
  for (const auto& a : problem.goal) task.set_bit(task.goal, a);

  task.actions = enumerate_actions(domain, problem.objects, grounding);
  for (std::size_t i = 0; i < task.actions.size(); ++i) {
    const GroundAction& ga = task.actions[i];
    const ActionSchema* schema = domain.find_action(ga.action);
    std::map<std::string, std::string> binding;
    for (std::size_t j = 0; j < ga.args.size(); ++j) {
      binding[schema->params[j].name] = ga.args[j];
    }
    CompiledAction ca;
    ca.index = i;
    ca.pre_pos = ca.pre_neg = ca.add = ca.del = task.empty_bits();
    bool representable = true;
    auto resolve = [&](const SchemaAtom& atom, StateBits& target) {
      GroundAtom g = bind_atom(atom, binding);
      auto it = std::lower_bound(task.universe.begin(), task.universe.end(), g);
      if (it == task.universe.end() || !(*it == g)) return false;
      task.set_bit(target, g);
      return true;
    };
    for (const auto& lit : schema->preconditions) {
      if (!resolve(lit.atom, lit.negated ? ca.pre_neg : ca.pre_pos)) {
        // Positive precondition over an atom outside the universe can never
        // hold; a negative one trivially holds.
        if (!lit.negated) {
          representable = false;
          break;
        }
      }
    }
    if (!representable) continue;
    for (const auto& atom : schema->add_effects) resolve(atom, ca.add);
    for (const auto& atom : schema->del_effects) resolve(atom, ca.del);
    task.compiled.push_back(ca);
  }
  return task;
}

}  // namespace detail

// Forward state-space search over the grounded task. Optimal mode is
// breadth-first over unit-cost actions with duplicate detection; satisficing
// mode is greedy best-first on unsatisfied-goal-count. Ties break by
// canonical action order, so results are deterministic.
inline PlanResult solve(const Domain& domain, const Problem& problem,
                        const SearchConfig& config = {},
                        const GroundingConfig& grounding = {}) {
  using detail::StateBits;
  const auto start_time = std::chrono::steady_clock::now();
  detail::GroundTask task = detail::compile_task(domain, problem, grounding);

  PlanResult result;

  std::vector<StateBits> states;
  std::vector<std::int64_t> parent;
  std::vector<std::size_t> via_action;
  std::unordered_map<StateBits, std::size_t, detail::StateBitsHash> visited;

  auto reconstruct = [&](std::size_t idx) {
    std::vector<std::size_t> rev;
    std::int64_t cur = static_cast<std::int64_t>(idx);
    while (parent[static_cast<std::size_t>(cur)] >= 0) {
      rev.push_back(via_action[static_cast<std::size_t>(cur)]);
      cur = parent[static_cast<std::size_t>(cur)];
    }
    std::reverse(rev.begin(), rev.end());
    for (std::size_t a : rev) {
      result.plan.steps.push_back(task.actions[a]);
    }
    result.cost = static_cast<int>(result.plan.steps.size());
    result.status = PlanResult::Status::Found;
  };

  auto goal_satisfied = [&](const StateBits& s) {
    return detail::subset(task.goal, s);
  };

  states.push_back(task.init);
  parent.push_back(-1);
  via_action.push_back(0);
  visited.emplace(task.init, 0);

  if (goal_satisfied(task.init)) {
    reconstruct(0);
    result.nodes_expanded = 0;
    return result;
  }

  auto unsatisfied_goals = [&](const StateBits& s) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < task.words; ++i) {
      count += static_cast<std::size_t>(
          __builtin_popcountll(task.goal.w[i] & ~s.w[i]));
    }
    return count;
  };

  // frontier holds state indices; priority applies in satisficing mode only.
  struct Entry {
    std::size_t h;
    std::size_t seq;
    std::size_t state;
  };
  struct EntryGreater {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.h != b.h ? a.h > b.h : a.seq > b.seq;
    }
  };
  std::deque<std::size_t> fifo;
  std::priority_queue<Entry, std::vector<Entry>, EntryGreater> heap;
  std::size_t seq = 0;

  const bool optimal = config.mode == SearchConfig::Mode::Optimal;
  if (optimal) {
    fifo.push_back(0);
  } else {
    heap.push({unsatisfied_goals(task.init), seq++, 0});
  }

  while (optimal ? !fifo.empty() : !heap.empty()) {
    std::size_t cur;
    if (optimal) {
      cur = fifo.front();
      fifo.pop_front();
    } else {
      cur = heap.top().state;
      heap.pop();
    }
    ++result.nodes_expanded;
    if (result.nodes_expanded > config.max_nodes) {
      result.status = PlanResult::Status::Limit;
      result.limit_kind = PlanResult::LimitKind::Nodes;
      return result;
    }
    if ((result.nodes_expanded & 1023) == 0) {
      double elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start_time)
                           .count();
      if (elapsed > config.max_seconds) {
        result.status = PlanResult::Status::Limit;
        result.limit_kind = PlanResult::LimitKind::Time;
        return result;
      }
    }

    const StateBits current = states[cur];
    for (const auto& ca : task.compiled) {
      if (!detail::subset(ca.pre_pos, current)) continue;
      if (!detail::disjoint(ca.pre_neg, current)) continue;
      StateBits next = current;
      for (std::size_t i = 0; i < task.words; ++i) {
        next.w[i] = (next.w[i] & ~ca.del.w[i]) | ca.add.w[i];
      }
      auto [it, inserted] = visited.emplace(next, states.size());
      if (!inserted) continue;
      states.push_back(next);
      parent.push_back(static_cast<std::int64_t>(cur));
      via_action.push_back(ca.index);
      std::size_t idx = states.size() - 1;
      if (goal_satisfied(next)) {
        reconstruct(idx);
        return result;
      }
      if (optimal) {
        fifo.push_back(idx);
      } else {
        heap.push({unsatisfied_goals(next), seq++, idx});
      }
    }
  }

  result.status = PlanResult::Status::Unsolvable;
  return result;
}

}  // namespace formabench
