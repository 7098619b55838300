#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "formabench/pddl/ast.hpp"

namespace formabench {

struct Plan {
  std::vector<GroundAction> steps;  // may be empty (goal already satisfied)

  friend bool operator==(const Plan& a, const Plan& b) {
    return a.steps == b.steps;
  }
};

enum class FailureReason {
  PreconditionViolated,
  UnknownAction,
  TypeMismatch,
  GoalNotSatisfied,
};

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::PreconditionViolated: return "precondition-violated";
    case FailureReason::UnknownAction: return "unknown-action";
    case FailureReason::TypeMismatch: return "type-mismatch";
    case FailureReason::GoalNotSatisfied: return "goal-not-satisfied";
  }
  return "?";
}

struct SimulationResult {
  bool success = false;
  std::optional<std::size_t> failed_step;  // 0-based; absent for goal failure
  std::optional<FailureReason> failure_reason;
  std::optional<GroundAtom> violated_atom;
  std::vector<State> trace;  // length = executed steps + 1
};

// True iff every goal atom is contained in `state`.
inline bool evaluate_goal(const Problem& problem, const State& state) {
  for (const auto& atom : problem.goal) {
    if (!state.contains(atom)) return false;
  }
  return true;
}

namespace detail {

inline GroundAtom bind_atom(const SchemaAtom& atom,
                            const std::map<std::string, std::string>& binding) {
  GroundAtom g;
  g.predicate = atom.predicate;
  for (const auto& arg : atom.args) {
    if (!arg.empty() && arg[0] == '?') {
      g.args.push_back(binding.at(arg));
    } else {
      g.args.push_back(arg);
    }
  }
  return g;
}

}  // namespace detail

// Executes `plan` under STRIPS semantics from problem.init. Each step checks
// positive preconditions for membership and negative ones for absence, then
// applies deletes before adds. All failures are encoded in the result.
inline SimulationResult simulate(const Domain& domain, const Problem& problem,
                                 const Plan& plan) {
  SimulationResult result;
  State current{problem.init};
  result.trace.push_back(current);

  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& step = plan.steps[i];
    const ActionSchema* schema = domain.find_action(step.action);
    if (schema == nullptr) {
      result.failed_step = i;
      result.failure_reason = FailureReason::UnknownAction;
      return result;
    }
    if (schema->params.size() != step.args.size()) {
      result.failed_step = i;
      result.failure_reason = FailureReason::TypeMismatch;
      return result;
    }
    std::map<std::string, std::string> binding;
    bool bind_ok = true;
    for (std::size_t j = 0; j < step.args.size(); ++j) {
      const TypedName* obj = problem.find_object(step.args[j]);
      if (obj == nullptr) obj = domain.find_constant(step.args[j]);
      if (obj == nullptr ||
          !domain.types.is_subtype(obj->type, schema->params[j].type)) {
        bind_ok = false;
        break;
      }
      binding[schema->params[j].name] = step.args[j];
    }
    if (!bind_ok) {
      result.failed_step = i;
      result.failure_reason = FailureReason::TypeMismatch;
      return result;
    }
    for (const auto& lit : schema->preconditions) {
      GroundAtom g = detail::bind_atom(lit.atom, binding);
      bool holds = current.contains(g);
      if (holds == lit.negated) {
        result.failed_step = i;
        result.failure_reason = FailureReason::PreconditionViolated;
        result.violated_atom = g;
        return result;
      }
    }
    for (const auto& atom : schema->del_effects) {
      current.atoms.erase(detail::bind_atom(atom, binding));
    }
    for (const auto& atom : schema->add_effects) {
      current.atoms.insert(detail::bind_atom(atom, binding));
    }
    result.trace.push_back(current);
  }

  if (evaluate_goal(problem, current)) {
    result.success = true;
  } else {
    result.failure_reason = FailureReason::GoalNotSatisfied;
  }
  return result;
}

// Line-oriented trace dump, one canonical state per line.
inline std::string render_trace(const SimulationResult& result) {
  std::string out;
  for (const auto& state : result.trace) {
    bool first = true;
    for (const auto& atom : state.atoms) {
      if (!first) out += ' ';
      out += atom.str();
      first = false;
    }
    out += '\n';
  }
  return out;
}

}  // namespace formabench
