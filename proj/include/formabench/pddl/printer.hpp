#pragma once

#include <string>

#include "formabench/errors.hpp"
#include "formabench/pddl/ast.hpp"

namespace formabench {

// Deterministic canonical rendering: objects, init, and goal each sorted.
// parse_problem(render_problem(p), d) == p for every valid Problem.
inline std::string render_problem(const Problem& p) {
  if (p.goal.empty()) {
    throw SemanticError("cannot render a problem with an empty goal", {});
  }
  std::string out;
  out += "(define (problem " + p.name + ")\n";
  out += "  (:domain " + p.domain_name + ")\n";
  out += "  (:objects";
  for (const auto& o : p.objects) {
    out += ' ' + o.name + " - " + o.type;
  }
  out += ")\n";
  out += "  (:init";
  for (const auto& a : p.init) {
    out += ' ' + a.str();
  }
  out += ")\n";
  out += "  (:goal (and";
  for (const auto& a : p.goal) {
    out += ' ' + a.str();
  }
  out += ")))\n";
  return out;
}

}  // namespace formabench
