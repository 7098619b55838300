#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "formabench/bench/dataset.hpp"
#include "formabench/errors.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/pddl/printer.hpp"
#include "formabench/planner.hpp"

namespace formabench {

// The 4-operator Blocksworld domain bundled with the harness.
inline const char* kBlocksworldDomain = R"((define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates
    (on ?x - block ?y - block)
    (ontable ?x - block)
    (clear ?x - block)
    (handempty)
    (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty))
                 (holding ?x)))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty)
                 (on ?x ?y)))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty))
                 (not (on ?x ?y)))))
)";

struct GeneratorConfig {
  int num_blocks = 3;
  std::uint64_t rng_seed = 0;
  std::optional<int> min_plan_length;
  int max_attempts = 1000;
};

namespace detail {

inline std::vector<std::string> block_names(int n) {
  static const char* colors[] = {"red",    "blue",  "green", "yellow",
                                 "orange", "purple", "black", "white",
                                 "pink",   "brown", "gray",  "cyan"};
  constexpr int num_colors = 12;
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    std::string base = colors[i % num_colors];
    if (i >= num_colors) base += std::to_string(i / num_colors + 1);
    names.push_back(base + "_block");
  }
  return names;
}

// Sequential placement: each block goes on the table or on any current
// tower top with equal probability.
inline std::vector<std::vector<std::string>> sample_towers(
    const std::vector<std::string>& blocks, std::mt19937_64& rng) {
  std::vector<std::vector<std::string>> towers;
  for (const auto& b : blocks) {
    std::uniform_int_distribution<std::size_t> dist(0, towers.size());
    std::size_t choice = dist(rng);
    if (choice == towers.size()) {
      towers.push_back({b});
    } else {
      towers[choice].push_back(b);
    }
  }
  return towers;
}

// on/ontable placement atoms of a tower configuration (bottom first).
inline std::set<GroundAtom> placement_atoms(
    const std::vector<std::vector<std::string>>& towers) {
  std::set<GroundAtom> atoms;
  for (const auto& tower : towers) {
    atoms.insert(GroundAtom{"ontable", {tower.front()}});
    for (std::size_t i = 1; i < tower.size(); ++i) {
      atoms.insert(GroundAtom{"on", {tower[i], tower[i - 1]}});
    }
  }
  return atoms;
}

inline std::set<GroundAtom> full_state_atoms(
    const std::vector<std::vector<std::string>>& towers) {
  std::set<GroundAtom> atoms = placement_atoms(towers);
  for (const auto& tower : towers) {
    atoms.insert(GroundAtom{"clear", {tower.back()}});
  }
  atoms.insert(GroundAtom{"handempty", {}});
  return atoms;
}

inline std::string block_phrase(const std::string& name) {
  std::string phrase = name;
  std::size_t us;
  while ((us = phrase.find('_')) != std::string::npos) phrase[us] = ' ';
  return "the " + phrase;
}

}  // namespace detail

// Renders the goal placement as a deterministic instruction; clauses appear
// in canonical goal-atom order so the goal set is recoverable from the text.
inline std::string render_instruction(const std::set<GroundAtom>& goal) {
  std::string out = "stack the blocks so that ";
  bool first = true;
  for (const auto& atom : goal) {
    if (!first) out += "; ";
    first = false;
    if (atom.predicate == "on") {
      out += detail::block_phrase(atom.args[0]) + " is on " +
             detail::block_phrase(atom.args[1]);
    } else {
      out += detail::block_phrase(atom.args[0]) + " is on the table";
    }
  }
  out += ".";
  return out;
}

// Inverse of render_instruction, used when a pipeline needs the goal atoms
// and by the generator's self-checks.
inline std::set<GroundAtom> parse_instruction_goal(
    const std::string& instruction) {
  std::set<GroundAtom> goal;
  const std::string prefix = "stack the blocks so that ";
  std::size_t begin = instruction.find(prefix);
  if (begin == std::string::npos) return goal;
  std::string body = instruction.substr(begin + prefix.size());
  if (!body.empty() && body.back() == '.') body.pop_back();
  std::size_t pos = 0;
  auto to_name = [](std::string phrase) {
    if (phrase.rfind("the ", 0) == 0) phrase = phrase.substr(4);
    for (char& c : phrase) {
      if (c == ' ') c = '_';
    }
    return phrase;
  };
  while (pos < body.size()) {
    std::size_t end = body.find("; ", pos);
    std::string clause = body.substr(
        pos, end == std::string::npos ? std::string::npos : end - pos);
    std::size_t table = clause.find(" is on the table");
    std::size_t on = clause.find(" is on ");
    if (table != std::string::npos) {
      goal.insert(GroundAtom{"ontable", {to_name(clause.substr(0, table))}});
    } else if (on != std::string::npos) {
      goal.insert(GroundAtom{"on",
                             {to_name(clause.substr(0, on)),
                              to_name(clause.substr(on + 7))}});
    }
    if (end == std::string::npos) break;
    pos = end + 2;
  }
  return goal;
}

// Programmatic Blocksworld task generation: uniform random initial and goal
// tower configurations over color-named blocks, with optional
// rejection-sampling on the optimal plan length.
inline TaskInstance generate_blocksworld(const GeneratorConfig& config) {
  if (config.num_blocks < 1) {
    throw Error("num_blocks must be at least 1");
  }
  std::vector<std::string> blocks = detail::block_names(config.num_blocks);
  std::mt19937_64 rng(config.rng_seed);

  Problem problem;
  problem.domain_name = "blocksworld";
  problem.name = "bw" + std::to_string(config.num_blocks) + "-seed" +
                 std::to_string(config.rng_seed);
  for (const auto& b : blocks) {
    problem.objects.push_back({b, "block"});
  }
  std::sort(problem.objects.begin(), problem.objects.end());

  static Domain domain = parse_domain(kBlocksworldDomain);

  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    auto init_towers = detail::sample_towers(blocks, rng);
    auto goal_towers = detail::sample_towers(blocks, rng);
    problem.init = detail::full_state_atoms(init_towers);
    problem.goal = detail::placement_atoms(goal_towers);
    if (!config.min_plan_length.has_value()) break;
    PlanResult result = solve(domain, problem);
    if (result.found() &&
        result.cost >= *config.min_plan_length) {
      break;
    }
    if (attempt + 1 == config.max_attempts) {
      throw RejectionExhausted(
          "no instance with optimal plan length >= " +
          std::to_string(*config.min_plan_length) + " after " +
          std::to_string(config.max_attempts) + " attempts");
    }
  }

  TaskInstance task;
  task.task_id = problem.name;
  task.instruction = render_instruction(problem.goal);
  task.domain_text = kBlocksworldDomain;
  task.gt_problem_text = render_problem(problem);
  return task;
}

}  // namespace formabench
