#pragma once

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "formabench/errors.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/planner.hpp"
#include "formabench/validator.hpp"

namespace formabench {

namespace detail {

inline std::filesystem::path unique_temp_dir() {
  static std::mt19937_64 rng(std::random_device{}());
  auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::ostringstream name;
    name << "formabench-" << std::hex << rng();
    std::filesystem::path dir = base / name.str();
    if (std::filesystem::create_directory(dir)) return dir;
  }
  throw Error("could not create a temporary directory");
}

inline bool command_available(const std::string& command) {
  std::istringstream in(command);
  std::string exe;
  in >> exe;
  if (exe.empty()) return false;
  if (exe.find('/') != std::string::npos) {
    return std::filesystem::exists(exe);
  }
  const char* path = std::getenv("PATH");
  if (path == nullptr) return false;
  std::istringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (!dir.empty() && std::filesystem::exists(
            std::filesystem::path(dir) / exe)) {
      return true;
    }
  }
  return false;
}

// Plan file grammar: one "(action args)" per line, case-insensitive;
// ";"-prefixed lines and blank lines are ignored.
inline Plan parse_plan_file(const std::string& text) {
  Plan plan;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == ';') continue;
    std::size_t open = line.find('(', start);
    std::size_t close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos ||
        close <= open) {
      throw SyntaxError("malformed plan line '" + line + "'",
                        {lineno, static_cast<int>(start) + 1});
    }
    std::istringstream body(line.substr(open + 1, close - open - 1));
    GroundAction action;
    std::string tok;
    while (body >> tok) {
      for (char& c : tok) c = static_cast<char>(
          std::tolower(static_cast<unsigned char>(c)));
      if (action.action.empty()) {
        action.action = tok;
      } else {
        action.args.push_back(tok);
      }
    }
    if (action.action.empty()) {
      throw SyntaxError("empty action in plan line '" + line + "'",
                        {lineno, static_cast<int>(open) + 1});
    }
    plan.steps.push_back(action);
  }
  return plan;
}

}  // namespace detail

// Adapter to an external planner process. Contract:
// `<command> <domain-file> <problem-file> <plan-output-file>`.
// The returned plan must pass `simulate` before being reported Found.
inline PlanResult solve_external(const std::string& domain_text,
                                 const std::string& problem_text,
                                 const std::string& planner_command,
                                 double timeout_seconds = 60.0) {
  if (!detail::command_available(planner_command)) {
    throw ExternalPlannerUnavailable("planner command not found: " +
                                     planner_command);
  }
  Domain domain = parse_domain(domain_text);
  Problem problem = parse_problem(problem_text, domain);

  namespace fs = std::filesystem;
  fs::path dir = detail::unique_temp_dir();
  fs::path domain_file = dir / "domain.pddl";
  fs::path problem_file = dir / "problem.pddl";
  fs::path plan_file = dir / "plan.txt";
  {
    std::ofstream(domain_file) << domain_text;
    std::ofstream(problem_file) << problem_text;
  }

  std::ostringstream cmd;
  if (timeout_seconds > 0) {
    cmd << "timeout " << static_cast<long>(timeout_seconds + 0.999) << " ";
  }
  cmd << planner_command << " " << domain_file << " " << problem_file << " "
      << plan_file << " >/dev/null 2>&1";
  int status = std::system(cmd.str().c_str());
  int exit_code = -1;
  if (status != -1) {
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string plan_text;
  if (fs::exists(plan_file)) {
    std::ifstream in(plan_file);
    std::stringstream buf;
    buf << in.rdbuf();
    plan_text = buf.str();
  }
  fs::remove_all(dir);

  if (exit_code == 124) {
    throw TimeoutError("external planner timed out after " +
                       std::to_string(timeout_seconds) + "s");
  }
  if (exit_code == 127) {
    throw ExternalPlannerUnavailable("planner command not executable: " +
                                     planner_command);
  }
  if (plan_text.empty()) {
    throw ExternalPlannerFailure("external planner exited with code " +
                                 std::to_string(exit_code) +
                                 " and produced no plan");
  }

  Plan plan = detail::parse_plan_file(plan_text);
  SimulationResult sim = simulate(domain, problem, plan);
  if (!sim.success) {
    throw ExternalPlannerFailure(
        "external planner output does not validate: step " +
        (sim.failed_step ? std::to_string(*sim.failed_step) : "goal") +
        ", reason " + (sim.failure_reason ? to_string(*sim.failure_reason)
                                          : "unknown"));
  }

  PlanResult result;
  result.status = PlanResult::Status::Found;
  result.plan = plan;
  result.cost = static_cast<int>(plan.steps.size());
  return result;
}

}  // namespace formabench
