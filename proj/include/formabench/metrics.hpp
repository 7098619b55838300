#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "formabench/errors.hpp"
#include "formabench/pddl/ast.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/planner.hpp"
#include "formabench/validator.hpp"

namespace formabench {

using AliasMap = std::map<std::string, std::string>;

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SceneScores {
  Prf objects;
  Prf init;
  Prf goal;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long response_tokens = 0;
  long calls = 0;
  bool estimated = false;

  long total() const { return prompt_tokens + response_tokens; }

  TokenUsage& operator+=(const TokenUsage& other) {
    prompt_tokens += other.prompt_tokens;
    response_tokens += other.response_tokens;
    calls += other.calls;
    estimated = estimated || other.estimated;
    return *this;
  }
};

struct TaskOutcome {
  bool compilation_success = false;
  std::optional<bool> planner_success;  // absent for direct-plan
  bool simulation_success = false;
  bool resource_limited = false;  // planner gave up rather than proved
};

struct EvalRecord {
  std::string task_id;
  std::string pipeline;
  TaskOutcome outcome;
  std::optional<SceneScores> scene;  // present iff a problem file parsed
  TokenUsage tokens;
  std::optional<std::size_t> plan_length;
  std::string error;  // client/extraction error note, empty when clean
};

namespace detail {

// Empty-set convention: both empty => 1/1/1; either side empty otherwise
// => 0/0/0.
template <typename T>
Prf prf(const std::set<T>& pred, const std::set<T>& gt) {
  Prf out;
  if (pred.empty() && gt.empty()) {
    out.precision = out.recall = out.f1 = 1.0;
    return out;
  }
  if (pred.empty() || gt.empty()) return out;
  std::size_t hits = 0;
  for (const auto& x : pred) {
    if (gt.count(x) > 0) ++hits;
  }
  out.precision = static_cast<double>(hits) / static_cast<double>(pred.size());
  out.recall = static_cast<double>(hits) / static_cast<double>(gt.size());
  if (out.precision + out.recall > 0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

inline std::string apply_alias(const AliasMap& aliases,
                               const std::string& name) {
  auto it = aliases.find(name);
  return it != aliases.end() ? it->second : name;
}

inline GroundAtom apply_alias(const AliasMap& aliases, const GroundAtom& a) {
  GroundAtom out;
  out.predicate = a.predicate;
  for (const auto& arg : a.args) out.args.push_back(apply_alias(aliases, arg));
  return out;
}

}  // namespace detail

// Scene-level precision/recall/F1 of predicted objects, init atoms, and goal
// atoms against the ground truth. The alias map rewrites predicted object
// names before comparison. Objects match on (name, type) unless
// `objects_name_only` is set.
inline SceneScores scene_scores(const Problem& pred, const Problem& gt,
                                const AliasMap& aliases = {},
                                bool objects_name_only = false) {
  SceneScores scores;

  std::set<std::pair<std::string, std::string>> pred_objects, gt_objects;
  for (const auto& o : pred.objects) {
    pred_objects.emplace(detail::apply_alias(aliases, o.name),
                         objects_name_only ? "" : o.type);
  }
  for (const auto& o : gt.objects) {
    gt_objects.emplace(o.name, objects_name_only ? "" : o.type);
  }
  scores.objects = detail::prf(pred_objects, gt_objects);

  std::set<GroundAtom> pred_init, pred_goal;
  for (const auto& a : pred.init) {
    pred_init.insert(detail::apply_alias(aliases, a));
  }
  for (const auto& a : pred.goal) {
    pred_goal.insert(detail::apply_alias(aliases, a));
  }
  scores.init = detail::prf(pred_init, gt.init);
  scores.goal = detail::prf(pred_goal, gt.goal);
  return scores;
}

// Neutral pipeline artifact: a problem text (formalizer pipelines) or a plan
// (direct-plan), or a failed extraction.
struct PipelineArtifact {
  enum class Kind { ProblemText, PlanSteps, ExtractionFailed };
  Kind kind = Kind::ExtractionFailed;
  bool plan_pipeline = false;  // direct-plan: planner success is undefined
  std::string problem_text;
  Plan plan;
};

struct TaskOutcomeOptions {
  SearchConfig planner;
  GroundingConfig grounding;
  // Ablation switch: simulate against the predicted goal instead of gt's.
  bool simulate_predicted_goal = false;
};

// The three success booleans of a single task. Compilation checks the
// predicted problem text; the planner runs on (domain, P_pred); simulation
// executes the resulting plan from the ground-truth initial state against
// the ground-truth goal.
inline TaskOutcome task_outcome(const PipelineArtifact& artifact,
                                const Domain& domain, const Problem& gt,
                                const TaskOutcomeOptions& options = {},
                                Plan* plan_out = nullptr) {
  TaskOutcome outcome;
  if (artifact.kind == PipelineArtifact::Kind::ExtractionFailed) {
    if (!artifact.plan_pipeline) outcome.planner_success = false;
    return outcome;
  }

  if (artifact.kind == PipelineArtifact::Kind::PlanSteps) {
    outcome.compilation_success = true;
    SimulationResult sim = simulate(domain, gt, artifact.plan);
    outcome.simulation_success = sim.success;
    if (plan_out != nullptr) *plan_out = artifact.plan;
    return outcome;
  }

  CompilationResult comp = check_compilation(artifact.problem_text, domain);
  outcome.compilation_success = comp.ok;
  outcome.planner_success = false;
  if (!comp.ok) return outcome;

  Problem pred = parse_problem(artifact.problem_text, domain);
  PlanResult plan_result = solve(domain, pred, options.planner,
                                 options.grounding);
  if (plan_result.status == PlanResult::Status::Limit) {
    outcome.resource_limited = true;
    return outcome;
  }
  if (!plan_result.found()) return outcome;
  outcome.planner_success = true;
  if (plan_out != nullptr) *plan_out = plan_result.plan;

  Problem sim_target = gt;
  if (options.simulate_predicted_goal) sim_target.goal = pred.goal;
  SimulationResult sim = simulate(domain, sim_target, plan_result.plan);
  outcome.simulation_success = sim.success;
  return outcome;
}

struct PipelineSummary {
  std::size_t task_count = 0;
  double compilation_rate = 0.0;
  double planner_rate = 0.0;  // mean over records where defined
  std::size_t planner_defined = 0;
  double simulation_rate = 0.0;
  SceneScores mean_scene;
  std::size_t scene_count = 0;
  double mean_prompt_tokens = 0.0;
  double mean_response_tokens = 0.0;
  double mean_total_tokens = 0.0;
  double mean_calls = 0.0;
  double success_per_token = 0.0;
  std::size_t resource_limited = 0;
  double mean_plan_length = 0.0;
  std::size_t plan_length_count = 0;
};

struct Summary {
  std::map<std::string, PipelineSummary> pipelines;
};

// Mean simulation success rate divided by mean total tokens per task.
inline double success_per_token(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyInput("success_per_token over zero records");
  double successes = 0.0;
  double tokens = 0.0;
  for (const auto& r : records) {
    successes += r.outcome.simulation_success ? 1.0 : 0.0;
    tokens += static_cast<double>(r.tokens.total());
  }
  if (tokens <= 0.0) throw ZeroTokens("records carry zero tokens");
  double n = static_cast<double>(records.size());
  return (successes / n) / (tokens / n);
}

// Per-pipeline arithmetic means; deterministic under any record order.
inline Summary aggregate(std::vector<EvalRecord> records) {
  if (records.empty()) throw EmptyInput("aggregate over zero records");
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              return a.task_id != b.task_id ? a.task_id < b.task_id
                                            : a.pipeline < b.pipeline;
            });
  Summary summary;
  std::map<std::string, std::vector<const EvalRecord*>> by_pipeline;
  for (const auto& r : records) by_pipeline[r.pipeline].push_back(&r);

  for (const auto& [tag, rs] : by_pipeline) {
    PipelineSummary s;
    s.task_count = rs.size();
    double n = static_cast<double>(rs.size());
    double sim = 0.0;
    double token_sum = 0.0;
    for (const EvalRecord* r : rs) {
      s.compilation_rate += r->outcome.compilation_success ? 1.0 : 0.0;
      if (r->outcome.planner_success.has_value()) {
        ++s.planner_defined;
        s.planner_rate += *r->outcome.planner_success ? 1.0 : 0.0;
      }
      sim += r->outcome.simulation_success ? 1.0 : 0.0;
      if (r->outcome.resource_limited) ++s.resource_limited;
      if (r->scene.has_value()) {
        ++s.scene_count;
        s.mean_scene.objects.precision += r->scene->objects.precision;
        s.mean_scene.objects.recall += r->scene->objects.recall;
        s.mean_scene.objects.f1 += r->scene->objects.f1;
        s.mean_scene.init.precision += r->scene->init.precision;
        s.mean_scene.init.recall += r->scene->init.recall;
        s.mean_scene.init.f1 += r->scene->init.f1;
        s.mean_scene.goal.precision += r->scene->goal.precision;
        s.mean_scene.goal.recall += r->scene->goal.recall;
        s.mean_scene.goal.f1 += r->scene->goal.f1;
      }
      s.mean_prompt_tokens += static_cast<double>(r->tokens.prompt_tokens);
      s.mean_response_tokens += static_cast<double>(r->tokens.response_tokens);
      s.mean_calls += static_cast<double>(r->tokens.calls);
      token_sum += static_cast<double>(r->tokens.total());
      if (r->plan_length.has_value()) {
        ++s.plan_length_count;
        s.mean_plan_length += static_cast<double>(*r->plan_length);
      }
    }
    s.compilation_rate /= n;
    if (s.planner_defined > 0) {
      s.planner_rate /= static_cast<double>(s.planner_defined);
    }
    s.simulation_rate = sim / n;
    if (s.scene_count > 0) {
      double sc = static_cast<double>(s.scene_count);
      s.mean_scene.objects.precision /= sc;
      s.mean_scene.objects.recall /= sc;
      s.mean_scene.objects.f1 /= sc;
      s.mean_scene.init.precision /= sc;
      s.mean_scene.init.recall /= sc;
      s.mean_scene.init.f1 /= sc;
      s.mean_scene.goal.precision /= sc;
      s.mean_scene.goal.recall /= sc;
      s.mean_scene.goal.f1 /= sc;
    }
    s.mean_prompt_tokens /= n;
    s.mean_response_tokens /= n;
    s.mean_total_tokens = token_sum / n;
    s.mean_calls /= n;
    if (s.mean_total_tokens > 0) {
      s.success_per_token = s.simulation_rate / s.mean_total_tokens;
    }
    if (s.plan_length_count > 0) {
      s.mean_plan_length /= static_cast<double>(s.plan_length_count);
    }
    summary.pipelines[tag] = s;
  }
  return summary;
}

}  // namespace formabench
