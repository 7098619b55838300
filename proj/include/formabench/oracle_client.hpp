#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "formabench/bench/dataset.hpp"
#include "formabench/errors.hpp"
#include "formabench/model_client.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/pddl/printer.hpp"
#include "formabench/planner.hpp"
#include "formabench/scene_graph.hpp"

namespace formabench {

struct OracleConfig {
  double drop_init_rate = 0.0;  // in [0, 1]
  double rename_rate = 0.0;     // in [0, 1]
  std::uint64_t rng_seed = 0;
};

namespace detail {

inline std::uint64_t fnv64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

// Test double that derives every pipeline response from the ground-truth
// problem file, injecting controlled corruption: each init atom is dropped
// with probability drop_init_rate and each object name rewritten with
// probability rename_rate. Bit-deterministic given (task, seed).
class OracleClient : public Client {
 public:
  explicit OracleClient(OracleConfig config) : config_(config) {}

  void add_task(const TaskInstance& task) { tasks_[task.task_id] = task; }

  ModelResponse complete(const ModelRequest& request) override {
    auto it = tasks_.find(request.meta.task_id);
    if (it == tasks_.end()) {
      throw FixtureMissing("oracle has no task '" + request.meta.task_id +
                           "'");
    }
    std::string text = respond(it->second, request.meta.step,
                               request.meta.payload);
    ModelResponse resp;
    resp.text = text;
    resp.model_id = "oracle";
    resp.usage.prompt_tokens = detail::estimate_tokens(request.prompt_text());
    resp.usage.response_tokens = detail::estimate_tokens(text);
    resp.usage.calls = 1;
    resp.usage.estimated = true;
    return resp;
  }

  // The corrupted view of a task's ground truth; corruption draws are a pure
  // function of (seed, task_id), so every step of a task agrees.
  Problem corrupted_problem(const TaskInstance& task) const {
    Domain domain = parse_domain(task.domain_text);
    Problem gt = parse_problem(task.gt_problem_text, domain);
    std::mt19937_64 rng(config_.rng_seed ^ detail::fnv64(task.task_id));
    std::bernoulli_distribution rename(config_.rename_rate);
    std::bernoulli_distribution drop(config_.drop_init_rate);

    std::map<std::string, std::string> renames;
    for (const auto& obj : gt.objects) {
      if (config_.rename_rate > 0 && rename(rng)) {
        renames[obj.name] = obj.name + "_r";
      }
    }
    auto renamed = [&](const std::string& name) {
      auto it = renames.find(name);
      return it != renames.end() ? it->second : name;
    };

    Problem out;
    out.name = gt.name;
    out.domain_name = gt.domain_name;
    for (const auto& obj : gt.objects) {
      out.objects.push_back({renamed(obj.name), obj.type});
    }
    std::sort(out.objects.begin(), out.objects.end());
    for (const auto& atom : gt.init) {
      bool dropped = config_.drop_init_rate > 0 && drop(rng);
      if (dropped) continue;
      GroundAtom a{atom.predicate, {}};
      for (const auto& arg : atom.args) a.args.push_back(renamed(arg));
      out.init.insert(a);
    }
    for (const auto& atom : gt.goal) {
      GroundAtom a{atom.predicate, {}};
      for (const auto& arg : atom.args) a.args.push_back(renamed(arg));
      out.goal.insert(a);
    }
    return out;
  }

  // Emits the format the given pipeline step expects, derived from gt.
  std::string respond(const TaskInstance& task, const std::string& step,
                      const std::string& payload) const {
    Problem view = corrupted_problem(task);

    if (step == "problem" || step == "translate" || step == "goal") {
      return "```\n" + render_problem(view) + "```\n";
    }
    if (step == "caption") {
      return render_caption(view, task.instruction);
    }
    if (step == "scene-graph") {
      SceneGraph sg;
      sg.objects = view.objects;
      sg.atoms.assign(view.init.begin(), view.init.end());
      return render_scene_graph(sg);
    }
    if (step == "objects") {
      SceneGraph sg;
      sg.objects = view.objects;
      return render_scene_graph(sg);
    }
    if (step == "verify" || step.rfind("verify:", 0) == 0) {
      std::string out;
      std::istringstream in(payload);
      std::string line;
      while (std::getline(in, line)) {
        GroundAtom atom;
        if (!detail::parse_atom_string(line, atom)) continue;
        bool holds = view.init.count(atom) > 0;
        out += atom.str() + (holds ? ": True\n" : ": False\n");
      }
      return out;
    }
    if (step == "plan") {
      Domain domain = parse_domain(task.domain_text);
      PlanResult result = solve(domain, view);
      if (!result.found()) return "no plan found\n";
      std::string out;
      for (const auto& action : result.plan.steps) {
        out += action.str() + "\n";
      }
      return out;
    }
    throw FixtureMissing("oracle does not understand step '" + step + "'");
  }

 private:
  static std::string render_caption(const Problem& view,
                                    const std::string& instruction) {
    std::map<std::string, std::vector<std::string>> by_type;
    for (const auto& obj : view.objects) {
      by_type[obj.type].push_back(obj.name);
    }
    std::string out = "Object types and instances:\n";
    for (const auto& [type, names] : by_type) {
      out += "- " + type + ":";
      for (const auto& n : names) out += " " + n;
      out += "\n";
    }
    out += "Quantities:\n";
    for (const auto& [type, names] : by_type) {
      out += "- " + std::to_string(names.size()) + " " + type + "(s)\n";
    }
    out += "Spatial relationships and properties:\n";
    for (const auto& atom : view.init) {
      out += "- " + atom.str() + "\n";
    }
    out += "Task context: " + instruction + "\n";
    return out;
  }

  OracleConfig config_;
  std::map<std::string, TaskInstance> tasks_;
};

// Convenience wrapper mirroring the scripted-response surface.
inline ModelResponse oracle_respond(const TaskInstance& task,
                                    const std::string& pipeline_step,
                                    const OracleConfig& config,
                                    const std::string& payload = "") {
  OracleClient client(config);
  ModelResponse resp;
  resp.text = client.respond(task, pipeline_step, payload);
  resp.model_id = "oracle";
  resp.usage.response_tokens = detail::estimate_tokens(resp.text);
  resp.usage.calls = 1;
  resp.usage.estimated = true;
  return resp;
}

}  // namespace formabench
