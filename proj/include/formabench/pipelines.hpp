#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "formabench/bench/dataset.hpp"
#include "formabench/errors.hpp"
#include "formabench/grounding.hpp"
#include "formabench/metrics.hpp"
#include "formabench/model_client.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/prompts.hpp"
#include "formabench/scene_graph.hpp"
#include "formabench/validator.hpp"

namespace formabench {

enum class PipelineTag {
  DirectP,
  CaptionP,
  SgP,
  ApSgP,
  EpSgP,
  DirectPlan,
};

inline const char* to_string(PipelineTag tag) {
  switch (tag) {
    case PipelineTag::DirectP: return "direct-p";
    case PipelineTag::CaptionP: return "caption-p";
    case PipelineTag::SgP: return "sg-p";
    case PipelineTag::ApSgP: return "ap-sg-p";
    case PipelineTag::EpSgP: return "ep-sg-p";
    case PipelineTag::DirectPlan: return "direct-plan";
  }
  return "?";
}

inline std::optional<PipelineTag> parse_pipeline_tag(const std::string& s) {
  if (s == "direct-p") return PipelineTag::DirectP;
  if (s == "caption-p") return PipelineTag::CaptionP;
  if (s == "sg-p") return PipelineTag::SgP;
  if (s == "ap-sg-p") return PipelineTag::ApSgP;
  if (s == "ep-sg-p") return PipelineTag::EpSgP;
  if (s == "direct-plan") return PipelineTag::DirectPlan;
  return std::nullopt;
}

inline std::vector<PipelineTag> all_pipelines() {
  return {PipelineTag::DirectP, PipelineTag::CaptionP, PipelineTag::SgP,
          PipelineTag::ApSgP,   PipelineTag::EpSgP,    PipelineTag::DirectPlan};
}

inline bool is_formalizer(PipelineTag tag) {
  return tag != PipelineTag::DirectPlan;
}

// Everything needed to replay one model exchange byte-for-byte.
struct TranscriptEntry {
  std::string step;
  std::string template_name;
  std::map<std::string, std::string> slots;
  std::string prompt;
  std::string response;
};

struct PipelineOutput {
  enum class Kind { ProblemText, PlanSteps };
  Kind kind = Kind::ProblemText;
  std::string problem_text;       // formalizer pipelines
  std::optional<Plan> plan;       // direct-plan
  std::vector<TranscriptEntry> transcript;
  TokenUsage tokens;
  std::string intermediate;  // caption, scene graph, or verified init
};

// Returns the content of the last fenced code block containing
// "(define (problem"; falls back to the balanced substring starting at the
// last bare occurrence.
inline std::string extract_pddl(const std::string& text) {
  std::string lower = detail::lowercase(text);
  const std::string needle = "(define (problem";

  // Rule 1: last matching fenced block.
  std::string best;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("```", pos);
    if (open == std::string::npos) break;
    std::size_t content_start = text.find('\n', open + 3);
    if (content_start == std::string::npos) break;
    ++content_start;
    std::size_t close = text.find("```", content_start);
    if (close == std::string::npos) break;
    std::string content = text.substr(content_start, close - content_start);
    if (detail::lowercase(content).find(needle) != std::string::npos) {
      best = content;
    }
    pos = close + 3;
  }
  if (!best.empty()) return best;

  // Rule 2: balanced substring from the last bare occurrence.
  std::size_t start = lower.rfind(needle);
  if (start == std::string::npos) {
    throw ExtractionError("no PDDL problem found in model output");
  }
  int depth = 0;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')') {
      --depth;
      if (depth == 0) return text.substr(start, i - start + 1);
    }
  }
  throw ExtractionError("unbalanced PDDL problem in model output");
}

// Collects, in order, every line holding "(name args)" whose name is a
// domain action; leading numbering/bullets and prose lines are ignored.
inline Plan extract_plan(const std::string& text, const Domain& domain) {
  Plan plan;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = detail::trim(line);
    while (!t.empty() &&
           (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.' ||
            t[0] == ')' || t[0] == '-' || t[0] == '*')) {
      t.erase(t.begin());
      t = detail::trim(t);
      if (!t.empty() && t[0] == '(') break;
    }
    if (t.empty() || t[0] == ';' || t[0] != '(') continue;
    std::size_t close = t.find(')');
    if (close == std::string::npos) continue;
    GroundAtom parsed;
    if (!detail::parse_atom_string(t.substr(0, close + 1), parsed)) continue;
    if (domain.find_action(parsed.predicate) == nullptr) continue;
    plan.steps.push_back(GroundAction{parsed.predicate, parsed.args});
  }
  if (plan.steps.empty()) {
    throw ExtractionError("no grounded action lines in model output");
  }
  return plan;
}

struct PipelineOptions {
  GroundingConfig grounding;
  double temperature = 0.7;
  int max_tokens = 1024;
};

namespace detail {

struct PipelineRun {
  const TaskInstance& task;
  Client& client;
  const PromptCatalog& catalog;
  const PipelineOptions& options;
  PipelineTag tag;
  PipelineOutput out;

  std::string call(const std::string& step, const std::string& template_name,
                   std::map<std::string, std::string> slots,
                   const std::string& payload = "", bool send_images = true) {
    slots["image_count"] = std::to_string(task.images.size());
    ModelRequest request;
    request.temperature = options.temperature;
    request.max_tokens = options.max_tokens;
    request.meta = {task.task_id, to_string(tag), step, payload};
    ModelRequest::Message msg;
    msg.role = "user";
    std::string prompt = catalog.render(template_name, slots);
    msg.parts.push_back({ModelRequest::Part::Kind::Text, prompt, {}, ""});
    if (send_images) {
      for (const auto& img : task.images) {
        msg.parts.push_back({ModelRequest::Part::Kind::Image, img, {},
                             mime_for_path(img)});
      }
    }
    request.messages.push_back(msg);
    ModelResponse resp = client.complete(request);
    out.tokens += resp.usage;
    out.transcript.push_back(
        {step, template_name, slots, prompt, resp.text});
    return resp.text;
  }
};

// "(pred args): True|False" lines; anything else, including malformed
// labels, counts as False.
inline std::set<GroundAtom> parse_verification(const std::string& text) {
  std::set<GroundAtom> verified;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t colon = line.rfind(':');
    if (colon == std::string::npos) continue;
    GroundAtom atom;
    if (!parse_atom_string(line.substr(0, colon), atom)) continue;
    std::string label = lowercase(trim(line.substr(colon + 1)));
    if (label == "true") verified.insert(atom);
  }
  return verified;
}

inline std::string candidates_block(const std::vector<GroundAtom>& atoms) {
  std::string out;
  for (const auto& a : atoms) out += a.str() + "\n";
  return out;
}

}  // namespace detail

// Runs one of the six strategies over `client`, producing a problem file
// (formalizer pipelines) or a plan (direct-plan) plus a full transcript.
inline PipelineOutput run_pipeline(PipelineTag tag, const TaskInstance& task,
                                   Client& client,
                                   const PromptCatalog& catalog,
                                   const PipelineOptions& options = {}) {
  Domain domain = parse_domain(task.domain_text);
  detail::PipelineRun run{task, client, catalog, options, tag, {}};

  std::map<std::string, std::string> base = {
      {"domain", task.domain_text},
      {"instruction", task.instruction},
  };

  switch (tag) {
    case PipelineTag::DirectP: {
      auto slots = base;
      slots["example"] = kHanoiProblemExample;
      std::string resp = run.call("problem", "direct-p", slots);
      run.out.kind = PipelineOutput::Kind::ProblemText;
      run.out.problem_text = extract_pddl(resp);
      break;
    }
    case PipelineTag::CaptionP: {
      std::string caption = run.call("caption", "caption-p.caption", base);
      run.out.intermediate = caption;
      auto slots = base;
      slots["example"] = kHanoiProblemExample;
      slots["caption"] = caption;
      std::string resp = run.call("problem", "caption-p.problem", slots);
      run.out.kind = PipelineOutput::Kind::ProblemText;
      run.out.problem_text = extract_pddl(resp);
      break;
    }
    case PipelineTag::SgP: {
      std::string graph = run.call("scene-graph", "sg-p.graph", base);
      run.out.intermediate = graph;
      auto slots = base;
      slots["example"] = kHanoiProblemExample;
      slots["scene_graph"] = graph;
      std::string resp = run.call("translate", "sg-p.translate", slots,
                                  /*payload=*/"", /*send_images=*/false);
      run.out.kind = PipelineOutput::Kind::ProblemText;
      run.out.problem_text = extract_pddl(resp);
      break;
    }
    case PipelineTag::ApSgP:
    case PipelineTag::EpSgP: {
      std::string obj_text = run.call("objects", "apsg.objects", base);
      SceneGraph objects = parse_scene_graph(obj_text);
      // Objects with types unknown to the domain cannot be grounded.
      std::vector<TypedName> grounded_objects;
      for (const auto& o : objects.objects) {
        if (domain.types.declared(o.type)) grounded_objects.push_back(o);
      }
      std::vector<GroundAtom> candidates =
          enumerate_atoms(domain, grounded_objects, options.grounding);

      std::set<GroundAtom> verified;
      if (tag == PipelineTag::ApSgP) {
        std::string block = detail::candidates_block(candidates);
        auto slots = base;
        slots["candidates"] = block;
        std::string resp = run.call("verify", "apsg.verify", slots, block);
        verified = detail::parse_verification(resp);
      } else {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          auto slots = base;
          slots["candidate"] = candidates[i].str();
          std::string resp =
              run.call("verify:" + std::to_string(i), "epsg.verify", slots,
                       candidates[i].str() + "\n");
          for (const auto& atom : detail::parse_verification(resp)) {
            verified.insert(atom);
          }
        }
      }
      // Restrict to atoms that were actually offered for verification.
      std::set<GroundAtom> candidate_set(candidates.begin(),
                                         candidates.end());
      std::set<GroundAtom> init;
      for (const auto& atom : verified) {
        if (candidate_set.count(atom) > 0) init.insert(atom);
      }

      SceneGraph verified_graph;
      verified_graph.objects = grounded_objects;
      verified_graph.atoms.assign(init.begin(), init.end());
      run.out.intermediate = render_scene_graph(verified_graph);

      std::string obj_lines, init_lines;
      for (const auto& o : grounded_objects) {
        obj_lines += o.name + " - " + o.type + "\n";
      }
      for (const auto& a : init) init_lines += a.str() + "\n";
      auto slots = base;
      slots["example"] = kHanoiProblemExample;
      slots["objects"] = obj_lines;
      slots["init"] = init_lines;
      // The goal pass returns a full problem file and may edit the init.
      std::string resp = run.call("goal", "apsg.goal", slots,
                                  /*payload=*/"", /*send_images=*/false);
      run.out.kind = PipelineOutput::Kind::ProblemText;
      run.out.problem_text = extract_pddl(resp);
      break;
    }
    case PipelineTag::DirectPlan: {
      auto slots = base;
      slots["example"] = kHanoiPlanExample;
      std::string resp = run.call("plan", "direct-plan", slots);
      run.out.kind = PipelineOutput::Kind::PlanSteps;
      run.out.plan = extract_plan(resp, domain);
      break;
    }
  }
  return run.out;
}

// Per-task structured transcript log, one exchange per block.
inline std::string render_transcript(const PipelineOutput& output) {
  std::string out;
  for (const auto& entry : output.transcript) {
    out += "=== step: " + entry.step + " (template " + entry.template_name +
           ")\n";
    out += "--- prompt\n" + entry.prompt;
    if (out.back() != '\n') out += '\n';
    out += "--- response\n" + entry.response;
    if (out.back() != '\n') out += '\n';
  }
  return out;
}

}  // namespace formabench
