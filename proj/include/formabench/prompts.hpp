#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "formabench/errors.hpp"

namespace formabench {

// One-shot out-of-domain example shown for PDDL syntax (Tower of Hanoi).
inline const char* kHanoiProblemExample = R"((define (problem hanoi-3)
  (:domain hanoi)
  (:objects peg1 - peg peg2 - peg peg3 - peg d1 - disc d2 - disc d3 - disc)
  (:init (on d1 d2) (on d2 d3) (on d3 peg1) (clear d1) (clear peg2) (clear peg3)
         (smaller d1 d2) (smaller d1 d3) (smaller d2 d3)
         (smaller d1 peg1) (smaller d1 peg2) (smaller d1 peg3)
         (smaller d2 peg1) (smaller d2 peg2) (smaller d2 peg3)
         (smaller d3 peg1) (smaller d3 peg2) (smaller d3 peg3))
  (:goal (and (on d1 d2) (on d2 d3) (on d3 peg3))))
)";

// One-shot out-of-domain example of a plan as grounded action lines.
inline const char* kHanoiPlanExample = R"((move d1 d2 peg2)
(move d2 d3 peg3)
(move d1 peg2 d2)
)";

// Versioned prompt templates with named {{slot}}s, one template per pipeline
// step. All claims about transcripts are relative to a catalog version.
class PromptCatalog {
 public:
  static constexpr const char* kVersion = "builtin-1";

  static PromptCatalog builtin() {
    PromptCatalog c;
    c.version_ = kVersion;
    c.templates_["direct-p"] =
        "You are given {{image_count}} image(s) of a scene, a planning "
        "instruction, and a PDDL domain file.\n"
        "Write the PDDL problem file that encodes the objects, the initial "
        "state visible in the images, and the goal implied by the "
        "instruction.\n\n"
        "Here is an example of a problem file from an unrelated domain:\n"
        "```\n{{example}}```\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Instruction: {{instruction}}\n\n"
        "Output the problem file in a fenced code block.\n";
    c.templates_["caption-p.caption"] =
        "You are given {{image_count}} image(s) of a scene and a planning "
        "instruction.\n"
        "Write a detailed caption of the scene covering five aspects: "
        "(i) relevant object types and their instances, (ii) the quantity of "
        "each object type, (iii) relevant spatial relationships between the "
        "objects, (iv) task-related object properties, and (v) vision-related "
        "object properties.\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Instruction: {{instruction}}\n";
    c.templates_["caption-p.problem"] =
        "You are given {{image_count}} image(s) of a scene, a planning "
        "instruction, a PDDL domain file, and a caption of the scene.\n"
        "Write the PDDL problem file that encodes the objects, the initial "
        "state, and the goal implied by the instruction.\n\n"
        "Here is an example of a problem file from an unrelated domain:\n"
        "```\n{{example}}```\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Scene caption:\n{{caption}}\n\n"
        "Instruction: {{instruction}}\n\n"
        "Output the problem file in a fenced code block.\n";
    c.templates_["sg-p.graph"] =
        "You are given {{image_count}} image(s) of a scene and a PDDL domain "
        "file.\n"
        "List all the instantiated objects and all the grounded predicates "
        "that hold in the scene, one declaration per line, using exactly "
        "this format:\n"
        "obj <name> - <type>\n"
        "atom (<predicate> <args>)\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Instruction: {{instruction}}\n";
    c.templates_["sg-p.translate"] =
        "You are given a PDDL domain file, a scene graph of instantiated "
        "objects and grounded predicates, and a planning instruction.\n"
        "Translate the scene graph into a PDDL problem file: the objects and "
        "grounded predicates become the :objects and :init sections, and the "
        "goal states are inferred from the instruction.\n\n"
        "Here is an example of a problem file from an unrelated domain:\n"
        "```\n{{example}}```\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Scene graph:\n{{scene_graph}}\n\n"
        "Instruction: {{instruction}}\n\n"
        "Output the problem file in a fenced code block.\n";
    c.templates_["apsg.objects"] =
        "You are given {{image_count}} image(s) of a scene and a PDDL domain "
        "file.\n"
        "Identify all relevant objects in the scene and their type, one per "
        "line, using exactly this format:\n"
        "obj <name> - <type>\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Instruction: {{instruction}}\n";
    c.templates_["apsg.verify"] =
        "You are given {{image_count}} image(s) of a scene and a list of "
        "candidate grounded predicates.\n"
        "For each candidate, reply on its own line with\n"
        "(<predicate> <args>): True\n"
        "if it holds in the scene, or\n"
        "(<predicate> <args>): False\n"
        "otherwise.\n\n"
        "Candidates:\n{{candidates}}\n";
    c.templates_["apsg.goal"] =
        "You are given a planning instruction, the objects in the scene, and "
        "the verified initial states.\n"
        "Write the complete PDDL problem file, adding the goal states implied "
        "by the instruction. You may add or remove initial states if the "
        "goal requires it.\n\n"
        "Here is an example of a problem file from an unrelated domain:\n"
        "```\n{{example}}```\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Objects:\n{{objects}}\n"
        "Initial states:\n{{init}}\n\n"
        "Instruction: {{instruction}}\n\n"
        "Output the problem file in a fenced code block.\n";
    c.templates_["epsg.verify"] =
        "You are given {{image_count}} image(s) of a scene and one candidate "
        "grounded predicate.\n"
        "Reply with a single line\n"
        "{{candidate}}: True\n"
        "if it holds in the scene, or\n"
        "{{candidate}}: False\n"
        "otherwise.\n";
    c.templates_["direct-plan"] =
        "You are given {{image_count}} image(s) of a scene, a planning "
        "instruction, and a PDDL domain file.\n"
        "Output a plan that consists solely of grounded actions defined in "
        "the domain, one \"(action args)\" per line.\n\n"
        "Here is an example of a plan from an unrelated domain:\n"
        "```\n{{example}}```\n\n"
        "Domain file:\n```\n{{domain}}```\n\n"
        "Instruction: {{instruction}}\n";
    return c;
  }

  // Loads "<name>.txt" per template from a directory, starting from the
  // builtin set so partial catalogs only override what they ship.
  static PromptCatalog load(const std::filesystem::path& dir) {
    PromptCatalog c = builtin();
    if (!std::filesystem::is_directory(dir)) {
      throw Error("prompt catalog directory not found: " + dir.string());
    }
    c.version_ = dir.filename().string();
    for (auto& [name, text] : c.templates_) {
      std::filesystem::path file = dir / (name + ".txt");
      if (std::filesystem::exists(file)) {
        std::ifstream in(file);
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
      }
    }
    return c;
  }

  const std::string& version() const { return version_; }

  bool has(const std::string& name) const {
    return templates_.count(name) > 0;
  }

  // Substitutes every {{slot}}; a slot without a supplied value is an error.
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& slots) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) {
      throw Error("unknown prompt template '" + name + "'");
    }
    const std::string& tpl = it->second;
    std::string out;
    std::size_t i = 0;
    while (i < tpl.size()) {
      std::size_t open = tpl.find("{{", i);
      if (open == std::string::npos) {
        out += tpl.substr(i);
        break;
      }
      out += tpl.substr(i, open - i);
      std::size_t close = tpl.find("}}", open + 2);
      if (close == std::string::npos) {
        throw Error("unterminated slot in template '" + name + "'");
      }
      std::string slot = tpl.substr(open + 2, close - open - 2);
      auto sit = slots.find(slot);
      if (sit == slots.end()) {
        throw Error("no value for slot '" + slot + "' in template '" + name +
                    "'");
      }
      out += sit->second;
      i = close + 2;
    }
    return out;
  }

 private:
  std::string version_;
  std::map<std::string, std::string> templates_;
};

}  // namespace formabench
