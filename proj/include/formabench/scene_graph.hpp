#pragma once

#include <cctype>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "formabench/pddl/ast.hpp"

namespace formabench {

// Intermediate objects-plus-initial-state representation exchanged with the
// model.
// Line grammar: `obj <name> - <type>` and `atom (<pred> <args>)`.
struct SceneGraph {
  std::vector<TypedName> objects;  // sorted, unique
  std::vector<GroundAtom> atoms;   // sorted, unique
};

inline std::string render_scene_graph(const SceneGraph& sg) {
  std::string out;
  for (const auto& o : sg.objects) {
    out += "obj " + o.name + " - " + o.type + "\n";
  }
  for (const auto& a : sg.atoms) {
    out += "atom " + a.str() + "\n";
  }
  return out;
}

namespace detail {

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(
      std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// "(pred a b)" -> GroundAtom; returns false when not a parenthesized atom.
inline bool parse_atom_string(const std::string& text, GroundAtom& out) {
  std::string s = trim(text);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') return false;
  std::istringstream in(s.substr(1, s.size() - 2));
  GroundAtom atom;
  std::string tok;
  while (in >> tok) {
    tok = lowercase(tok);
    if (tok.find('(') != std::string::npos ||
        tok.find(')') != std::string::npos) {
      return false;
    }
    if (atom.predicate.empty()) {
      atom.predicate = tok;
    } else {
      atom.args.push_back(tok);
    }
  }
  if (atom.predicate.empty()) return false;
  out = atom;
  return true;
}

}  // namespace detail

// Lenient parse of model-emitted scene graphs: unknown lines are skipped.
inline SceneGraph parse_scene_graph(const std::string& text) {
  SceneGraph sg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = detail::trim(line);
    if (t.rfind("obj ", 0) == 0) {
      std::istringstream body(detail::lowercase(t.substr(4)));
      std::string name, dash, type;
      body >> name >> dash >> type;
      if (!name.empty() && dash == "-" && !type.empty()) {
        sg.objects.push_back({name, type});
      }
    } else if (t.rfind("atom ", 0) == 0) {
      GroundAtom atom;
      if (detail::parse_atom_string(t.substr(5), atom)) {
        sg.atoms.push_back(atom);
      }
    }
  }
  std::sort(sg.objects.begin(), sg.objects.end());
  sg.objects.erase(std::unique(sg.objects.begin(), sg.objects.end()),
                   sg.objects.end());
  std::sort(sg.atoms.begin(), sg.atoms.end());
  sg.atoms.erase(std::unique(sg.atoms.begin(), sg.atoms.end()),
                 sg.atoms.end());
  return sg;
}

}  // namespace formabench
