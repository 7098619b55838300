#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace formabench {

// A name paired with its declared type, e.g. "red_block - block".
struct TypedName {
  std::string name;
  std::string type = "object";

  friend bool operator==(const TypedName& a, const TypedName& b) {
    return a.name == b.name && a.type == b.type;
  }
  friend bool operator<(const TypedName& a, const TypedName& b) {
    return a.name != b.name ? a.name < b.name : a.type < b.type;
  }
};

// Acyclic type forest rooted at `object`.
class TypeHierarchy {
 public:
  void add(const std::string& type, const std::string& parent) {
    if (type == "object") return;
    parent_[type] = parent;
  }

  bool declared(const std::string& type) const {
    return type == "object" || parent_.count(type) > 0;
  }

  // True when `type` equals `ancestor` or reaches it through parent links.
  bool is_subtype(const std::string& type, const std::string& ancestor) const {
    std::string cur = type;
    for (std::size_t guard = 0; guard <= parent_.size() + 1; ++guard) {
      if (cur == ancestor) return true;
      if (cur == "object") return false;
      auto it = parent_.find(cur);
      if (it == parent_.end()) return false;
      cur = it->second;
    }
    return false;  // cycle
  }

  bool acyclic() const {
    for (const auto& [t, _] : parent_) {
      if (!is_subtype(t, "object")) return false;
    }
    return true;
  }

  const std::map<std::string, std::string>& edges() const { return parent_; }

  friend bool operator==(const TypeHierarchy& a, const TypeHierarchy& b) {
    return a.parent_ == b.parent_;
  }

 private:
  std::map<std::string, std::string> parent_;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;

  friend bool operator==(const PredicateSchema& a, const PredicateSchema& b) {
    return a.name == b.name && a.params == b.params;
  }
};

// Atom over an action's parameter variables (or constants).
struct SchemaAtom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const SchemaAtom& a, const SchemaAtom& b) {
    return a.predicate == b.predicate && a.args == b.args;
  }
  friend bool operator<(const SchemaAtom& a, const SchemaAtom& b) {
    return a.predicate != b.predicate ? a.predicate < b.predicate
                                      : a.args < b.args;
  }
};

struct Literal {
  SchemaAtom atom;
  bool negated = false;

  friend bool operator==(const Literal& a, const Literal& b) {
    return a.negated == b.negated && a.atom == b.atom;
  }
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.atom != b.atom) return a.atom < b.atom;
    return a.negated < b.negated;
  }
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> preconditions;   // sorted, unique
  std::vector<SchemaAtom> add_effects;  // sorted, unique
  std::vector<SchemaAtom> del_effects;  // sorted, unique

  friend bool operator==(const ActionSchema& a, const ActionSchema& b) {
    return a.name == b.name && a.params == b.params &&
           a.preconditions == b.preconditions &&
           a.add_effects == b.add_effects && a.del_effects == b.del_effects;
  }
};

struct Domain {
  std::string name;
  TypeHierarchy types;
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;
  std::vector<std::string> requirements;

  const PredicateSchema* find_predicate(const std::string& name,
                                        std::size_t arity) const {
    for (const auto& p : predicates) {
      if (p.name == name && p.params.size() == arity) return &p;
    }
    return nullptr;
  }

  const ActionSchema* find_action(const std::string& name) const {
    for (const auto& a : actions) {
      if (a.name == name) return &a;
    }
    return nullptr;
  }

  const TypedName* find_constant(const std::string& name) const {
    for (const auto& c : constants) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.name == b.name && a.types == b.types &&
           a.constants == b.constants && a.predicates == b.predicates &&
           a.actions == b.actions && a.requirements == b.requirements;
  }
};

// Fully instantiated fact. Canonical rendering is "(pred a1 a2)" lowercased.
struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  std::string str() const {
    std::string out = "(" + predicate;
    for (const auto& a : args) {
      out += ' ';
      out += a;
    }
    out += ')';
    return out;
  }

  friend bool operator==(const GroundAtom& a, const GroundAtom& b) {
    return a.predicate == b.predicate && a.args == b.args;
  }
  friend bool operator!=(const GroundAtom& a, const GroundAtom& b) {
    return !(a == b);
  }
  friend bool operator<(const GroundAtom& a, const GroundAtom& b) {
    return a.predicate != b.predicate ? a.predicate < b.predicate
                                      : a.args < b.args;
  }
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;  // sorted, unique
  std::set<GroundAtom> init;
  std::set<GroundAtom> goal;  // conjunction of positive atoms

  const TypedName* find_object(const std::string& name) const {
    auto it = std::lower_bound(
        objects.begin(), objects.end(), name,
        [](const TypedName& t, const std::string& n) { return t.name < n; });
    if (it != objects.end() && it->name == name) return &*it;
    return nullptr;
  }

  friend bool operator==(const Problem& a, const Problem& b) {
    return a.name == b.name && a.domain_name == b.domain_name &&
           a.objects == b.objects && a.init == b.init && a.goal == b.goal;
  }
};

// A set of facts; one point of the induced state space.
struct State {
  std::set<GroundAtom> atoms;

  bool contains(const GroundAtom& a) const { return atoms.count(a) > 0; }

  friend bool operator==(const State& a, const State& b) {
    return a.atoms == b.atoms;
  }
};

struct GroundAction {
  std::string action;
  std::vector<std::string> args;

  std::string str() const {
    std::string out = "(" + action;
    for (const auto& a : args) {
      out += ' ';
      out += a;
    }
    out += ')';
    return out;
  }

  friend bool operator==(const GroundAction& a, const GroundAction& b) {
    return a.action == b.action && a.args == b.args;
  }
  friend bool operator<(const GroundAction& a, const GroundAction& b) {
    return a.action != b.action ? a.action < b.action : a.args < b.args;
  }
};

}  // namespace formabench
