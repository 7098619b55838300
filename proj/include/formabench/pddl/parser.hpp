#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "formabench/errors.hpp"
#include "formabench/pddl/ast.hpp"

namespace formabench {

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  SourcePos pos;
};

struct CompilationResult {
  bool ok = false;
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

struct Sexpr {
  enum class Kind { Symbol, List };
  Kind kind = Kind::Symbol;
  std::string symbol;  // lowercased
  std::vector<Sexpr> items;
  SourcePos pos;

  bool is_symbol(const char* s) const {
    return kind == Kind::Symbol && symbol == s;
  }
  const std::string& head() const {
    static const std::string empty;
    if (kind == Kind::List && !items.empty() &&
        items[0].kind == Kind::Symbol) {
      return items[0].symbol;
    }
    return empty;
  }
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  struct Token {
    enum class Kind { LParen, RParen, Symbol, End };
    Kind kind;
    std::string value;
    SourcePos pos;
  };

  Token next() {
    skip_trivia();
    Token t;
    t.pos = pos_;
    if (i_ >= text_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = text_[i_];
    if (c == '(') {
      advance();
      t.kind = Token::Kind::LParen;
      return t;
    }
    if (c == ')') {
      advance();
      t.kind = Token::Kind::RParen;
      return t;
    }
    t.kind = Token::Kind::Symbol;
    while (i_ < text_.size()) {
      char d = text_[i_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(
              static_cast<unsigned char>(d))) {
        break;
      }
      t.value += static_cast<char>(
          std::tolower(static_cast<unsigned char>(d)));
      advance();
    }
    return t;
  }

 private:
  void skip_trivia() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ';') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.col = 1;
    } else {
      ++pos_.col;
    }
    ++i_;
  }

  const std::string& text_;
  std::size_t i_ = 0;
  SourcePos pos_{1, 1};
};

inline Sexpr read_sexpr(Lexer& lex, const Lexer::Token& first) {
  using TK = Lexer::Token::Kind;
  if (first.kind == TK::Symbol) {
    Sexpr s;
    s.kind = Sexpr::Kind::Symbol;
    s.symbol = first.value;
    s.pos = first.pos;
    return s;
  }
  if (first.kind == TK::RParen) {
    throw SyntaxError("unexpected ')'", first.pos);
  }
  if (first.kind == TK::End) {
    throw SyntaxError("unexpected end of input", first.pos);
  }
  Sexpr list;
  list.kind = Sexpr::Kind::List;
  list.pos = first.pos;
  for (;;) {
    Lexer::Token t = lex.next();
    if (t.kind == TK::RParen) return list;
    if (t.kind == TK::End) {
      throw SyntaxError("unclosed parenthesis", first.pos);
    }
    list.items.push_back(read_sexpr(lex, t));
  }
}

// Parses the single top-level form; trailing content is an error.
inline Sexpr read_toplevel(const std::string& text) {
  Lexer lex(text);
  Lexer::Token t = lex.next();
  if (t.kind == Lexer::Token::Kind::End) {
    throw SyntaxError("empty input", t.pos);
  }
  Sexpr s = read_sexpr(lex, t);
  Lexer::Token rest = lex.next();
  if (rest.kind != Lexer::Token::Kind::End) {
    throw SyntaxError("trailing content after top-level form", rest.pos);
  }
  return s;
}

inline bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

// "a b - t c - u d" style typed lists; untyped trailing names get `object`.
inline std::vector<TypedName> parse_typed_list(
    const std::vector<Sexpr>& items, std::size_t begin, std::size_t end,
    bool variables) {
  std::vector<TypedName> out;
  std::vector<std::size_t> pending;
  for (std::size_t i = begin; i < end; ++i) {
    const Sexpr& s = items[i];
    if (s.kind != Sexpr::Kind::Symbol) {
      throw SyntaxError("expected a name in typed list", s.pos);
    }
    if (s.symbol == "-") {
      if (i + 1 >= end || items[i + 1].kind != Sexpr::Kind::Symbol) {
        throw SyntaxError("expected a type after '-'", s.pos);
      }
      if (pending.empty()) {
        throw SyntaxError("dangling '-' in typed list", s.pos);
      }
      const std::string& type = items[i + 1].symbol;
      for (std::size_t j : pending) {
        out.push_back({items[j].symbol, type});
      }
      pending.clear();
      ++i;
      continue;
    }
    if (variables && s.symbol[0] != '?') {
      throw SyntaxError("expected a '?variable', got '" + s.symbol + "'",
                        s.pos);
    }
    if (!variables && s.symbol[0] == '?') {
      throw SyntaxError("unexpected variable '" + s.symbol + "'", s.pos);
    }
    pending.push_back(i);
  }
  for (std::size_t j : pending) {
    out.push_back({items[j].symbol, "object"});
  }
  return out;
}

inline SchemaAtom parse_schema_atom(const Sexpr& s) {
  if (s.kind != Sexpr::Kind::List || s.items.empty() ||
      s.items[0].kind != Sexpr::Kind::Symbol) {
    throw SyntaxError("expected an atom '(pred args...)'", s.pos);
  }
  SchemaAtom a;
  a.predicate = s.items[0].symbol;
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    if (s.items[i].kind != Sexpr::Kind::Symbol) {
      throw SyntaxError("atom arguments must be names", s.items[i].pos);
    }
    a.args.push_back(s.items[i].symbol);
  }
  return a;
}

inline const char* kUnsupportedHeads[] = {
    "forall", "exists", "when",     "imply",    "or",
    "=",      ">",      "<",        ">=",       "<=",
    "assign", "increase", "decrease", "scale-up", "scale-down"};

inline bool unsupported_head(const std::string& h) {
  for (const char* u : kUnsupportedHeads) {
    if (h == u) return true;
  }
  return false;
}

inline void flatten_condition(const Sexpr& s, std::vector<Literal>& out,
                              bool allow_negation) {
  const std::string& h = s.head();
  if (unsupported_head(h)) {
    throw UnsupportedFeature("'" + h + "' is outside the supported subset",
                             s.pos);
  }
  if (h == "and") {
    for (std::size_t i = 1; i < s.items.size(); ++i) {
      flatten_condition(s.items[i], out, allow_negation);
    }
    return;
  }
  if (h == "not") {
    if (!allow_negation) {
      throw UnsupportedFeature("negation is not supported here", s.pos);
    }
    if (s.items.size() != 2) {
      throw SyntaxError("'not' takes exactly one atom", s.pos);
    }
    Literal l;
    l.negated = true;
    l.atom = parse_schema_atom(s.items[1]);
    out.push_back(l);
    return;
  }
  Literal l;
  l.atom = parse_schema_atom(s);
  out.push_back(l);
}

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Checks an atom over an action's parameters against the domain's schemas.
inline void check_schema_atom(const Domain& d, const ActionSchema& action,
                              const SchemaAtom& atom, SourcePos pos) {
  const PredicateSchema* pred = d.find_predicate(atom.predicate,
                                                 atom.args.size());
  if (pred == nullptr) {
    throw SemanticError("undeclared predicate '" + atom.predicate +
                            "' with arity " + std::to_string(atom.args.size()),
                        pos);
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const std::string& arg = atom.args[i];
    std::string arg_type;
    if (!arg.empty() && arg[0] == '?') {
      const TypedName* p = nullptr;
      for (const auto& q : action.params) {
        if (q.name == arg) p = &q;
      }
      if (p == nullptr) {
        throw SemanticError("variable '" + arg + "' not in parameters of '" +
                                action.name + "'",
                            pos);
      }
      arg_type = p->type;
    } else {
      const TypedName* c = d.find_constant(arg);
      if (c == nullptr) {
        throw SemanticError("unknown constant '" + arg + "' in action '" +
                                action.name + "'",
                            pos);
      }
      arg_type = c->type;
    }
    if (!d.types.is_subtype(arg_type, pred->params[i].type)) {
      throw SemanticError("argument " + std::to_string(i + 1) + " of '" +
                              atom.predicate + "' expects type '" +
                              pred->params[i].type + "', got '" + arg_type +
                              "'",
                          pos);
    }
  }
}

inline const std::set<std::string>& known_requirements() {
  static const std::set<std::string> reqs = {
      ":strips", ":typing", ":negative-preconditions"};
  return reqs;
}

}  // namespace detail

// Parses a PDDL domain in the STRIPS + :typing + negative-preconditions
// subset. Throws SyntaxError / UnsupportedFeature / SemanticError.
inline Domain parse_domain(const std::string& text,
                           std::vector<Diagnostic>* warnings = nullptr) {
  using detail::Sexpr;
  Sexpr top = detail::read_toplevel(text);
  if (top.head() != "define") {
    throw SyntaxError("expected '(define (domain ...) ...)'", top.pos);
  }
  if (top.items.size() < 2 || top.items[1].head() != "domain" ||
      top.items[1].items.size() != 2 ||
      top.items[1].items[1].kind != Sexpr::Kind::Symbol) {
    throw SyntaxError("expected '(domain <name>)'", top.pos);
  }

  Domain d;
  d.name = top.items[1].items[1].symbol;

  auto warn = [&](const std::string& msg, SourcePos pos) {
    if (warnings != nullptr) {
      warnings->push_back({Diagnostic::Severity::Warning, msg, pos});
    }
  };

  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const Sexpr& sec = top.items[i];
    const std::string& h = sec.head();
    if (h == ":requirements") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        if (sec.items[j].kind != Sexpr::Kind::Symbol) {
          throw SyntaxError("requirement tags must be symbols",
                            sec.items[j].pos);
        }
        const std::string& tag = sec.items[j].symbol;
        d.requirements.push_back(tag);
        if (detail::known_requirements().count(tag) == 0) {
          warn("requirement '" + tag + "' is recorded but not enforced",
               sec.items[j].pos);
        }
      }
    } else if (h == ":types") {
      auto typed = detail::parse_typed_list(sec.items, 1, sec.items.size(),
                                            /*variables=*/false);
      for (const auto& t : typed) {
        d.types.add(t.name, t.type);
      }
      if (!d.types.acyclic()) {
        throw SemanticError("type hierarchy contains a cycle", sec.pos);
      }
      for (const auto& [t, parent] : d.types.edges()) {
        if (!d.types.declared(parent)) {
          throw SemanticError("type '" + t + "' has undeclared parent '" +
                                  parent + "'",
                              sec.pos);
        }
      }
    } else if (h == ":constants") {
      auto consts = detail::parse_typed_list(sec.items, 1, sec.items.size(),
                                             /*variables=*/false);
      for (const auto& c : consts) {
        if (!d.types.declared(c.type)) {
          throw SemanticError("constant '" + c.name + "' has undeclared type '"
                                  + c.type + "'",
                              sec.pos);
        }
        d.constants.push_back(c);
      }
      detail::sort_unique(d.constants);
    } else if (h == ":predicates") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const Sexpr& p = sec.items[j];
        if (p.kind != Sexpr::Kind::List || p.items.empty() ||
            p.items[0].kind != Sexpr::Kind::Symbol) {
          throw SyntaxError("expected '(pred ?v - type ...)'", p.pos);
        }
        PredicateSchema schema;
        schema.name = p.items[0].symbol;
        schema.params = detail::parse_typed_list(p.items, 1, p.items.size(),
                                                 /*variables=*/true);
        for (const auto& q : schema.params) {
          if (!d.types.declared(q.type)) {
            throw SemanticError("predicate '" + schema.name +
                                    "' uses undeclared type '" + q.type + "'",
                                p.pos);
          }
        }
        if (d.find_predicate(schema.name, schema.params.size()) != nullptr) {
          throw SemanticError("duplicate predicate '" + schema.name + "/" +
                                  std::to_string(schema.params.size()) + "'",
                              p.pos);
        }
        d.predicates.push_back(schema);
      }
    } else if (h == ":action") {
      if (sec.items.size() < 2 ||
          sec.items[1].kind != Sexpr::Kind::Symbol) {
        throw SyntaxError("expected an action name", sec.pos);
      }
      ActionSchema a;
      a.name = sec.items[1].symbol;
      if (d.find_action(a.name) != nullptr) {
        throw SemanticError("duplicate action '" + a.name + "'", sec.pos);
      }
      std::vector<Literal> effects;
      for (std::size_t j = 2; j < sec.items.size(); j += 2) {
        if (sec.items[j].kind != Sexpr::Kind::Symbol ||
            j + 1 >= sec.items.size()) {
          throw SyntaxError("expected ':keyword <body>' in action '" +
                                a.name + "'",
                            sec.items[j].pos);
        }
        const std::string& key = sec.items[j].symbol;
        const Sexpr& body = sec.items[j + 1];
        if (key == ":parameters") {
          if (body.kind != Sexpr::Kind::List) {
            throw SyntaxError("':parameters' expects a list", body.pos);
          }
          a.params = detail::parse_typed_list(body.items, 0,
                                              body.items.size(),
                                              /*variables=*/true);
          for (const auto& p : a.params) {
            if (!d.types.declared(p.type)) {
              throw SemanticError("parameter '" + p.name +
                                      "' has undeclared type '" + p.type + "'",
                                  body.pos);
            }
          }
        } else if (key == ":precondition") {
          detail::flatten_condition(body, a.preconditions,
                                    /*allow_negation=*/true);
        } else if (key == ":effect") {
          detail::flatten_condition(body, effects, /*allow_negation=*/true);
        } else {
          throw UnsupportedFeature("action keyword '" + key +
                                       "' is not supported",
                                   sec.items[j].pos);
        }
      }
      for (const auto& e : effects) {
        if (e.negated) {
          a.del_effects.push_back(e.atom);
        } else {
          a.add_effects.push_back(e.atom);
        }
      }
      detail::sort_unique(a.preconditions);
      detail::sort_unique(a.add_effects);
      detail::sort_unique(a.del_effects);
      for (const auto& add : a.add_effects) {
        if (std::binary_search(a.del_effects.begin(), a.del_effects.end(),
                               add)) {
          throw SemanticError("action '" + a.name + "' both adds and deletes "
                                  + add.predicate,
                              sec.pos);
        }
      }
      for (const auto& lit : a.preconditions) {
        detail::check_schema_atom(d, a, lit.atom, sec.pos);
      }
      for (const auto& atom : a.add_effects) {
        detail::check_schema_atom(d, a, atom, sec.pos);
      }
      for (const auto& atom : a.del_effects) {
        detail::check_schema_atom(d, a, atom, sec.pos);
      }
      d.actions.push_back(a);
    } else if (h == ":functions" || h == ":derived" || h == ":axiom" ||
               h == ":durative-action") {
      throw UnsupportedFeature("'" + h + "' is outside the supported subset",
                               sec.pos);
    } else {
      throw SyntaxError("unexpected domain section '" + h + "'", sec.pos);
    }
  }
  return d;
}

namespace detail {

inline GroundAtom parse_ground_atom(const Sexpr& s) {
  SchemaAtom a = parse_schema_atom(s);
  for (const auto& arg : a.args) {
    if (!arg.empty() && arg[0] == '?') {
      throw SemanticError("unexpected variable '" + arg + "' in ground atom",
                          s.pos);
    }
  }
  return GroundAtom{a.predicate, a.args};
}

inline void check_ground_atom(const Domain& d, const Problem& p,
                              const GroundAtom& atom, SourcePos pos) {
  const PredicateSchema* pred =
      d.find_predicate(atom.predicate, atom.args.size());
  if (pred == nullptr) {
    throw SemanticError("undeclared predicate '" + atom.predicate +
                            "' with arity " + std::to_string(atom.args.size()),
                        pos);
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const TypedName* obj = p.find_object(atom.args[i]);
    if (obj == nullptr) obj = d.find_constant(atom.args[i]);
    if (obj == nullptr) {
      throw SemanticError("undeclared object '" + atom.args[i] + "' in " +
                              atom.str(),
                          pos);
    }
    if (!d.types.is_subtype(obj->type, pred->params[i].type)) {
      throw SemanticError("object '" + obj->name + "' of type '" + obj->type +
                              "' is not a '" + pred->params[i].type + "' in " +
                              atom.str(),
                          pos);
    }
  }
}

}  // namespace detail

// Parses and type-checks a PDDL problem against `domain`. Goals must be a
// conjunction (possibly singleton) of positive ground atoms.
inline Problem parse_problem(const std::string& text, const Domain& domain,
                             std::vector<Diagnostic>* warnings = nullptr) {
  using detail::Sexpr;
  Sexpr top = detail::read_toplevel(text);
  if (top.head() != "define") {
    throw SyntaxError("expected '(define (problem ...) ...)'", top.pos);
  }
  if (top.items.size() < 2 || top.items[1].head() != "problem" ||
      top.items[1].items.size() != 2 ||
      top.items[1].items[1].kind != Sexpr::Kind::Symbol) {
    throw SyntaxError("expected '(problem <name>)'", top.pos);
  }

  Problem p;
  p.name = top.items[1].items[1].symbol;

  auto warn = [&](const std::string& msg, SourcePos pos) {
    if (warnings != nullptr) {
      warnings->push_back({Diagnostic::Severity::Warning, msg, pos});
    }
  };

  bool saw_goal = false;
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const Sexpr& sec = top.items[i];
    const std::string& h = sec.head();
    if (h == ":domain") {
      if (sec.items.size() != 2 ||
          sec.items[1].kind != Sexpr::Kind::Symbol) {
        throw SyntaxError("expected '(:domain <name>)'", sec.pos);
      }
      p.domain_name = sec.items[1].symbol;
      if (p.domain_name != domain.name) {
        warn("problem names domain '" + p.domain_name +
                 "' but is checked against '" + domain.name + "'",
             sec.pos);
      }
    } else if (h == ":objects") {
      auto objs = detail::parse_typed_list(sec.items, 1, sec.items.size(),
                                           /*variables=*/false);
      for (const auto& o : objs) {
        if (!domain.types.declared(o.type)) {
          throw SemanticError("object '" + o.name + "' has undeclared type '" +
                                  o.type + "'",
                              sec.pos);
        }
        const TypedName* prev = p.find_object(o.name);
        if (prev != nullptr && prev->type != o.type) {
          throw SemanticError("object '" + o.name +
                                  "' declared with conflicting types",
                              sec.pos);
        }
        p.objects.push_back(o);
        std::sort(p.objects.begin(), p.objects.end());
        p.objects.erase(std::unique(p.objects.begin(), p.objects.end()),
                        p.objects.end());
      }
    } else if (h == ":init") {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const std::string& head = sec.items[j].head();
        if (head == "not") {
          throw UnsupportedFeature("negative init facts are not supported",
                                   sec.items[j].pos);
        }
        if (detail::unsupported_head(head)) {
          throw UnsupportedFeature("'" + head +
                                       "' is outside the supported subset",
                                   sec.items[j].pos);
        }
        p.init.insert(detail::parse_ground_atom(sec.items[j]));
      }
    } else if (h == ":goal") {
      if (sec.items.size() != 2) {
        throw SyntaxError("expected '(:goal <conjunction>)'", sec.pos);
      }
      saw_goal = true;
      const Sexpr& body = sec.items[1];
      const std::string& head = body.head();
      if (head == "not" || detail::unsupported_head(head)) {
        throw UnsupportedFeature(
            "goals must be conjunctions of positive ground atoms", body.pos);
      }
      if (head == "and") {
        for (std::size_t j = 1; j < body.items.size(); ++j) {
          const std::string& gh = body.items[j].head();
          if (gh == "not" || gh == "and" || detail::unsupported_head(gh)) {
            throw UnsupportedFeature(
                "goals must be conjunctions of positive ground atoms",
                body.items[j].pos);
          }
          p.goal.insert(detail::parse_ground_atom(body.items[j]));
        }
      } else {
        p.goal.insert(detail::parse_ground_atom(body));
      }
    } else if (h == ":metric" || h == ":constraints") {
      throw UnsupportedFeature("'" + h + "' is outside the supported subset",
                               sec.pos);
    } else {
      throw SyntaxError("unexpected problem section '" + h + "'", sec.pos);
    }
  }

  if (!saw_goal || p.goal.empty()) {
    throw SemanticError("a problem must declare a nonempty goal", top.pos);
  }
  for (const auto& atom : p.init) {
    detail::check_ground_atom(domain, p, atom, top.pos);
  }
  for (const auto& atom : p.goal) {
    detail::check_ground_atom(domain, p, atom, top.pos);
  }
  return p;
}

// Compilation success mirrors parse_problem: ok iff zero error diagnostics.
inline CompilationResult check_compilation(const std::string& problem_text,
                                           const Domain& domain) {
  CompilationResult result;
  std::vector<Diagnostic> warnings;
  try {
    (void)parse_problem(problem_text, domain, &warnings);
    result.diagnostics = warnings;
    result.ok = true;
  } catch (const PddlError& e) {
    result.diagnostics = warnings;
    result.diagnostics.push_back(
        {Diagnostic::Severity::Error, e.raw_message(), e.pos()});
    result.ok = false;
  }
  return result;
}

}  // namespace formabench
