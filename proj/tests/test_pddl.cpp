#include <catch2/catch_amalgamated.hpp>

#include "formabench/bench/generator.hpp"
#include "formabench/pddl/parser.hpp"
#include "formabench/pddl/printer.hpp"
#include "support/fixtures.hpp"

using namespace formabench;

TEST_CASE("blocksworld domain parses to the 4-operator schema set",
          "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  CHECK(d.name == "blocksworld");
  REQUIRE(d.actions.size() == 4);
  CHECK(d.find_action("pick-up") != nullptr);
  CHECK(d.find_action("put-down") != nullptr);
  CHECK(d.find_action("stack") != nullptr);
  CHECK(d.find_action("unstack") != nullptr);
  REQUIRE(d.predicates.size() == 5);
  CHECK(d.find_predicate("on", 2) != nullptr);
  CHECK(d.find_predicate("ontable", 1) != nullptr);
  CHECK(d.find_predicate("clear", 1) != nullptr);
  CHECK(d.find_predicate("holding", 1) != nullptr);
  CHECK(d.find_predicate("handempty", 0) != nullptr);
}

TEST_CASE("minimal domain", "[pddl]") {
  Domain d = parse_domain("(define (domain d) (:predicates (p ?x)))");
  CHECK(d.predicates.size() == 1);
  CHECK(d.actions.empty());
  CHECK(d.predicates[0].params[0].type == "object");
}

TEST_CASE("unclosed parenthesis is a syntax error with position", "[pddl]") {
  try {
    parse_domain("(define (domain d) (:action a :parameters (?x");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.pos().line == 1);
    CHECK(std::string(e.what()).find("unclosed") != std::string::npos);
  }
}

TEST_CASE("rejection completeness for out-of-subset constructs", "[pddl]") {
  Domain bw = parse_domain(kBlocksworldDomain);
  // Domain-side constructs.
  const char* domain_snippets[] = {
      "(define (domain d) (:predicates (p ?x)) (:functions (cost)))",
      "(define (domain d) (:predicates (p ?x))"
      " (:action a :parameters (?x) :precondition (forall (?y) (p ?y))"
      " :effect (p ?x)))",
      "(define (domain d) (:predicates (p ?x))"
      " (:action a :parameters (?x) :precondition (exists (?y) (p ?y))"
      " :effect (p ?x)))",
      "(define (domain d) (:predicates (p ?x))"
      " (:action a :parameters (?x) :precondition (p ?x)"
      " :effect (when (p ?x) (p ?x))))",
      "(define (domain d) (:predicates (p ?x))"
      " (:action a :parameters (?x) :precondition (or (p ?x) (p ?x))"
      " :effect (p ?x)))",
      "(define (domain d) (:predicates (p ?x))"
      " (:action a :parameters (?x ?y) :precondition (= ?x ?y)"
      " :effect (p ?x)))",
      "(define (domain d) (:predicates (p ?x))"
      " (:action a :parameters (?x) :precondition (p ?x)"
      " :effect (increase (cost) 1)))",
  };
  for (const char* text : domain_snippets) {
    CHECK_THROWS_AS(parse_domain(text), UnsupportedFeature);
  }
  // Problem-side constructs.
  const char* problem_snippets[] = {
      "(define (problem p) (:domain blocksworld)"
      " (:objects a - block b - block) (:init (ontable a))"
      " (:goal (or (on a b) (on b a))))",
      "(define (problem p) (:domain blocksworld)"
      " (:objects a - block) (:init (ontable a))"
      " (:goal (not (ontable a))))",
      "(define (problem p) (:domain blocksworld)"
      " (:objects a - block) (:init (not (ontable a)))"
      " (:goal (ontable a)))",
      "(define (problem p) (:domain blocksworld)"
      " (:objects a - block) (:init (ontable a)) (:goal (ontable a))"
      " (:metric minimize total-cost))",
  };
  for (const char* text : problem_snippets) {
    CHECK_THROWS_AS(parse_problem(text, bw), UnsupportedFeature);
  }
}

TEST_CASE("sussman fixture has six init atoms", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p = parse_problem(fixtures::kSussmanProblem, d);
  CHECK(p.objects.size() == 3);
  CHECK(p.init.size() == 6);
  CHECK(p.goal.size() == 2);
  CHECK(p.init.count(GroundAtom{"on", {"c", "a"}}) == 1);
}

TEST_CASE("minimal problem", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p = parse_problem(
      "(define (problem p) (:domain blocksworld) (:objects a - block)"
      " (:init (ontable a) (clear a) (handempty)) (:goal (ontable a)))",
      d);
  CHECK(p.objects.size() == 1);
  CHECK(p.init.size() == 3);
  CHECK(p.goal.size() == 1);
}

TEST_CASE("semantic errors in problems", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  // Undeclared object.
  CHECK_THROWS_AS(
      parse_problem("(define (problem p) (:domain blocksworld)"
                    " (:objects a - block) (:init (ontable q))"
                    " (:goal (ontable a)))",
                    d),
      SemanticError);
  // Arity mismatch.
  CHECK_THROWS_AS(
      parse_problem("(define (problem p) (:domain blocksworld)"
                    " (:objects a - block) (:init (on a))"
                    " (:goal (ontable a)))",
                    d),
      SemanticError);
  // Undeclared type.
  CHECK_THROWS_AS(
      parse_problem("(define (problem p) (:domain blocksworld)"
                    " (:objects a - widget) (:init (ontable a))"
                    " (:goal (ontable a)))",
                    d),
      SemanticError);
}

TEST_CASE("domain-name mismatch is a warning, not an error", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  std::vector<Diagnostic> warnings;
  Problem p = parse_problem(
      "(define (problem p) (:domain elsewhere) (:objects a - block)"
      " (:init (ontable a) (clear a) (handempty)) (:goal (ontable a)))",
      d, &warnings);
  CHECK(p.domain_name == "elsewhere");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].severity == Diagnostic::Severity::Warning);

  CompilationResult r = check_compilation(
      "(define (problem p) (:domain elsewhere) (:objects a - block)"
      " (:init (ontable a) (clear a) (handempty)) (:goal (ontable a)))",
      d);
  CHECK(r.ok);
}

TEST_CASE("atoms are case-insensitive and whitespace-normalized", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p1 = parse_problem(
      "(define (problem P) (:domain BLOCKSWORLD)"
      " (:objects A - BLOCK B - block)"
      " (:init (ON A B) (ontable b) (CLEAR a) (HandEmpty))"
      " (:goal (ONTABLE   a)))",
      d);
  Problem p2 = parse_problem(
      "(define (problem p) (:domain blocksworld)"
      " (:objects a - block b - block)"
      " (:init (on a b) (ontable b) (clear a) (handempty))"
      " (:goal (ontable a)))",
      d);
  CHECK(p1 == p2);
}

TEST_CASE("comments are skipped by the lexer", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p = parse_problem(
      "; header comment\n(define (problem p) (:domain blocksworld)\n"
      " (:objects a - block) ; objects\n"
      " (:init (ontable a) (clear a) (handempty))\n (:goal (ontable a)))\n",
      d);
  CHECK(p.init.size() == 3);
}

TEST_CASE("render is deterministic and order-insensitive", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p1 = parse_problem(fixtures::kSussmanProblem, d);
  Problem p2 = parse_problem(
      "(define (problem sussman) (:domain blocksworld)"
      " (:objects c - block b - block a - block)"
      " (:init (handempty) (clear c) (clear b) (on c a) (ontable b)"
      " (ontable a))"
      " (:goal (and (on b c) (on a b))))",
      d);
  CHECK(render_problem(p1) == render_problem(p2));
  CHECK(render_problem(p1) == render_problem(p1));
}

TEST_CASE("round-trip identity on the sussman fixture", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p = parse_problem(fixtures::kSussmanProblem, d);
  Problem again = parse_problem(render_problem(p), d);
  CHECK(again == p);
}

TEST_CASE("round-trip identity over generated problems", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  for (int n = 2; n <= 5; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      GeneratorConfig config;
      config.num_blocks = n;
      config.rng_seed = seed;
      TaskInstance task = generate_blocksworld(config);
      Problem p = parse_problem(task.gt_problem_text, d);
      CHECK(parse_problem(render_problem(p), d) == p);
    }
  }
}

TEST_CASE("empty goal cannot be rendered", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  Problem p = parse_problem(fixtures::kSussmanProblem, d);
  p.goal.clear();
  CHECK_THROWS_AS(render_problem(p), SemanticError);
}

TEST_CASE("check_compilation encodes failures in the result", "[pddl]") {
  Domain d = parse_domain(kBlocksworldDomain);
  // Closure under round-trip.
  Problem p = parse_problem(fixtures::kSussmanProblem, d);
  CHECK(check_compilation(render_problem(p), d).ok);
  // Undeclared object "d" in init.
  CompilationResult r = check_compilation(
      "(define (problem p) (:domain blocksworld)"
      " (:objects a - block) (:init (ontable d)) (:goal (ontable a)))",
      d);
  CHECK_FALSE(r.ok);
  REQUIRE_FALSE(r.diagnostics.empty());
  CHECK(r.diagnostics.back().severity == Diagnostic::Severity::Error);
  CHECK(r.diagnostics.back().message.find("'d'") != std::string::npos);
}

TEST_CASE("unknown requirement tags warn", "[pddl]") {
  std::vector<Diagnostic> warnings;
  Domain d = parse_domain(
      "(define (domain d) (:requirements :strips :adl)"
      " (:predicates (p ?x)))",
      &warnings);
  CHECK(d.requirements.size() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].message.find(":adl") != std::string::npos);
}

TEST_CASE("add and delete effects must be disjoint", "[pddl]") {
  CHECK_THROWS_AS(
      parse_domain("(define (domain d) (:predicates (p ?x))"
                   " (:action a :parameters (?x) :precondition (p ?x)"
                   " :effect (and (p ?x) (not (p ?x)))))"),
      SemanticError);
}

TEST_CASE("action body variables must be declared parameters", "[pddl]") {
  CHECK_THROWS_AS(
      parse_domain("(define (domain d) (:predicates (p ?x))"
                   " (:action a :parameters (?x) :precondition (p ?y)"
                   " :effect (p ?x)))"),
      SemanticError);
}

TEST_CASE("type hierarchy cycles are rejected", "[pddl]") {
  CHECK_THROWS_AS(
      parse_domain("(define (domain d) (:types a - b b - a)"
                   " (:predicates (p ?x - a)))"),
      SemanticError);
}

TEST_CASE("parsing is deterministic", "[pddl]") {
  Domain d1 = parse_domain(kBlocksworldDomain);
  Domain d2 = parse_domain(kBlocksworldDomain);
  CHECK(d1 == d2);
}
