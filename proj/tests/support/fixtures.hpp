#pragma once

#include <string>

namespace fixtures {

// Sussman anomaly: c on a, a and b on the table; goal a on b on c.
inline const char* kSussmanProblem = R"((define (problem sussman)
  (:domain blocksworld)
  (:objects a - block b - block c - block)
  (:init (ontable a) (ontable b) (on c a) (clear b) (clear c) (handempty))
  (:goal (and (on a b) (on b c))))
)";

inline const char* kSussmanOptimalPlan =
    "(unstack c a)\n(put-down c)\n(pick-up b)\n(stack b c)\n(pick-up a)\n"
    "(stack a b)\n";

}  // namespace fixtures
