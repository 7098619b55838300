#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "formabench/errors.hpp"
#include "formabench/pddl/ast.hpp"

namespace formabench {

struct GroundingConfig {
  // Exclude tuples with repeated object names for multi-arg schemas.
  bool allow_repeated_args = false;
  // Hard cap on enumerated atoms/actions; exceeding it is an error.
  std::size_t max_items = 10000;
};

namespace detail {

// Objects (including domain constants) eligible for a typed slot, sorted.
inline std::vector<std::string> objects_of_type(
    const Domain& d, const std::vector<TypedName>& objects,
    const std::string& type) {
  std::vector<std::string> out;
  for (const auto& o : objects) {
    if (d.types.is_subtype(o.type, type)) out.push_back(o.name);
  }
  for (const auto& c : d.constants) {
    if (d.types.is_subtype(c.type, type)) out.push_back(c.name);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Enumerates argument tuples over per-slot candidate lists in lexicographic
// order, honoring the repeated-argument policy and the hard cap.
inline void enumerate_tuples(
    const std::vector<std::vector<std::string>>& slots, bool allow_repeats,
    std::size_t cap, std::size_t already,
    const std::function<void(const std::vector<std::string>&)>& emit) {
  std::vector<std::string> tuple(slots.size());
  std::size_t count = already;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == slots.size()) {
      if (++count > cap) {
        throw ResourceLimitError("grounding exceeds the cap of " +
                                 std::to_string(cap) + " items");
      }
      emit(tuple);
      return;
    }
    for (const auto& name : slots[i]) {
      if (!allow_repeats) {
        bool repeated = false;
        for (std::size_t j = 0; j < i; ++j) {
          if (tuple[j] == name) {
            repeated = true;
            break;
          }
        }
        if (repeated) continue;
      }
      tuple[i] = name;
      rec(i + 1);
    }
  };
  rec(0);
}

}  // namespace detail

// Every type-compatible instantiation of every predicate, deduplicated, in
// canonical order (predicate name, then argument tuple).
inline std::vector<GroundAtom> enumerate_atoms(
    const Domain& domain, const std::vector<TypedName>& objects,
    const GroundingConfig& config = {}) {
  std::vector<GroundAtom> out;
  std::vector<PredicateSchema> preds = domain.predicates;
  std::sort(preds.begin(), preds.end(),
            [](const PredicateSchema& a, const PredicateSchema& b) {
              return a.name != b.name ? a.name < b.name
                                      : a.params.size() < b.params.size();
            });
  for (const auto& pred : preds) {
    std::vector<std::vector<std::string>> slots;
    for (const auto& param : pred.params) {
      slots.push_back(detail::objects_of_type(domain, objects, param.type));
    }
    detail::enumerate_tuples(
        slots, config.allow_repeated_args, config.max_items, out.size(),
        [&](const std::vector<std::string>& tuple) {
          out.push_back(GroundAtom{pred.name, tuple});
        });
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Every type-compatible instantiation of every action schema, canonical order.
inline std::vector<GroundAction> enumerate_actions(
    const Domain& domain, const std::vector<TypedName>& objects,
    const GroundingConfig& config = {}) {
  std::vector<GroundAction> out;
  std::vector<ActionSchema> actions = domain.actions;
  std::sort(actions.begin(), actions.end(),
            [](const ActionSchema& a, const ActionSchema& b) {
              return a.name < b.name;
            });
  for (const auto& action : actions) {
    std::vector<std::vector<std::string>> slots;
    for (const auto& param : action.params) {
      slots.push_back(detail::objects_of_type(domain, objects, param.type));
    }
    detail::enumerate_tuples(
        slots, config.allow_repeated_args, config.max_items, out.size(),
        [&](const std::vector<std::string>& tuple) {
          out.push_back(GroundAction{action.name, tuple});
        });
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace formabench
