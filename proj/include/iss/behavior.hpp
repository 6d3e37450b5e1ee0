#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "iss/model.hpp"

namespace iss {

struct Step {
  StateId source;
  JointAction action;

  bool operator==(const Step&) const = default;
  auto operator<=>(const Step&) const = default;
};

/// Finite run prefix anchored at `start`. `end` is the state reached after
/// the last step and is kept in sync by `extend_trace`.
struct Trace {
  StateId start;
  std::vector<Step> steps;
  StateId end;

  Trace() = default;
  explicit Trace(StateId s) : start(s), end(s) {}

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  /// start, then the state after each step.
  std::vector<StateId> states(const Model& m) const;

  bool operator==(const Trace&) const = default;
};

/// Eventually periodic behaviour: stem, then the cycle repeated forever.
struct Lasso {
  Trace stem;
  std::vector<Step> cycle;

  std::size_t total_length() const { return stem.size() + cycle.size(); }
  /// The step at absolute position `i` of the infinite unrolling.
  const Step& at(std::size_t i) const;
  /// Stem followed by `k` copies of the cycle.
  Trace unroll(const Model& m, std::size_t k) const;

  bool operator==(const Lasso&) const = default;
};

/// Per-agent endowments, indexed by agent.
struct Budget {
  std::vector<ResourceVector> endowment;

  static Budget uniform(const Model& m, const ResourceVector& each);
};

/// Memoryless joint strategy: one action per (agent, state).
using StrategyProfile = std::map<std::pair<AgentId, StateId>, ActionId>;

Trace extend_trace(const Model& m, const Trace& t, const JointAction& sigma);

/// Throws InvalidTrace when a step is not legal or the chain is broken.
void check_trace(const Model& m, const Trace& t);
/// Throws InvalidLasso when the cycle does not close or does not start where
/// the stem ends.
void check_lasso(const Model& m, const Lasso& l);

/// The unique run of a memoryless profile, cut at the first repeated state.
Lasso lasso_from_strategy(const Model& m, const StrategyProfile& profile, StateId start);

ResourceVector cumulative_cost(const Model& m, const Trace& t, const AgentSet& group);

struct Feasibility {
  bool feasible = true;
  std::optional<std::size_t> step;
  std::optional<AgentId> agent;
  std::optional<std::size_t> resource;
};

/// Every prefix must stay within every agent's endowment.
Feasibility feasible_under_budget(const Model& m, const Trace& t, const Budget& b);

/// Visits every lasso from `start` with stem + cycle length at most
/// `max_total_len`, in canonical order: stem length first, then the sequence
/// of joint-action indices lexicographically (a prefix before its
/// extensions). Returning false from `visit` stops the enumeration.
void for_each_lasso(const Model& m, StateId start, std::size_t max_total_len,
                    const std::function<bool(const Lasso&)>& visit);
std::vector<Lasso> enumerate_lassos(const Model& m, StateId start, std::size_t max_total_len);

/// Behaviour dump: one line per step, cycle section after `repeat:`.
std::string format_step(const Model& m, const Step& s);
std::string format_lasso(const Model& m, const Lasso& l);
std::string format_trace(const Model& m, const Trace& t);

}  // namespace iss
