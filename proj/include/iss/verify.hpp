#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iss/model.hpp"
#include "iss/norms.hpp"
#include "iss/product.hpp"

namespace iss {

enum class TemporalOp { Next, Eventually, Globally, Until };

const char* to_string(TemporalOp op);

/// <<coalition, budget>> op target, or <<coalition, budget>> hold U target.
/// Without `start` the query must hold from every initial state.
struct CoalitionQuery {
  AgentSet coalition;
  ResourceVector budget;
  TemporalOp op = TemporalOp::Eventually;
  std::vector<StateId> target;
  std::vector<StateId> hold;  // left operand of Until
  std::optional<StateId> start;
};

/// A node of the budget-annotated game.
struct Config {
  StateId state;
  ResourceVector remaining;

  auto operator<=>(const Config&) const = default;
};

/// Actions of the coalition members, in coalition order.
using CoalitionMove = std::vector<ActionId>;

struct CheckResult {
  bool holds = false;
  /// Positional strategy over the configurations reachable when it is
  /// followed. Present iff holds and the coalition is non-empty.
  std::optional<std::map<Config, CoalitionMove>> witness;
  std::size_t configs_explored = 0;
};

/// Throws BudgetDimensionMismatch, UnknownAgent, UnknownState.
void check_query(const Model& m, const CoalitionQuery& q);

/// Only coalition members pay; opponents act for free. Least fixpoint for
/// X / F / U, greatest for G, over the configurations reachable from
/// (start, budget).
CheckResult check(const Model& m, const CoalitionQuery& q);

struct NormEnforceability {
  ProductModel product;
  CheckResult result;
};

/// G(not VIOLATION) on the model x monitor product.
NormEnforceability check_norm_enforceable(const Model& m, const NormMonitor& mon, const AgentSet& coalition,
                                          const ResourceVector& budget);

struct ComplexityProbe {
  std::size_t configs_explored = 0;
  std::size_t model_size = 0;       // |Q| + transitions
  std::uint64_t budget_lattice = 0;  // prod (b_i + 1)
  std::uint64_t config_bound = 0;    // |Q| * budget_lattice
  double wall_ms = 0.0;
  bool bound_ok = false;
  bool holds = false;
};

ComplexityProbe complexity_probe(const Model& m, const CoalitionQuery& q);

/// Replays a witness against every opponent choice: every reachable
/// configuration must have an affordable move, and the objective must hold
/// on all induced runs. Returns an explanation when it does not.
std::optional<std::string> replay_witness(const Model& m, const CoalitionQuery& q,
                                          const std::map<Config, CoalitionMove>& witness);

}  // namespace iss
