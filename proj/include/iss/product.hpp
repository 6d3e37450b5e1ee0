#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "iss/behavior.hpp"
#include "iss/model.hpp"
#include "iss/norms.hpp"

namespace iss {

struct ProductNode {
  StateId state;
  MonitorStateId monitor;

  auto operator<=>(const ProductNode&) const = default;
};

/// How a step into VIOLATION is followed in the product.
enum class ViolationMode {
  Absorb,   // keep the absorbing VIOLATION copies of the model
  Forgive,  // flag the step, but stay in the pre-violation monitor state
};

/// Explicit model x monitor graph.
struct ProductGraph {
  std::vector<ProductNode> nodes;
  std::vector<std::vector<std::uint32_t>> succ;  // [node][joint index]
  std::vector<std::vector<bool>> violating;      // [node][joint index]: step enters VIOLATION
  std::vector<std::uint32_t> initial;
  std::map<ProductNode, std::uint32_t> index;

  std::optional<std::uint32_t> find(ProductNode n) const;
};

/// Nodes reachable from (q0, initial monitor state) for every initial q0.
/// With `cover_all_states`, every model state not reached that way is seeded
/// with the initial monitor state too, so each model state has a copy.
ProductGraph explore_product(const CompiledMonitor& cm, ViolationMode mode, bool cover_all_states);

/// A model whose states are product nodes, with the projection back.
/// When every original state has exactly one copy the original state names
/// are kept (`collapsed`), otherwise states are named `<state>__<monitor>`.
struct ProductModel {
  Model model;
  std::vector<ProductNode> origin;  // per product model state
  MonitorStateId initial_monitor;
  bool collapsed = false;

  std::optional<StateId> find(ProductNode n) const;
};

/// Per-node overrides used when turning a product graph into a model.
struct ProductShape {
  /// Graph nodes to keep, in output order. Empty keeps every node.
  std::vector<std::uint32_t> nodes;
  /// Restricted d for a node and agent; unset keeps the base availability.
  std::function<std::vector<ActionId>(std::uint32_t node, AgentId agent)> availability;
  /// Declared cost for a node, agent and action; unset copies the base entry.
  std::function<std::optional<ResourceVector>(std::uint32_t node, AgentId agent, ActionId action)> cost;
};

/// Builds the product model. Successors of kept nodes must be kept too.
ProductModel materialize(const Model& base, const NormMonitor& mon, const ProductGraph& g,
                         const ProductShape& shape = {});

/// Names for product nodes, following the `ProductModel` convention.
std::vector<std::string> product_state_names(const Model& base, const NormMonitor& mon,
                                             const std::vector<ProductNode>& nodes, bool* collapsed);

/// Rewrites the state patterns of a monitor over the base model so that it
/// reads the product model (pattern q matches every copy of q).
NormMonitor lift_monitor(const NormMonitor& mon, const ProductModel& p);

/// The product run of a base-model lasso, if every step is available in the
/// product model. The cycle is pumped until the product state repeats.
std::optional<Lasso> lift_lasso(const ProductModel& p, const Lasso& base_lasso);

/// Forgets the monitor component of every state.
Lasso project_lasso(const Model& base, const ProductModel& p, const Lasso& product_lasso);

}  // namespace iss
