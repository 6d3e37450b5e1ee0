#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iss/types.hpp"

namespace iss {

/// One action per agent, in agent-index order.
struct JointAction {
  std::vector<ActionId> choices;

  std::size_t size() const { return choices.size(); }
  ActionId operator[](std::size_t i) const { return choices[i]; }
  ActionId operator[](AgentId a) const { return choices[a.index()]; }

  bool operator==(const JointAction&) const = default;
  auto operator<=>(const JointAction&) const = default;
};

using AgentSet = std::vector<AgentId>;

struct CostKey {
  StateId state;
  AgentId agent;
  ActionId action;

  auto operator<=>(const CostKey&) const = default;
};

/// Unchecked model description. Every reference is an index into the name
/// catalogs; `validate_model` turns it into a `Model` or explains why not.
struct ModelDraft {
  struct Availability {
    StateId state;
    AgentId agent;
    std::vector<ActionId> actions;
  };
  struct Cost {
    StateId state;
    AgentId agent;
    ActionId action;
    ResourceVector amount;
  };
  struct Outcome {
    StateId state;
    JointAction action;
    StateId target;
  };

  std::vector<std::string> agents;
  std::vector<std::string> resources;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<StateId> initial_states;
  std::vector<Availability> availability;
  std::vector<Cost> costs;
  std::vector<Outcome> outcomes;
};

enum class ViolationKind {
  EmptyCatalog,
  DuplicateName,
  UnknownReference,
  NoInitialState,
  DuplicateAvailability,
  EmptyAvailability,
  CostOutsideAvailability,
  CostDimensionMismatch,
  DuplicateCost,
  OutcomeOutsideAvailability,
  ConflictingOutcome,
  MissingOutcome,
  DanglingTarget,
  UndefinedCost,
};

const char* to_string(ViolationKind kind);

enum class Severity { Error, Warning };

/// One violated constraint, with the coordinates that locate it. `entry` is
/// the index of the offending draft entry in its own list, when there is one.
struct Violation {
  ViolationKind kind{};
  Severity severity = Severity::Error;
  std::optional<StateId> state;
  std::optional<AgentId> agent;
  std::optional<ActionId> action;
  std::optional<JointAction> joint;
  std::optional<StateId> target;
  std::optional<std::size_t> entry;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool ok() const { return error_count() == 0; }
};

class Model;
struct ValidationResult;

/// Checks every tuple-level constraint of the game structure. A model is
/// returned iff there are no errors; warnings (undefined costs) never block.
ValidationResult validate_model(const ModelDraft& draft);

/// Resource-bounded concurrent game structure. Immutable once built, so a
/// single instance can be shared between readers.
class Model {
public:
  std::size_t agent_count() const { return agents_.size(); }
  std::size_t resource_count() const { return resources_.size(); }
  std::size_t state_count() const { return states_.size(); }
  std::size_t action_count() const { return actions_.size(); }

  const std::string& agent_name(AgentId a) const { return agents_.at(a.index()); }
  const std::string& resource_name(ResourceId r) const { return resources_.at(r.index()); }
  const std::string& state_name(StateId q) const { return states_.at(q.index()); }
  const std::string& action_name(ActionId a) const { return actions_.at(a.index()); }

  const std::vector<std::string>& agent_names() const { return agents_; }
  const std::vector<std::string>& resource_names() const { return resources_; }
  const std::vector<std::string>& state_names() const { return states_; }
  const std::vector<std::string>& action_names() const { return actions_; }

  std::optional<AgentId> find_agent(std::string_view name) const;
  std::optional<ResourceId> find_resource(std::string_view name) const;
  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;

  const std::vector<StateId>& initial_states() const { return initial_; }
  bool is_initial(StateId q) const;

  /// d(q, a), sorted by action index.
  std::span<const ActionId> available(StateId q, AgentId a) const;
  bool is_available(StateId q, AgentId a, ActionId act) const;

  /// D(q) in canonical order: lexicographic by action index, agent 0 most
  /// significant. Throws UnknownState.
  std::vector<JointAction> joint_actions(StateId q) const;
  std::size_t joint_count(StateId q) const;
  JointAction joint_at(StateId q, std::size_t k) const;
  std::optional<std::size_t> joint_index(StateId q, const JointAction& sigma) const;
  bool is_legal(StateId q, const JointAction& sigma) const { return joint_index(q, sigma).has_value(); }

  /// o(q, sigma). Throws IllegalJointAction when sigma is not in D(q).
  StateId step(StateId q, const JointAction& sigma) const;
  /// o(q, k-th joint action of D(q)).
  StateId successor(StateId q, std::size_t k) const { return outcome_[q.index()][k]; }

  /// c(q, a, act), or the zero vector when undefined. Throws IllegalAction.
  ResourceVector action_cost(StateId q, AgentId a, ActionId act) const;
  /// The declared entry, without defaulting.
  const ResourceVector* declared_cost(StateId q, AgentId a, ActionId act) const;
  const std::map<CostKey, ResourceVector>& declared_costs() const { return costs_; }
  /// Componentwise sum of member costs for one joint action.
  ResourceVector group_cost(StateId q, const JointAction& sigma, std::span<const AgentId> group) const;

  /// Least fixpoint of the initial states under all joint actions.
  std::vector<StateId> reachable_states() const;
  /// Number of (state, joint action) pairs.
  std::size_t transition_count() const;

  ModelDraft to_draft() const;

  /// "(A:send,B:recv)"
  std::string format_joint(const JointAction& sigma) const;

private:
  friend ValidationResult validate_model(const ModelDraft& draft);
  Model() = default;

  void check_state(StateId q) const;
  std::size_t avail_slot(StateId q, AgentId a) const { return q.index() * agents_.size() + a.index(); }

  std::vector<std::string> agents_;
  std::vector<std::string> resources_;
  std::vector<std::string> states_;
  std::vector<std::string> actions_;
  std::vector<StateId> initial_;
  std::vector<bool> initial_mask_;
  std::vector<std::vector<ActionId>> avail_;        // [q * n + a]
  std::vector<std::vector<StateId>> outcome_;       // [q][joint index]
  std::map<CostKey, ResourceVector> costs_;
};

struct ValidationResult {
  std::optional<Model> model;
  ValidationReport report;
};

}  // namespace iss
