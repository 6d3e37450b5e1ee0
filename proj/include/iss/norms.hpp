#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iss/behavior.hpp"
#include "iss/model.hpp"

namespace iss {

enum class MonitorStatus { Ok, Violation, PendingRepair };

const char* to_string(MonitorStatus s);

struct MonitorState {
  std::string name;
  MonitorStatus status = MonitorStatus::Ok;

  bool operator==(const MonitorState&) const = default;
};

/// Set of model states; empty optional is the `_` wildcard.
struct StatePattern {
  std::optional<std::vector<StateId>> states;

  bool matches(StateId q) const;
  bool operator==(const StatePattern&) const = default;
};

/// Per-agent action sets; empty optional at either level is `_`.
struct ActionPattern {
  using AgentSlot = std::optional<std::vector<ActionId>>;
  std::optional<std::vector<AgentSlot>> agents;

  bool matches(const JointAction& sigma) const;
  /// Agents whose slot is not a wildcard.
  AgentSet constrained_agents() const;
  bool operator==(const ActionPattern&) const = default;
};

/// `[from S] on <state> / <action> -> <target>`. Without `from` the rule
/// applies in every non-violation monitor state. An empty target means stay.
struct MonitorRule {
  std::optional<std::vector<MonitorStateId>> from;
  StatePattern state;
  ActionPattern action;
  std::optional<MonitorStateId> target;

  bool applies_in(MonitorStateId m) const;
  bool operator==(const MonitorRule&) const = default;
};

/// Deterministic safety monitor over steps (source state, joint action).
/// Rules are tried in order and the first match wins; VIOLATION states are
/// absorbing regardless of the rules.
class NormMonitor {
public:
  NormMonitor(std::string name, std::vector<MonitorState> states, MonitorStateId initial,
              std::vector<MonitorRule> rules);

  const std::string& name() const { return name_; }
  const std::vector<MonitorState>& states() const { return states_; }
  const std::vector<MonitorRule>& rules() const { return rules_; }
  MonitorStateId initial() const { return initial_; }
  std::size_t size() const { return states_.size(); }
  MonitorStatus status(MonitorStateId m) const { return states_.at(m.index()).status; }
  bool is_violation(MonitorStateId m) const { return status(m) == MonitorStatus::Violation; }
  std::optional<MonitorStateId> find_state(const std::string& name) const;

  /// Index of the first rule matching the step, if any.
  std::optional<std::size_t> match(MonitorStateId m, StateId q, const JointAction& sigma) const;
  /// Throws AlphabetMismatch when no rule matches.
  MonitorStateId next(MonitorStateId m, StateId q, const JointAction& sigma) const;

  bool operator==(const NormMonitor&) const = default;

private:
  std::string name_;
  std::vector<MonitorState> states_;
  MonitorStateId initial_;
  std::vector<MonitorRule> rules_;
};

/// Transition table of a monitor specialised to one model: for every
/// non-violation monitor state, model state and joint-action index, the
/// successor monitor state and the rule that produced it.
class CompiledMonitor {
public:
  /// Throws AlphabetMismatch when the monitor names states or actions the
  /// model lacks, has the wrong arity, or leaves some step without a rule.
  CompiledMonitor(const Model& m, const NormMonitor& mon);

  const NormMonitor& monitor() const { return mon_; }
  const Model& model() const { return model_; }

  MonitorStateId next(MonitorStateId ms, StateId q, std::size_t joint) const;
  /// Rule that fired; empty for absorbing violation states.
  std::optional<std::size_t> rule(MonitorStateId ms, StateId q, std::size_t joint) const;
  bool enters_violation(MonitorStateId ms, StateId q, std::size_t joint) const;

private:
  struct Cell {
    std::uint32_t target;
    std::uint32_t rule;
  };
  const Cell& cell(MonitorStateId ms, StateId q, std::size_t joint) const;

  const Model& model_;
  const NormMonitor& mon_;
  std::vector<std::vector<Cell>> table_;  // [ms * |Q| + q][joint]
};

enum class Compliance { Compliant, Violating };

const char* to_string(Compliance c);

/// Where the monitor first entered VIOLATION: the step index of the infinite
/// unrolling, and the same position split into stem / cycle coordinates.
/// A monitor that starts in VIOLATION reports step 0.
struct ViolationPosition {
  std::size_t step = 0;
  bool in_cycle = false;
  std::size_t iteration = 0;
  std::size_t offset = 0;

  bool operator==(const ViolationPosition&) const = default;
};

struct Verdict {
  Compliance outcome = Compliance::Compliant;
  std::optional<ViolationPosition> position;

  bool violating() const { return outcome == Compliance::Violating; }
};

Verdict classify_lasso(const Model& m, const NormMonitor& mon, const Lasso& l);
Verdict classify_lasso(const CompiledMonitor& cm, const Lasso& l);

/// Monitor state after reading a finite trace from the initial state.
MonitorStateId run_monitor(const CompiledMonitor& cm, const Trace& t);

/// Violation as soon as the run is in one of `bad_states`.
NormMonitor state_norm(const Model& m, const std::vector<StateId>& bad_states, std::string name = "state_norm");

struct BannedTriple {
  StateId state;
  AgentId agent;
  ActionId action;

  auto operator<=>(const BannedTriple&) const = default;
};

/// Violation as soon as some agent performs a banned action at the given state.
NormMonitor action_norm(const Model& m, const std::vector<BannedTriple>& bad, std::string name = "action_norm");

struct ExistsViolation {
  bool exists = false;
  std::optional<Lasso> witness;
};

/// Reachability of VIOLATION in model x monitor from any initial state. The
/// witness has a shortest stem up to the violating step, closed by following
/// the first joint action until a state repeats.
ExistsViolation exists_violation(const Model& m, const NormMonitor& mon);

}  // namespace iss
