#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iss/model.hpp"
#include "iss/norms.hpp"
#include "iss/product.hpp"

namespace iss {

// ---------------------------------------------------------------------------
// Regimentation

struct RegimentOptions {
  /// Keep states whose pruning emptied an agent's choice set (with their
  /// original availability) instead of failing.
  bool allow_deadlock = false;
};

/// A joint action removed from a product state. `forced` is set when the
/// step leads into the region from which violation is unavoidable; the other
/// removals come from expressing the ban as per-agent availability.
struct PrunedStep {
  ProductNode at;
  JointAction action;
  bool forced = false;
};

struct RegimentationReport {
  std::vector<PrunedStep> pruned;
  std::vector<ProductNode> deadlocked_states;
  bool lost_compliant_behaviors = false;
};

struct Regimentation {
  ProductModel product;
  RegimentationReport report;
};

/// Restricts d on the model x monitor product so that VIOLATION becomes
/// unreachable. Only steps into the attractor of VIOLATION are forced out;
/// each state then keeps the largest per-agent rectangle of the remaining
/// joint actions. Throws NormUnenforceable when an initial state is already
/// losing, Deadlock when a reachable state loses an agent's last action.
Regimentation regiment(const Model& m, const NormMonitor& mon, const RegimentOptions& opts = {});

// ---------------------------------------------------------------------------
// Sanctions

enum class SanctionAttribution {
  TriggeringAgent,  // agents constrained by the rule that fired; all agents if none
  Collective,       // every agent pays
};

struct SanctionPolicy {
  ResourceId money;
  std::int64_t value = 0;  // sv
  SanctionAttribution attribution = SanctionAttribution::TriggeringAgent;
};

void check_sanction_policy(const Model& m, const SanctionPolicy& p);

/// (product state, agent, action) whose money cost was raised by sv.
struct ChargedAction {
  ProductNode at;
  AgentId agent;
  ActionId action;
  /// Every joint action at this state containing the action violates and
  /// charges this agent, so the surcharge is paid exactly once per violation.
  bool exact = true;
};

struct Sanction {
  ProductModel product;
  std::vector<ChargedAction> charged;
};

/// Same transition structure (a violating step is forgiven and the monitor
/// stays in its pre-violation state); every action that triggers a violation
/// gets sv added to its money cost at that product state.
Sanction sanction(const Model& m, const NormMonitor& mon, const SanctionPolicy& p);

// ---------------------------------------------------------------------------
// Reparation

struct ReparationPolicy {
  std::int64_t compensation = 0;  // cv
  std::int64_t sanction = 0;      // sv
  std::size_t window = 1;         // w
  ActionId repair_action;
  std::optional<ResourceId> money;
};

/// cv < sv, w >= 1, and both values positive. Throws InvalidPolicy.
void check_reparation_policy(const ReparationPolicy& p);
/// Also checks that the repair action exists and that every available
/// instance of it declares a money cost of at least cv.
void check_reparation_policy(const Model& m, const ReparationPolicy& p);

/// Replaces every entry into VIOLATION by a window of w PENDING_REPAIR
/// states. A step in which any agent performs the repair action returns to
/// the pre-violation state; running out of the window lands in VIOLATION.
NormMonitor repair_extend(const Model& m, const NormMonitor& mon, const ReparationPolicy& p);

// ---------------------------------------------------------------------------
// Audit

/// Lasso census over every lasso of total length <= `bound` from each initial
/// state of the original model.
struct Census {
  std::size_t bound = 0;
  std::size_t lassos = 0;
  std::size_t compliant_before = 0;
  std::size_t compliant_after = 0;
};

struct RegimentationAudit {
  bool violation_before = false;
  bool violation_after = false;
  std::size_t pruned = 0;
  std::size_t forced = 0;
  std::size_t deadlocked = 0;
  bool lost_compliant_behaviors = false;
  /// compliant_after counts original lassos the regimented model still realises.
  Census census;
  /// Lassos of the regimented model that projected to violating behaviour.
  std::size_t unsound_lassos = 0;
};

struct SanctionAudit {
  bool violation_before = false;
  bool violation_after = false;
  std::int64_t sanction_value = 0;
  std::size_t charged_actions = 0;
  std::size_t inexact_charges = 0;
  std::size_t violating_lassos = 0;
  /// Extra money charged to the coalition of all agents over one
  /// classification pass, summed and minimised over violating lassos.
  std::int64_t total_extra_money = 0;
  std::int64_t min_extra_money = 0;
  double mean_extra_money = 0.0;
  /// Lassos whose extra money differs from sv times the charged violations.
  std::size_t accounting_mismatches = 0;
  Census census;
};

struct ReparationAudit {
  bool violation_before = false;
  bool violation_after = false;
  std::int64_t compensation = 0;
  std::int64_t sanction = 0;
  std::size_t window = 0;
  std::size_t repaired_lassos = 0;  // violating before, compliant after
  std::size_t lost_lassos = 0;      // compliant before, violating after
  std::size_t pending_states = 0;
  Census census;
};

RegimentationAudit audit_regimentation(const Model& m, const NormMonitor& mon, const Regimentation& r,
                                       std::size_t bound);
SanctionAudit audit_sanction(const Model& m, const NormMonitor& mon, const SanctionPolicy& p, const Sanction& s,
                             std::size_t bound);
ReparationAudit audit_reparation(const Model& m, const NormMonitor& mon, const NormMonitor& repaired,
                                 const ReparationPolicy& p, std::size_t bound);

}  // namespace iss
