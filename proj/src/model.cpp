#include "iss/model.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <unordered_set>

namespace iss {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyCatalog: return "EmptyCatalog";
    case ViolationKind::DuplicateName: return "DuplicateName";
    case ViolationKind::UnknownReference: return "UnknownReference";
    case ViolationKind::NoInitialState: return "NoInitialState";
    case ViolationKind::DuplicateAvailability: return "DuplicateAvailability";
    case ViolationKind::EmptyAvailability: return "EmptyAvailability";
    case ViolationKind::CostOutsideAvailability: return "CostOutsideAvailability";
    case ViolationKind::CostDimensionMismatch: return "CostDimensionMismatch";
    case ViolationKind::DuplicateCost: return "DuplicateCost";
    case ViolationKind::OutcomeOutsideAvailability: return "OutcomeOutsideAvailability";
    case ViolationKind::ConflictingOutcome: return "ConflictingOutcome";
    case ViolationKind::MissingOutcome: return "MissingOutcome";
    case ViolationKind::DanglingTarget: return "DanglingTarget";
    case ViolationKind::UndefinedCost: return "UndefinedCost";
  }
  return "Unknown";
}

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(),
                                                [](const Violation& v) { return v.severity == Severity::Error; }));
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

namespace {

template <class Id>
std::string name_or_index(const std::vector<std::string>& names, Id id) {
  if (id.index() < names.size()) return names[id.index()];
  return "#" + std::to_string(id.index());
}

std::string joint_text(const ModelDraft& d, const JointAction& sigma) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i) os << ',';
    os << name_or_index(d.agents, AgentId(i)) << ':' << name_or_index(d.actions, sigma[i]);
  }
  os << ')';
  return os.str();
}

class Checker {
public:
  explicit Checker(const ModelDraft& d) : d_(d) {}

  ValidationReport run(Model* out_avail_holder, std::vector<std::vector<ActionId>>& avail,
                       std::map<CostKey, ResourceVector>& costs, std::vector<std::vector<StateId>>& outcome);

private:
  void add(Violation v) { report_.issues.push_back(std::move(v)); }

  bool state_ok(StateId q) const { return q.index() < d_.states.size(); }
  bool agent_ok(AgentId a) const { return a.index() < d_.agents.size(); }
  bool action_ok(ActionId a) const { return a.index() < d_.actions.size(); }

  std::string sname(StateId q) const { return name_or_index(d_.states, q); }
  std::string aname(AgentId a) const { return name_or_index(d_.agents, a); }
  std::string actname(ActionId a) const { return name_or_index(d_.actions, a); }

  void check_catalogs();

  const ModelDraft& d_;
  ValidationReport report_;
};

void Checker::check_catalogs() {
  auto check = [&](const std::vector<std::string>& names, const char* what, bool may_be_empty) {
    if (names.empty() && !may_be_empty) {
      Violation v;
      v.kind = ViolationKind::EmptyCatalog;
      v.message = std::string("no ") + what + " declared";
      add(std::move(v));
    }
    std::set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) {
        Violation v;
        v.kind = ViolationKind::DuplicateName;
        v.message = std::string("duplicate ") + what + " name '" + n + "'";
        add(std::move(v));
      }
    }
  };
  check(d_.agents, "agents", false);
  check(d_.resources, "resources", true);
  check(d_.states, "states", false);
  check(d_.actions, "actions", false);
}

ValidationReport Checker::run(Model*, std::vector<std::vector<ActionId>>& avail,
                              std::map<CostKey, ResourceVector>& costs,
                              std::vector<std::vector<StateId>>& outcome) {
  check_catalogs();
  const std::size_t n = d_.agents.size();
  const std::size_t nq = d_.states.size();

  if (d_.initial_states.empty()) {
    Violation v;
    v.kind = ViolationKind::NoInitialState;
    v.message = "no initial state declared";
    add(std::move(v));
  }
  for (std::size_t i = 0; i < d_.initial_states.size(); ++i) {
    if (!state_ok(d_.initial_states[i])) {
      Violation v;
      v.kind = ViolationKind::UnknownReference;
      v.message = "initial state " + sname(d_.initial_states[i]) + " is not a declared state";
      add(std::move(v));
    }
  }

  // d(q, a)
  avail.assign(nq * n, {});
  std::vector<bool> seen_avail(nq * n, false);
  for (std::size_t e = 0; e < d_.availability.size(); ++e) {
    const auto& entry = d_.availability[e];
    if (!state_ok(entry.state) || !agent_ok(entry.agent)) {
      Violation v;
      v.kind = ViolationKind::UnknownReference;
      v.entry = e;
      v.message = "availability entry refers to unknown state or agent";
      add(std::move(v));
      continue;
    }
    const std::size_t slot = entry.state.index() * n + entry.agent.index();
    if (seen_avail[slot]) {
      Violation v;
      v.kind = ViolationKind::DuplicateAvailability;
      v.state = entry.state;
      v.agent = entry.agent;
      v.entry = e;
      v.message = "availability for " + aname(entry.agent) + " at " + sname(entry.state) + " given twice";
      add(std::move(v));
      continue;
    }
    seen_avail[slot] = true;
    std::vector<ActionId> acts;
    for (auto act : entry.actions) {
      if (!action_ok(act)) {
        Violation v;
        v.kind = ViolationKind::UnknownReference;
        v.state = entry.state;
        v.agent = entry.agent;
        v.entry = e;
        v.message = "availability entry names unknown action " + actname(act);
        add(std::move(v));
        continue;
      }
      acts.push_back(act);
    }
    std::sort(acts.begin(), acts.end());
    acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
    avail[slot] = std::move(acts);
  }
  std::vector<bool> state_avail_ok(nq, true);
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t a = 0; a < n; ++a) {
      if (avail[q * n + a].empty()) {
        state_avail_ok[q] = false;
        Violation v;
        v.kind = ViolationKind::EmptyAvailability;
        v.state = StateId(q);
        v.agent = AgentId(a);
        v.message = "agent " + aname(AgentId(a)) + " has no available action at " + sname(StateId(q));
        add(std::move(v));
      }
    }
  }
  auto is_avail = [&](StateId q, AgentId a, ActionId act) {
    const auto& acts = avail[q.index() * n + a.index()];
    return std::binary_search(acts.begin(), acts.end(), act);
  };

  // c(q, a, act)
  costs.clear();
  for (std::size_t e = 0; e < d_.costs.size(); ++e) {
    const auto& entry = d_.costs[e];
    if (!state_ok(entry.state) || !agent_ok(entry.agent) || !action_ok(entry.action)) {
      Violation v;
      v.kind = ViolationKind::UnknownReference;
      v.entry = e;
      v.message = "cost entry refers to an unknown state, agent or action";
      add(std::move(v));
      continue;
    }
    Violation base;
    base.state = entry.state;
    base.agent = entry.agent;
    base.action = entry.action;
    base.entry = e;
    const std::string where = sname(entry.state) + " " + aname(entry.agent) + " " + actname(entry.action);
    if (entry.amount.size() != d_.resources.size()) {
      Violation v = base;
      v.kind = ViolationKind::CostDimensionMismatch;
      v.message = "cost for " + where + " has " + std::to_string(entry.amount.size()) + " entries, expected " +
                  std::to_string(d_.resources.size());
      add(std::move(v));
      continue;
    }
    if (!is_avail(entry.state, entry.agent, entry.action)) {
      Violation v = base;
      v.kind = ViolationKind::CostOutsideAvailability;
      v.message = "cost declared for " + where + " but the action is not available there";
      add(std::move(v));
      continue;
    }
    CostKey key{entry.state, entry.agent, entry.action};
    if (!costs.emplace(key, entry.amount).second) {
      Violation v = base;
      v.kind = ViolationKind::DuplicateCost;
      v.message = "cost for " + where + " declared twice";
      add(std::move(v));
    }
  }

  // o(q, sigma)
  outcome.assign(nq, {});
  std::vector<std::size_t> radix_total(nq, 0);
  for (std::size_t q = 0; q < nq; ++q) {
    if (!state_avail_ok[q]) continue;
    std::size_t total = 1;
    for (std::size_t a = 0; a < n; ++a) total *= avail[q * n + a].size();
    radix_total[q] = total;
    outcome[q].assign(total, StateId(static_cast<std::uint32_t>(-1)));
  }
  auto index_of = [&](StateId q, const JointAction& sigma) -> std::optional<std::size_t> {
    std::size_t k = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const auto& acts = avail[q.index() * n + a];
      auto it = std::lower_bound(acts.begin(), acts.end(), sigma[a]);
      if (it == acts.end() || *it != sigma[a]) return std::nullopt;
      k = k * acts.size() + static_cast<std::size_t>(it - acts.begin());
    }
    return k;
  };
  for (std::size_t e = 0; e < d_.outcomes.size(); ++e) {
    const auto& entry = d_.outcomes[e];
    bool refs_ok = state_ok(entry.state) && entry.action.size() == n;
    if (refs_ok)
      for (auto act : entry.action.choices) refs_ok = refs_ok && action_ok(act);
    if (!refs_ok) {
      Violation v;
      v.kind = ViolationKind::UnknownReference;
      v.entry = e;
      v.message = "outcome entry refers to an unknown state or action, or has the wrong arity";
      add(std::move(v));
      continue;
    }
    Violation base;
    base.state = entry.state;
    base.joint = entry.action;
    base.target = entry.target;
    base.entry = e;
    if (!state_ok(entry.target)) {
      Violation v = base;
      v.kind = ViolationKind::DanglingTarget;
      v.message = "outcome of " + joint_text(d_, entry.action) + " at " + sname(entry.state) +
                  " targets undeclared state " + sname(entry.target);
      add(std::move(v));
      continue;
    }
    if (!state_avail_ok[entry.state.index()]) continue;
    auto k = index_of(entry.state, entry.action);
    if (!k) {
      Violation v = base;
      v.kind = ViolationKind::OutcomeOutsideAvailability;
      v.message = "outcome given for " + joint_text(d_, entry.action) + " at " + sname(entry.state) +
                  ", which is not a joint action available there";
      add(std::move(v));
      continue;
    }
    auto& slot = outcome[entry.state.index()][*k];
    if (slot.value != static_cast<std::uint32_t>(-1) && slot != entry.target) {
      Violation v = base;
      v.kind = ViolationKind::ConflictingOutcome;
      v.message = "outcome of " + joint_text(d_, entry.action) + " at " + sname(entry.state) +
                  " is both " + sname(slot) + " and " + sname(entry.target);
      add(std::move(v));
      continue;
    }
    slot = entry.target;
  }
  for (std::size_t q = 0; q < nq; ++q) {
    if (!state_avail_ok[q]) continue;
    for (std::size_t k = 0; k < outcome[q].size(); ++k) {
      if (outcome[q][k].value != static_cast<std::uint32_t>(-1)) continue;
      JointAction sigma;
      sigma.choices.resize(n);
      std::size_t rest = k;
      for (std::size_t a = n; a-- > 0;) {
        const auto& acts = avail[q * n + a];
        sigma.choices[a] = acts[rest % acts.size()];
        rest /= acts.size();
      }
      Violation v;
      v.kind = ViolationKind::MissingOutcome;
      v.state = StateId(q);
      v.joint = sigma;
      v.message = "no outcome for " + joint_text(d_, sigma) + " at " + sname(StateId(q));
      add(std::move(v));
    }
  }

  if (!d_.resources.empty()) {
    for (std::size_t q = 0; q < nq; ++q) {
      for (std::size_t a = 0; a < n; ++a) {
        std::vector<std::string> undefined;
        for (auto act : avail[q * n + a])
          if (!costs.count(CostKey{StateId(q), AgentId(a), act})) undefined.push_back(actname(act));
        if (undefined.empty()) continue;
        Violation v;
        v.kind = ViolationKind::UndefinedCost;
        v.severity = Severity::Warning;
        v.state = StateId(q);
        v.agent = AgentId(a);
        std::string list;
        for (std::size_t i = 0; i < undefined.size(); ++i) list += (i ? "," : "") + undefined[i];
        v.message = "no cost for " + aname(AgentId(a)) + " {" + list + "} at " + sname(StateId(q)) +
                    "; defaulting to zero";
        add(std::move(v));
      }
    }
  }
  return std::move(report_);
}

}  // namespace

ValidationResult validate_model(const ModelDraft& draft) {
  ValidationResult result;
  Model m;
  Checker checker(draft);
  result.report = checker.run(&m, m.avail_, m.costs_, m.outcome_);
  if (!result.report.ok()) return result;
  m.agents_ = draft.agents;
  m.resources_ = draft.resources;
  m.states_ = draft.states;
  m.actions_ = draft.actions;
  m.initial_mask_.assign(draft.states.size(), false);
  for (auto q : draft.initial_states) {
    if (!m.initial_mask_[q.index()]) m.initial_.push_back(q);
    m.initial_mask_[q.index()] = true;
  }
  std::sort(m.initial_.begin(), m.initial_.end());
  result.model = std::move(m);
  return result;
}

namespace {

template <class Id>
std::optional<Id> find_name(const std::vector<std::string>& names, std::string_view name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return Id(i);
  return std::nullopt;
}

}  // namespace

std::optional<AgentId> Model::find_agent(std::string_view name) const { return find_name<AgentId>(agents_, name); }
std::optional<ResourceId> Model::find_resource(std::string_view name) const {
  return find_name<ResourceId>(resources_, name);
}
std::optional<StateId> Model::find_state(std::string_view name) const { return find_name<StateId>(states_, name); }
std::optional<ActionId> Model::find_action(std::string_view name) const {
  return find_name<ActionId>(actions_, name);
}

bool Model::is_initial(StateId q) const { return q.index() < initial_mask_.size() && initial_mask_[q.index()]; }

void Model::check_state(StateId q) const {
  if (q.index() >= states_.size())
    throw Error(ErrorCode::UnknownState, "unknown state #" + std::to_string(q.index()));
}

std::span<const ActionId> Model::available(StateId q, AgentId a) const {
  check_state(q);
  if (a.index() >= agents_.size()) throw Error(ErrorCode::UnknownAgent, "unknown agent #" + std::to_string(a.index()));
  return avail_[avail_slot(q, a)];
}

bool Model::is_available(StateId q, AgentId a, ActionId act) const {
  if (q.index() >= states_.size() || a.index() >= agents_.size()) return false;
  const auto& acts = avail_[avail_slot(q, a)];
  return std::binary_search(acts.begin(), acts.end(), act);
}

std::size_t Model::joint_count(StateId q) const {
  check_state(q);
  return outcome_[q.index()].size();
}

JointAction Model::joint_at(StateId q, std::size_t k) const {
  check_state(q);
  JointAction sigma;
  const std::size_t n = agents_.size();
  sigma.choices.resize(n);
  for (std::size_t a = n; a-- > 0;) {
    const auto& acts = avail_[avail_slot(q, AgentId(a))];
    sigma.choices[a] = acts[k % acts.size()];
    k /= acts.size();
  }
  return sigma;
}

std::vector<JointAction> Model::joint_actions(StateId q) const {
  const std::size_t count = joint_count(q);
  std::vector<JointAction> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(joint_at(q, k));
  return out;
}

std::optional<std::size_t> Model::joint_index(StateId q, const JointAction& sigma) const {
  check_state(q);
  if (sigma.size() != agents_.size()) return std::nullopt;
  std::size_t k = 0;
  for (std::size_t a = 0; a < agents_.size(); ++a) {
    const auto& acts = avail_[avail_slot(q, AgentId(a))];
    auto it = std::lower_bound(acts.begin(), acts.end(), sigma[a]);
    if (it == acts.end() || *it != sigma[a]) return std::nullopt;
    k = k * acts.size() + static_cast<std::size_t>(it - acts.begin());
  }
  return k;
}

StateId Model::step(StateId q, const JointAction& sigma) const {
  auto k = joint_index(q, sigma);
  if (!k)
    throw Error(ErrorCode::IllegalJointAction,
                "joint action " + format_joint(sigma) + " is not available at " + state_name(q));
  return outcome_[q.index()][*k];
}

const ResourceVector* Model::declared_cost(StateId q, AgentId a, ActionId act) const {
  auto it = costs_.find(CostKey{q, a, act});
  return it == costs_.end() ? nullptr : &it->second;
}

ResourceVector Model::action_cost(StateId q, AgentId a, ActionId act) const {
  if (!is_available(q, a, act))
    throw Error(ErrorCode::IllegalAction, "action #" + std::to_string(act.index()) + " is not available to agent #" +
                                              std::to_string(a.index()) + " at state #" + std::to_string(q.index()));
  if (const auto* c = declared_cost(q, a, act)) return *c;
  return ResourceVector::zero(resources_.size());
}

ResourceVector Model::group_cost(StateId q, const JointAction& sigma, std::span<const AgentId> group) const {
  ResourceVector total = ResourceVector::zero(resources_.size());
  for (auto a : group) total += action_cost(q, a, sigma[a]);
  return total;
}

std::vector<StateId> Model::reachable_states() const {
  std::vector<bool> seen(states_.size(), false);
  std::deque<StateId> work;
  for (auto q : initial_) {
    seen[q.index()] = true;
    work.push_back(q);
  }
  while (!work.empty()) {
    auto q = work.front();
    work.pop_front();
    for (auto t : outcome_[q.index()]) {
      if (seen[t.index()]) continue;
      seen[t.index()] = true;
      work.push_back(t);
    }
  }
  std::vector<StateId> out;
  for (std::size_t q = 0; q < seen.size(); ++q)
    if (seen[q]) out.emplace_back(q);
  return out;
}

std::size_t Model::transition_count() const {
  std::size_t total = 0;
  for (const auto& row : outcome_) total += row.size();
  return total;
}

ModelDraft Model::to_draft() const {
  ModelDraft d;
  d.agents = agents_;
  d.resources = resources_;
  d.states = states_;
  d.actions = actions_;
  d.initial_states = initial_;
  for (std::size_t q = 0; q < states_.size(); ++q) {
    for (std::size_t a = 0; a < agents_.size(); ++a)
      d.availability.push_back({StateId(q), AgentId(a), avail_[avail_slot(StateId(q), AgentId(a))]});
  }
  for (const auto& [key, amount] : costs_) d.costs.push_back({key.state, key.agent, key.action, amount});
  for (std::size_t q = 0; q < states_.size(); ++q)
    for (std::size_t k = 0; k < outcome_[q].size(); ++k)
      d.outcomes.push_back({StateId(q), joint_at(StateId(q), k), outcome_[q][k]});
  return d;
}

std::string Model::format_joint(const JointAction& sigma) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i) os << ',';
    os << (i < agents_.size() ? agents_[i] : "#" + std::to_string(i)) << ':'
       << (sigma[i].index() < actions_.size() ? actions_[sigma[i].index()] : "#" + std::to_string(sigma[i].index()));
  }
  os << ')';
  return os.str();
}

}  // namespace iss
