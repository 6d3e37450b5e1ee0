#include "iss/norms.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace iss {

const char* to_string(MonitorStatus s) {
  switch (s) {
    case MonitorStatus::Ok: return "ok";
    case MonitorStatus::Violation: return "violation";
    case MonitorStatus::PendingRepair: return "pending";
  }
  return "?";
}

const char* to_string(Compliance c) { return c == Compliance::Compliant ? "COMPLIANT" : "VIOLATING"; }

bool StatePattern::matches(StateId q) const {
  if (!states) return true;
  return std::find(states->begin(), states->end(), q) != states->end();
}

bool ActionPattern::matches(const JointAction& sigma) const {
  if (!agents) return true;
  if (agents->size() != sigma.size()) return false;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    const auto& slot = (*agents)[i];
    if (slot && std::find(slot->begin(), slot->end(), sigma[i]) == slot->end()) return false;
  }
  return true;
}

AgentSet ActionPattern::constrained_agents() const {
  AgentSet out;
  if (!agents) return out;
  for (std::size_t i = 0; i < agents->size(); ++i)
    if ((*agents)[i]) out.emplace_back(i);
  return out;
}

bool MonitorRule::applies_in(MonitorStateId m) const {
  if (!from) return true;
  return std::find(from->begin(), from->end(), m) != from->end();
}

NormMonitor::NormMonitor(std::string name, std::vector<MonitorState> states, MonitorStateId initial,
                         std::vector<MonitorRule> rules)
    : name_(std::move(name)), states_(std::move(states)), initial_(initial), rules_(std::move(rules)) {
  if (states_.empty()) throw Error(ErrorCode::InvalidArgument, "norm " + name_ + " has no states");
  if (initial_.index() >= states_.size())
    throw Error(ErrorCode::InvalidArgument, "norm " + name_ + " has an out-of-range initial state");
  if (std::none_of(states_.begin(), states_.end(), [](const MonitorState& s) { return s.status == MonitorStatus::Ok; }))
    throw Error(ErrorCode::InvalidArgument, "norm " + name_ + " needs at least one ok state");
  for (const auto& r : rules_) {
    if (r.target && r.target->index() >= states_.size())
      throw Error(ErrorCode::InvalidArgument, "norm " + name_ + " has a rule with an out-of-range target");
    if (r.from)
      for (auto f : *r.from)
        if (f.index() >= states_.size())
          throw Error(ErrorCode::InvalidArgument, "norm " + name_ + " has a rule with an out-of-range source");
  }
}

std::optional<MonitorStateId> NormMonitor::find_state(const std::string& name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i].name == name) return MonitorStateId(i);
  return std::nullopt;
}

std::optional<std::size_t> NormMonitor::match(MonitorStateId m, StateId q, const JointAction& sigma) const {
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    if (r.applies_in(m) && r.state.matches(q) && r.action.matches(sigma)) return i;
  }
  return std::nullopt;
}

MonitorStateId NormMonitor::next(MonitorStateId m, StateId q, const JointAction& sigma) const {
  if (is_violation(m)) return m;
  auto r = match(m, q, sigma);
  if (!r) throw Error(ErrorCode::AlphabetMismatch, "norm " + name_ + " has no rule for this step");
  return rules_[*r].target.value_or(m);
}

namespace {

constexpr std::uint32_t kNoRule = std::numeric_limits<std::uint32_t>::max();

void check_alphabet(const Model& m, const NormMonitor& mon) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::AlphabetMismatch, "norm " + mon.name() + ": " + why);
  };
  for (const auto& r : mon.rules()) {
    if (r.state.states)
      for (auto q : *r.state.states)
        if (q.index() >= m.state_count()) fail("rule names a state the model does not have");
    if (r.action.agents) {
      if (r.action.agents->size() != m.agent_count()) fail("action pattern arity differs from the number of agents");
      for (const auto& slot : *r.action.agents)
        if (slot)
          for (auto a : *slot)
            if (a.index() >= m.action_count()) fail("rule names an action the model does not have");
    }
  }
}

}  // namespace

CompiledMonitor::CompiledMonitor(const Model& m, const NormMonitor& mon) : model_(m), mon_(mon) {
  check_alphabet(m, mon);
  const std::size_t nq = m.state_count();
  table_.resize(mon.size() * nq);
  for (std::size_t ms = 0; ms < mon.size(); ++ms) {
    const MonitorStateId mid(ms);
    for (std::size_t q = 0; q < nq; ++q) {
      const StateId qid(q);
      auto& row = table_[ms * nq + q];
      const std::size_t count = m.joint_count(qid);
      row.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        if (mon.is_violation(mid)) {
          row[k] = Cell{static_cast<std::uint32_t>(ms), kNoRule};
          continue;
        }
        const JointAction sigma = m.joint_at(qid, k);
        auto r = mon.match(mid, qid, sigma);
        if (!r)
          throw Error(ErrorCode::AlphabetMismatch, "norm " + mon.name() + " has no rule for state " +
                                                       mon.states()[ms].name + " on " + m.state_name(qid) + " / " +
                                                       m.format_joint(sigma));
        row[k] = Cell{mon.rules()[*r].target.value_or(mid).value, static_cast<std::uint32_t>(*r)};
      }
    }
  }
}

const CompiledMonitor::Cell& CompiledMonitor::cell(MonitorStateId ms, StateId q, std::size_t joint) const {
  return table_[ms.index() * model_.state_count() + q.index()][joint];
}

MonitorStateId CompiledMonitor::next(MonitorStateId ms, StateId q, std::size_t joint) const {
  return MonitorStateId(cell(ms, q, joint).target);
}

std::optional<std::size_t> CompiledMonitor::rule(MonitorStateId ms, StateId q, std::size_t joint) const {
  const auto r = cell(ms, q, joint).rule;
  if (r == kNoRule) return std::nullopt;
  return r;
}

bool CompiledMonitor::enters_violation(MonitorStateId ms, StateId q, std::size_t joint) const {
  return !mon_.is_violation(ms) && mon_.is_violation(next(ms, q, joint));
}

namespace {

std::size_t joint_of(const Model& m, const Step& s) {
  auto k = m.joint_index(s.source, s.action);
  if (!k) throw Error(ErrorCode::InvalidLasso, "step uses an unavailable joint action");
  return *k;
}

}  // namespace

MonitorStateId run_monitor(const CompiledMonitor& cm, const Trace& t) {
  MonitorStateId cur = cm.monitor().initial();
  for (const auto& s : t.steps) cur = cm.next(cur, s.source, joint_of(cm.model(), s));
  return cur;
}

Verdict classify_lasso(const CompiledMonitor& cm, const Lasso& l) {
  const auto& mon = cm.monitor();
  const auto& m = cm.model();
  auto violated_at = [&](std::size_t step) {
    Verdict v;
    v.outcome = Compliance::Violating;
    ViolationPosition p;
    p.step = step;
    if (step >= l.stem.size()) {
      p.in_cycle = true;
      p.iteration = (step - l.stem.size()) / l.cycle.size();
      p.offset = (step - l.stem.size()) % l.cycle.size();
    }
    v.position = p;
    return v;
  };
  if (l.cycle.empty()) throw Error(ErrorCode::InvalidLasso, "cycle is empty");

  MonitorStateId cur = mon.initial();
  if (mon.is_violation(cur)) return violated_at(0);
  std::size_t pos = 0;
  for (const auto& s : l.stem.steps) {
    cur = cm.next(cur, s.source, joint_of(m, s));
    if (mon.is_violation(cur)) return violated_at(pos);
    ++pos;
  }
  std::vector<std::size_t> cycle_joint;
  cycle_joint.reserve(l.cycle.size());
  for (const auto& s : l.cycle) cycle_joint.push_back(joint_of(m, s));
  // Pump the cycle until the monitor state at the cycle head repeats.
  std::vector<bool> seen_at_head(mon.size(), false);
  while (!seen_at_head[cur.index()]) {
    seen_at_head[cur.index()] = true;
    for (std::size_t j = 0; j < l.cycle.size(); ++j) {
      cur = cm.next(cur, l.cycle[j].source, cycle_joint[j]);
      if (mon.is_violation(cur)) return violated_at(pos);
      ++pos;
    }
  }
  return Verdict{};
}

Verdict classify_lasso(const Model& m, const NormMonitor& mon, const Lasso& l) {
  check_lasso(m, l);
  CompiledMonitor cm(m, mon);
  return classify_lasso(cm, l);
}

NormMonitor state_norm(const Model& m, const std::vector<StateId>& bad_states, std::string name) {
  for (auto q : bad_states)
    if (q.index() >= m.state_count()) throw Error(ErrorCode::UnknownState, "unknown state in state norm");
  std::vector<MonitorState> states{{"ok", MonitorStatus::Ok}, {"bad", MonitorStatus::Violation}};
  std::vector<MonitorRule> rules;
  if (!bad_states.empty()) {
    std::vector<StateId> sorted = bad_states;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    rules.push_back(MonitorRule{std::nullopt, StatePattern{sorted}, ActionPattern{}, MonitorStateId(1)});
  }
  rules.push_back(MonitorRule{std::nullopt, StatePattern{}, ActionPattern{}, std::nullopt});
  return NormMonitor(std::move(name), std::move(states), MonitorStateId(0), std::move(rules));
}

NormMonitor action_norm(const Model& m, const std::vector<BannedTriple>& bad, std::string name) {
  std::vector<BannedTriple> sorted = bad;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<MonitorState> states{{"ok", MonitorStatus::Ok}, {"bad", MonitorStatus::Violation}};
  std::vector<MonitorRule> rules;
  for (const auto& t : sorted) {
    if (!m.is_available(t.state, t.agent, t.action))
      throw Error(ErrorCode::IllegalTriple, "banned action is not available to that agent at that state");
    std::vector<ActionPattern::AgentSlot> slots(m.agent_count());
    slots[t.agent.index()] = std::vector<ActionId>{t.action};
    rules.push_back(MonitorRule{std::nullopt, StatePattern{std::vector<StateId>{t.state}}, ActionPattern{slots},
                                MonitorStateId(1)});
  }
  rules.push_back(MonitorRule{std::nullopt, StatePattern{}, ActionPattern{}, std::nullopt});
  return NormMonitor(std::move(name), std::move(states), MonitorStateId(0), std::move(rules));
}

namespace {

/// Closes a stem ending at `t.end` by repeatedly taking joint action 0.
Lasso close_with_first_actions(const Model& m, Trace stem) {
  std::vector<std::size_t> first_visit(m.state_count(), static_cast<std::size_t>(-1));
  std::vector<Step> run;
  StateId q = stem.end;
  while (first_visit[q.index()] == static_cast<std::size_t>(-1)) {
    first_visit[q.index()] = run.size();
    run.push_back(Step{q, m.joint_at(q, 0)});
    q = m.successor(q, 0);
  }
  const std::size_t loop_at = first_visit[q.index()];
  for (std::size_t i = 0; i < loop_at; ++i) stem = extend_trace(m, stem, run[i].action);
  Lasso l;
  l.stem = std::move(stem);
  l.cycle.assign(run.begin() + static_cast<std::ptrdiff_t>(loop_at), run.end());
  return l;
}

}  // namespace

ExistsViolation exists_violation(const Model& m, const NormMonitor& mon) {
  CompiledMonitor cm(m, mon);
  const std::size_t nq = m.state_count();
  const std::size_t nodes = nq * mon.size();
  struct Parent {
    std::uint32_t node;
    std::uint32_t joint;
  };
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<Parent> parent(nodes, Parent{kNone, kNone});
  std::vector<bool> seen(nodes, false);
  std::deque<std::uint32_t> work;
  auto id = [&](StateId q, MonitorStateId ms) { return static_cast<std::uint32_t>(ms.index() * nq + q.index()); };

  for (auto q0 : m.initial_states()) {
    if (mon.is_violation(mon.initial())) return ExistsViolation{true, close_with_first_actions(m, Trace(q0))};
    const auto n0 = id(q0, mon.initial());
    if (!seen[n0]) {
      seen[n0] = true;
      work.push_back(n0);
    }
  }
  auto rebuild = [&](std::uint32_t node) {
    std::vector<std::pair<StateId, std::size_t>> rev;
    while (parent[node].node != kNone) {
      const auto p = parent[node];
      rev.emplace_back(StateId(p.node % nq), p.joint);
      node = p.node;
    }
    Trace t(StateId(node % nq));
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) t = extend_trace(m, t, m.joint_at(it->first, it->second));
    return t;
  };
  while (!work.empty()) {
    const auto node = work.front();
    work.pop_front();
    const StateId q(node % nq);
    const MonitorStateId ms(node / nq);
    for (std::size_t k = 0; k < m.joint_count(q); ++k) {
      const auto next_ms = cm.next(ms, q, k);
      if (mon.is_violation(next_ms)) {
        Trace stem = extend_trace(m, rebuild(node), m.joint_at(q, k));
        return ExistsViolation{true, close_with_first_actions(m, std::move(stem))};
      }
      const auto succ = id(m.successor(q, k), next_ms);
      if (seen[succ]) continue;
      seen[succ] = true;
      parent[succ] = Parent{node, static_cast<std::uint32_t>(k)};
      work.push_back(succ);
    }
  }
  return ExistsViolation{};
}

}  // namespace iss
