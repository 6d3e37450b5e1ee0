#include "iss/coordination.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace iss {

namespace {

/// Positions of a joint action index in each agent's availability list.
std::vector<std::size_t> decode_joint(const Model& m, StateId q, std::size_t k) {
  std::vector<std::size_t> pos(m.agent_count());
  for (std::size_t a = m.agent_count(); a-- > 0;) {
    const std::size_t size = m.available(q, AgentId(a)).size();
    pos[a] = k % size;
    k /= size;
  }
  return pos;
}

std::size_t encode_joint(const Model& m, StateId q, const std::vector<std::size_t>& pos) {
  std::size_t k = 0;
  for (std::size_t a = 0; a < pos.size(); ++a) k = k * m.available(q, AgentId(a)).size() + pos[a];
  return k;
}

/// Largest per-agent rectangle of joint actions (as positions into d(q, a))
/// containing only `good` joints. Seeds from each good joint, grows greedily
/// in canonical order, keeps the biggest result.
std::vector<std::vector<std::size_t>> best_rectangle(const Model& m, StateId q, const std::vector<bool>& good) {
  const std::size_t n = m.agent_count();
  std::vector<std::size_t> sizes(n);
  for (std::size_t a = 0; a < n; ++a) sizes[a] = m.available(q, AgentId(a)).size();

  auto all_good = [&](const std::vector<std::vector<std::size_t>>& rect) {
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      std::vector<std::size_t> pos(n);
      for (std::size_t a = 0; a < n; ++a) pos[a] = rect[a][idx[a]];
      if (!good[encode_joint(m, q, pos)]) return false;
      std::size_t a = n;
      for (;;) {
        if (a == 0) return true;
        --a;
        if (++idx[a] < rect[a].size()) break;
        idx[a] = 0;
      }
    }
  };

  std::vector<std::vector<std::size_t>> best;
  std::size_t best_size = 0;
  std::size_t seeds = 0;
  constexpr std::size_t kMaxSeeds = 64;
  for (std::size_t k = 0; k < good.size() && seeds < kMaxSeeds; ++k) {
    if (!good[k]) continue;
    ++seeds;
    auto seed = decode_joint(m, q, k);
    std::vector<std::vector<std::size_t>> rect(n);
    for (std::size_t a = 0; a < n; ++a) rect[a] = {seed[a]};
    for (bool grew = true; grew;) {
      grew = false;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t p = 0; p < sizes[a]; ++p) {
          if (std::find(rect[a].begin(), rect[a].end(), p) != rect[a].end()) continue;
          auto trial = rect;
          trial[a].push_back(p);
          if (all_good(trial)) {
            rect = std::move(trial);
            grew = true;
          }
        }
      }
    }
    std::size_t size = 1;
    for (auto& r : rect) {
      std::sort(r.begin(), r.end());
      size *= r.size();
    }
    if (size > best_size) {
      best_size = size;
      best = std::move(rect);
    }
  }
  return best;
}

AgentSet all_agents(const Model& m) {
  AgentSet out;
  for (std::size_t a = 0; a < m.agent_count(); ++a) out.emplace_back(a);
  return out;
}

/// Agents that pay for the step (ms, q, k) entering VIOLATION.
AgentSet charged_agents(const CompiledMonitor& cm, MonitorStateId ms, StateId q, std::size_t k,
                        SanctionAttribution mode) {
  if (mode == SanctionAttribution::Collective) return all_agents(cm.model());
  auto r = cm.rule(ms, q, k);
  AgentSet constrained;
  if (r) constrained = cm.monitor().rules()[*r].action.constrained_agents();
  return constrained.empty() ? all_agents(cm.model()) : constrained;
}

/// Every lasso of length <= bound from every initial state of `m`.
template <class F>
void for_each_initial_lasso(const Model& m, std::size_t bound, F&& f) {
  for (auto q0 : m.initial_states())
    for_each_lasso(m, q0, bound, [&](const Lasso& l) {
      f(l);
      return true;
    });
}

}  // namespace

Regimentation regiment(const Model& m, const NormMonitor& mon, const RegimentOptions& opts) {
  CompiledMonitor cm(m, mon);
  const ProductGraph g = explore_product(cm, ViolationMode::Absorb, false);
  const std::size_t count = g.nodes.size();

  // Attractor of VIOLATION: nodes all of whose joint actions lose.
  std::vector<bool> losing(count, false);
  std::vector<std::size_t> live(count, 0);
  std::vector<std::vector<std::uint32_t>> preds(count);
  std::deque<std::uint32_t> work;
  for (std::uint32_t i = 0; i < count; ++i) {
    live[i] = g.succ[i].size();
    for (auto s : g.succ[i]) preds[s].push_back(i);
    if (mon.is_violation(g.nodes[i].monitor)) {
      losing[i] = true;
      work.push_back(i);
    }
  }
  while (!work.empty()) {
    const auto i = work.front();
    work.pop_front();
    for (auto p : preds[i]) {
      if (losing[p]) continue;
      if (--live[p] == 0) {
        losing[p] = true;
        work.push_back(p);
      }
    }
  }
  for (auto i : g.initial)
    if (losing[i])
      throw Error(ErrorCode::NormUnenforceable,
                  "norm " + mon.name() + " is violated on every behaviour from " + m.state_name(g.nodes[i].state));

  RegimentationReport report;
  std::vector<std::vector<std::vector<ActionId>>> rect_actions(count);
  std::vector<bool> reached(count, false);
  std::vector<std::uint32_t> keep;
  for (auto i : g.initial) {
    if (!reached[i]) {
      reached[i] = true;
      work.push_back(i);
    }
  }
  while (!work.empty()) {
    const auto i = work.front();
    work.pop_front();
    keep.push_back(i);
    const ProductNode node = g.nodes[i];
    const StateId q = node.state;
    std::vector<bool> good(g.succ[i].size());
    for (std::size_t k = 0; k < good.size(); ++k) good[k] = !losing[g.succ[i][k]];
    auto rect = best_rectangle(m, q, good);
    std::vector<bool> kept(good.size(), false);
    rect_actions[i].resize(m.agent_count());
    if (rect.empty()) {
      report.deadlocked_states.push_back(node);
      if (!opts.allow_deadlock) throw Error(ErrorCode::Deadlock, "regimentation leaves no action at " + m.state_name(q));
      std::fill(kept.begin(), kept.end(), true);
      for (std::size_t a = 0; a < m.agent_count(); ++a) {
        auto span = m.available(q, AgentId(a));
        rect_actions[i][a].assign(span.begin(), span.end());
      }
    } else {
      for (std::size_t a = 0; a < m.agent_count(); ++a) {
        auto span = m.available(q, AgentId(a));
        for (auto p : rect[a]) rect_actions[i][a].push_back(span[p]);
      }
      for (std::size_t k = 0; k < good.size(); ++k) {
        auto pos = decode_joint(m, q, k);
        bool inside = true;
        for (std::size_t a = 0; a < pos.size() && inside; ++a)
          inside = std::binary_search(rect[a].begin(), rect[a].end(), pos[a]);
        kept[k] = inside;
      }
    }
    for (std::size_t k = 0; k < kept.size(); ++k) {
      if (!kept[k]) {
        report.pruned.push_back(PrunedStep{node, m.joint_at(q, k), !good[k]});
        if (good[k]) report.lost_compliant_behaviors = true;
        continue;
      }
      const auto s = g.succ[i][k];
      if (!reached[s]) {
        reached[s] = true;
        work.push_back(s);
      }
    }
  }

  ProductShape shape;
  shape.nodes = keep;
  shape.availability = [&](std::uint32_t node, AgentId a) { return rect_actions[node][a.index()]; };
  std::sort(report.pruned.begin(), report.pruned.end(), [](const PrunedStep& a, const PrunedStep& b) {
    return std::tie(a.at, a.action) < std::tie(b.at, b.action);
  });
  return Regimentation{materialize(m, mon, g, shape), std::move(report)};
}

void check_sanction_policy(const Model& m, const SanctionPolicy& p) {
  if (p.value < 1) throw Error(ErrorCode::InvalidPolicy, "sanction value sv must be at least 1");
  if (p.money.index() >= m.resource_count())
    throw Error(ErrorCode::InvalidPolicy, "sanction money resource is not a declared resource");
}

Sanction sanction(const Model& m, const NormMonitor& mon, const SanctionPolicy& p) {
  check_sanction_policy(m, p);
  CompiledMonitor cm(m, mon);
  const ProductGraph g = explore_product(cm, ViolationMode::Forgive, true);

  using Key = std::tuple<std::uint32_t, AgentId, ActionId>;
  std::map<Key, bool> charged;
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    const auto node = g.nodes[i];
    for (std::size_t k = 0; k < g.succ[i].size(); ++k) {
      if (!g.violating[i][k]) continue;
      const JointAction sigma = m.joint_at(node.state, k);
      for (auto a : charged_agents(cm, node.monitor, node.state, k, p.attribution))
        charged.emplace(Key{i, a, sigma[a]}, true);
    }
  }
  for (auto& [key, exact] : charged) {
    const auto& [i, a, act] = key;
    const auto node = g.nodes[i];
    for (std::size_t k = 0; k < g.succ[i].size() && exact; ++k) {
      if (m.joint_at(node.state, k)[a] != act) continue;
      if (!g.violating[i][k]) {
        exact = false;
        break;
      }
      auto payers = charged_agents(cm, node.monitor, node.state, k, p.attribution);
      exact = std::find(payers.begin(), payers.end(), a) != payers.end();
    }
  }

  ProductShape shape;
  shape.cost = [&](std::uint32_t i, AgentId a, ActionId act) -> std::optional<ResourceVector> {
    const ResourceVector* declared = m.declared_cost(g.nodes[i].state, a, act);
    if (!charged.count(Key{i, a, act})) {
      if (declared) return *declared;
      return std::nullopt;
    }
    ResourceVector base = declared ? *declared : ResourceVector::zero(m.resource_count());
    return base.with_added(p.money.index(), p.value);
  };
  Sanction out{materialize(m, mon, g, shape), {}};
  for (const auto& [key, exact] : charged) {
    const auto& [i, a, act] = key;
    out.charged.push_back(ChargedAction{g.nodes[i], a, act, exact});
  }
  std::sort(out.charged.begin(), out.charged.end(), [](const ChargedAction& x, const ChargedAction& y) {
    return std::tie(x.at, x.agent, x.action) < std::tie(y.at, y.agent, y.action);
  });
  return out;
}

void check_reparation_policy(const ReparationPolicy& p) {
  if (p.compensation < 1 || p.sanction < 1)
    throw Error(ErrorCode::InvalidPolicy, "compensation cv and sanction sv must be positive");
  if (p.compensation >= p.sanction)
    throw Error(ErrorCode::InvalidPolicy, "compensation cv=" + std::to_string(p.compensation) +
                                              " must be lower than the sanction value sv=" +
                                              std::to_string(p.sanction));
  if (p.window < 1) throw Error(ErrorCode::InvalidPolicy, "repair window w must be at least 1");
}

void check_reparation_policy(const Model& m, const ReparationPolicy& p) {
  check_reparation_policy(p);
  if (p.repair_action.index() >= m.action_count())
    throw Error(ErrorCode::InvalidPolicy, "repair action is not a declared action");
  if (!p.money || p.money->index() >= m.resource_count())
    throw Error(ErrorCode::InvalidPolicy, "repair policy needs a declared money resource");
  for (std::size_t q = 0; q < m.state_count(); ++q) {
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      if (!m.is_available(StateId(q), AgentId(a), p.repair_action)) continue;
      const auto paid = m.action_cost(StateId(q), AgentId(a), p.repair_action)[p.money->index()];
      if (paid < p.compensation)
        throw Error(ErrorCode::InvalidPolicy, "repair action " + m.action_name(p.repair_action) + " costs " +
                                                  m.agent_name(AgentId(a)) + " " + std::to_string(paid) + " at " +
                                                  m.state_name(StateId(q)) + ", less than cv=" +
                                                  std::to_string(p.compensation));
    }
  }
}

NormMonitor repair_extend(const Model& m, const NormMonitor& mon, const ReparationPolicy& p) {
  check_reparation_policy(p);
  std::vector<MonitorState> states = mon.states();
  const std::size_t original = states.size();

  // One pending chain per (pre-violation state, violation state) pair.
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> chain_head;
  std::vector<std::pair<MonitorStateId, MonitorStateId>> chains;
  for (std::size_t s = 0; s < original; ++s) {
    const MonitorStateId from(s);
    if (mon.is_violation(from)) continue;
    for (const auto& r : mon.rules()) {
      if (!r.applies_in(from) || !r.target || !mon.is_violation(*r.target)) continue;
      auto key = std::make_pair(from.value, r.target->value);
      if (chain_head.count(key)) continue;
      chain_head[key] = static_cast<std::uint32_t>(states.size());
      chains.emplace_back(from, *r.target);
      for (std::size_t i = 1; i <= p.window; ++i)
        states.push_back(MonitorState{states[r.target->index()].name + "_" + states[s].name + "_pending" +
                                          std::to_string(i),
                                      MonitorStatus::PendingRepair});
    }
  }

  std::vector<MonitorRule> rules;
  const std::size_t n = m.agent_count();
  for (const auto& [from, viol] : chains) {
    const auto head = chain_head[{from.value, viol.value}];
    for (std::size_t i = 0; i < p.window; ++i) {
      const std::vector<MonitorStateId> only{MonitorStateId(head + i)};
      for (std::size_t a = 0; a < n; ++a) {
        std::vector<ActionPattern::AgentSlot> slots(n);
        slots[a] = std::vector<ActionId>{p.repair_action};
        rules.push_back(MonitorRule{only, StatePattern{}, ActionPattern{slots}, from});
      }
      const MonitorStateId next = i + 1 < p.window ? MonitorStateId(head + i + 1) : viol;
      rules.push_back(MonitorRule{only, StatePattern{}, ActionPattern{}, next});
    }
  }
  for (const auto& r : mon.rules()) {
    if (!r.target || !mon.is_violation(*r.target)) {
      rules.push_back(r);
      continue;
    }
    for (std::size_t s = 0; s < original; ++s) {
      const MonitorStateId from(s);
      if (mon.is_violation(from) || !r.applies_in(from)) continue;
      MonitorRule copy = r;
      copy.from = std::vector<MonitorStateId>{from};
      copy.target = MonitorStateId(chain_head[{from.value, r.target->value}]);
      rules.push_back(std::move(copy));
    }
  }
  return NormMonitor(mon.name(), std::move(states), mon.initial(), std::move(rules));
}

RegimentationAudit audit_regimentation(const Model& m, const NormMonitor& mon, const Regimentation& r,
                                       std::size_t bound) {
  RegimentationAudit out;
  const ProductModel& p = r.product;
  out.violation_before = exists_violation(m, mon).exists;
  out.violation_after = exists_violation(p.model, lift_monitor(mon, p)).exists;
  out.pruned = r.report.pruned.size();
  out.forced = static_cast<std::size_t>(
      std::count_if(r.report.pruned.begin(), r.report.pruned.end(), [](const PrunedStep& s) { return s.forced; }));
  out.deadlocked = r.report.deadlocked_states.size();
  out.lost_compliant_behaviors = r.report.lost_compliant_behaviors;

  CompiledMonitor cm(m, mon);
  out.census.bound = bound;
  for_each_initial_lasso(m, bound, [&](const Lasso& l) {
    ++out.census.lassos;
    if (!classify_lasso(cm, l).violating()) ++out.census.compliant_before;
    if (lift_lasso(p, l)) ++out.census.compliant_after;
  });
  for_each_initial_lasso(p.model, bound, [&](const Lasso& l) {
    if (classify_lasso(cm, project_lasso(m, p, l)).violating()) ++out.unsound_lassos;
  });
  return out;
}

SanctionAudit audit_sanction(const Model& m, const NormMonitor& mon, const SanctionPolicy& p, const Sanction& s,
                             std::size_t bound) {
  SanctionAudit out;
  const ProductModel& pm = s.product;
  out.violation_before = exists_violation(m, mon).exists;
  out.violation_after = exists_violation(pm.model, lift_monitor(mon, pm)).exists;
  out.sanction_value = p.value;
  out.charged_actions = s.charged.size();
  out.inexact_charges = static_cast<std::size_t>(
      std::count_if(s.charged.begin(), s.charged.end(), [](const ChargedAction& c) { return !c.exact; }));

  CompiledMonitor cm(m, mon);
  const AgentSet everyone = all_agents(m);
  const std::size_t money = p.money.index();
  bool any = false;
  out.census.bound = bound;
  for_each_initial_lasso(m, bound, [&](const Lasso& l) {
    ++out.census.lassos;
    const bool violating = classify_lasso(cm, l).violating();
    if (!violating) ++out.census.compliant_before;
    auto lifted = lift_lasso(pm, l);
    if (!lifted) return;
    if (!violating) {
      ++out.census.compliant_after;
      return;
    }
    // One classification pass: stem plus one turn of the pumped cycle.
    std::int64_t extra = 0;
    std::int64_t expected = 0;
    std::vector<Step> pass = lifted->stem.steps;
    pass.insert(pass.end(), lifted->cycle.begin(), lifted->cycle.end());
    for (const auto& step : pass) {
      const ProductNode node = pm.origin[step.source.index()];
      for (auto a : everyone)
        extra += pm.model.action_cost(step.source, a, step.action[a])[money] -
                 m.action_cost(node.state, a, step.action[a])[money];
      const auto k = *m.joint_index(node.state, step.action);
      if (cm.enters_violation(node.monitor, node.state, k))
        expected += p.value *
                    static_cast<std::int64_t>(charged_agents(cm, node.monitor, node.state, k, p.attribution).size());
    }
    ++out.violating_lassos;
    out.total_extra_money += extra;
    if (!any || extra < out.min_extra_money) out.min_extra_money = extra;
    any = true;
    if (extra != expected) ++out.accounting_mismatches;
  });
  if (out.violating_lassos > 0)
    out.mean_extra_money = static_cast<double>(out.total_extra_money) / static_cast<double>(out.violating_lassos);
  return out;
}

ReparationAudit audit_reparation(const Model& m, const NormMonitor& mon, const NormMonitor& repaired,
                                 const ReparationPolicy& p, std::size_t bound) {
  ReparationAudit out;
  out.violation_before = exists_violation(m, mon).exists;
  out.violation_after = exists_violation(m, repaired).exists;
  out.compensation = p.compensation;
  out.sanction = p.sanction;
  out.window = p.window;
  for (const auto& s : repaired.states())
    if (s.status == MonitorStatus::PendingRepair) ++out.pending_states;

  CompiledMonitor before(m, mon);
  CompiledMonitor after(m, repaired);
  out.census.bound = bound;
  for_each_initial_lasso(m, bound, [&](const Lasso& l) {
    ++out.census.lassos;
    const bool was = classify_lasso(before, l).violating();
    const bool is = classify_lasso(after, l).violating();
    if (!was) ++out.census.compliant_before;
    if (!is) ++out.census.compliant_after;
    if (was && !is) ++out.repaired_lassos;
    if (!was && is) ++out.lost_lassos;
  });
  return out;
}

}  // namespace iss
