#pragma once

// Random small models and monitors, plus brute-force oracles that avoid the
// library's compiled tables and enumeration code.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "iss/behavior.hpp"
#include "iss/model.hpp"
#include "iss/norms.hpp"
#include "iss/verify.hpp"

namespace iss::testing {

struct RandomLimits {
  std::size_t max_states = 6;
  std::size_t max_agents = 3;
  std::size_t max_actions = 3;
  std::size_t max_resources = 2;
  std::int64_t max_cost = 3;
};

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Model random_model(std::mt19937_64& rng, const RandomLimits& lim = {}) {
  ModelDraft d;
  const std::size_t nq = pick(rng, 1, lim.max_states);
  const std::size_t na = pick(rng, 1, lim.max_agents);
  const std::size_t nact = pick(rng, 1, lim.max_actions);
  const std::size_t nr = pick(rng, 0, lim.max_resources);
  for (std::size_t i = 0; i < nq; ++i) d.states.push_back("q" + std::to_string(i));
  for (std::size_t i = 0; i < na; ++i) d.agents.push_back("a" + std::to_string(i));
  for (std::size_t i = 0; i < nact; ++i) d.actions.push_back("x" + std::to_string(i));
  for (std::size_t i = 0; i < nr; ++i) d.resources.push_back("r" + std::to_string(i));
  d.initial_states.emplace_back(std::size_t{0});
  if (nq > 1 && pick(rng, 0, 3) == 0) d.initial_states.emplace_back(pick(rng, 1, nq - 1));

  std::vector<std::vector<std::vector<ActionId>>> avail(nq, std::vector<std::vector<ActionId>>(na));
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t a = 0; a < na; ++a) {
      std::vector<ActionId> acts;
      for (std::size_t x = 0; x < nact; ++x)
        if (pick(rng, 0, 1)) acts.emplace_back(x);
      if (acts.empty()) acts.emplace_back(pick(rng, 0, nact - 1));
      avail[q][a] = acts;
      d.availability.push_back({StateId(q), AgentId(a), acts});
      for (auto x : acts) {
        if (nr == 0 || pick(rng, 0, 2) == 0) continue;
        std::vector<std::int64_t> c(nr);
        for (auto& v : c) v = static_cast<std::int64_t>(pick(rng, 0, static_cast<std::size_t>(lim.max_cost)));
        d.costs.push_back({StateId(q), AgentId(a), x, ResourceVector(c)});
      }
    }
    std::vector<std::size_t> pos(na, 0);
    for (;;) {
      JointAction sigma;
      for (std::size_t a = 0; a < na; ++a) sigma.choices.push_back(avail[q][a][pos[a]]);
      d.outcomes.push_back({StateId(q), sigma, StateId(pick(rng, 0, nq - 1))});
      std::size_t a = na;
      bool done = false;
      for (;;) {
        if (a == 0) {
          done = true;
          break;
        }
        --a;
        if (++pos[a] < avail[q][a].size()) break;
        pos[a] = 0;
      }
      if (done) break;
    }
  }
  auto r = validate_model(d);
  return std::move(*r.model);
}

/// A monitor with 2-4 states (last one VIOLATION), random state/action
/// guards and a catch-all stay rule.
inline NormMonitor random_monitor(std::mt19937_64& rng, const Model& m) {
  const std::size_t ok_states = pick(rng, 1, 3);
  std::vector<MonitorState> states;
  for (std::size_t i = 0; i < ok_states; ++i) states.push_back({"m" + std::to_string(i), MonitorStatus::Ok});
  states.push_back({"bad", MonitorStatus::Violation});
  std::vector<MonitorRule> rules;
  const std::size_t count = pick(rng, 1, 4);
  for (std::size_t i = 0; i < count; ++i) {
    MonitorRule r;
    if (pick(rng, 0, 1)) r.from = std::vector<MonitorStateId>{MonitorStateId(pick(rng, 0, ok_states - 1))};
    if (pick(rng, 0, 1)) r.state.states = std::vector<StateId>{StateId(pick(rng, 0, m.state_count() - 1))};
    if (pick(rng, 0, 2)) {
      std::vector<ActionPattern::AgentSlot> slots(m.agent_count());
      slots[pick(rng, 0, m.agent_count() - 1)] = std::vector<ActionId>{ActionId(pick(rng, 0, m.action_count() - 1))};
      r.action.agents = slots;
    }
    r.target = MonitorStateId(pick(rng, 0, ok_states));
    rules.push_back(r);
  }
  rules.push_back(MonitorRule{});
  return NormMonitor("random", std::move(states), MonitorStateId(0), std::move(rules));
}

/// First-match rule evaluation straight from the rule list.
inline MonitorStateId oracle_next(const NormMonitor& mon, MonitorStateId cur, StateId q, const JointAction& sigma) {
  if (mon.is_violation(cur)) return cur;
  for (const auto& r : mon.rules()) {
    if (r.from && std::find(r.from->begin(), r.from->end(), cur) == r.from->end()) continue;
    if (r.state.states && std::find(r.state.states->begin(), r.state.states->end(), q) == r.state.states->end())
      continue;
    bool ok = true;
    if (r.action.agents)
      for (std::size_t a = 0; a < sigma.size() && ok; ++a) {
        const auto& slot = (*r.action.agents)[a];
        if (slot) ok = std::find(slot->begin(), slot->end(), sigma.choices[a]) != slot->end();
      }
    if (!ok) continue;
    return r.target.value_or(cur);
  }
  return cur;
}

/// Step index where the unrolled run first enters VIOLATION. Simulates
/// |stem| + |cycle| * (|monitor| + 1) steps, enough for the monitor state at
/// the cycle head to repeat.
inline std::optional<std::size_t> oracle_first_violation(const NormMonitor& mon, const Lasso& l) {
  MonitorStateId cur = mon.initial();
  if (mon.is_violation(cur)) return 0;
  const std::size_t horizon = l.stem.size() + l.cycle.size() * (mon.size() + 1);
  for (std::size_t i = 0; i < horizon; ++i) {
    const Step& s = i < l.stem.size() ? l.stem.steps[i] : l.cycle[(i - l.stem.size()) % l.cycle.size()];
    cur = oracle_next(mon, cur, s.source, s.action);
    if (mon.is_violation(cur)) return i;
  }
  return std::nullopt;
}

/// Whether some finite run from an initial state drives the monitor into
/// VIOLATION, by iterating the reachable (state, monitor) set to a fixpoint.
inline bool oracle_violation_reachable(const Model& m, const NormMonitor& mon) {
  std::set<std::pair<std::size_t, std::size_t>> reach;
  for (auto q0 : m.initial_states()) reach.insert({q0.index(), mon.initial().index()});
  for (bool grew = true; grew;) {
    grew = false;
    auto snapshot = reach;
    for (auto [q, ms] : snapshot) {
      if (mon.is_violation(MonitorStateId(ms))) return true;
      for (const auto& sigma : m.joint_actions(StateId(q))) {
        auto next = oracle_next(mon, MonitorStateId(ms), StateId(q), sigma);
        grew |= reach.insert({m.step(StateId(q), sigma).index(), next.index()}).second;
      }
    }
  }
  for (auto [q, ms] : reach)
    if (mon.is_violation(MonitorStateId(ms))) return true;
  return false;
}

/// Random coalition, budget (each entry <= max_budget), operator and targets.
inline CoalitionQuery random_query(std::mt19937_64& rng, const Model& m, std::int64_t max_budget) {
  CoalitionQuery q;
  for (std::size_t a = 0; a < m.agent_count(); ++a)
    if (pick(rng, 0, 1)) q.coalition.emplace_back(a);
  std::vector<std::int64_t> b(m.resource_count());
  for (auto& v : b) v = static_cast<std::int64_t>(pick(rng, 0, static_cast<std::size_t>(max_budget)));
  q.budget = ResourceVector(b);
  q.op = static_cast<TemporalOp>(pick(rng, 0, 3));
  for (std::size_t s = 0; s < m.state_count(); ++s) {
    if (pick(rng, 0, 2) == 0) q.target.emplace_back(s);
    if (pick(rng, 0, 1)) q.hold.emplace_back(s);
  }
  if (pick(rng, 0, 1)) q.start = StateId(pick(rng, 0, m.state_count() - 1));
  return q;
}

/// Backward induction over the full (state, remaining budget) lattice,
/// iterated |configs| + 1 times; coalition moves enumerated from d directly.
inline bool oracle_check(const Model& m, const CoalitionQuery& q) {
  const std::size_t dims = q.budget.size();
  std::vector<ResourceVector> budgets;
  std::vector<std::int64_t> cur(dims, 0);
  for (;;) {
    budgets.emplace_back(cur);
    std::size_t i = 0;
    while (i < dims && ++cur[i] > q.budget[i]) cur[i++] = 0;
    if (i == dims) break;
  }
  auto in = [](const std::vector<StateId>& set, StateId s) { return std::find(set.begin(), set.end(), s) != set.end(); };
  using Key = std::pair<std::size_t, ResourceVector>;
  std::map<Key, bool> win;
  for (std::size_t s = 0; s < m.state_count(); ++s)
    for (const auto& r : budgets) win[{s, r}] = in(q.target, StateId(s));

  // Every coalition move at s: one action per member from d(s, member).
  auto moves = [&](StateId s) {
    std::vector<std::vector<ActionId>> out{{}};
    for (auto a : q.coalition) {
      std::vector<std::vector<ActionId>> next;
      for (const auto& prefix : out)
        for (auto act : m.available(s, a)) {
          auto v = prefix;
          v.push_back(act);
          next.push_back(v);
        }
      out = next;
    }
    return out;
  };
  auto enforce = [&](StateId s, const ResourceVector& r, const auto& good) {
    for (const auto& mv : moves(s)) {
      ResourceVector cost = ResourceVector::zero(m.resource_count());
      for (std::size_t i = 0; i < mv.size(); ++i) cost += m.action_cost(s, q.coalition[i], mv[i]);
      if (!cost.fits_within(r)) continue;
      const ResourceVector left = r.minus(cost);
      bool all = true;
      for (const auto& sigma : m.joint_actions(s)) {
        bool consistent = true;
        for (std::size_t i = 0; i < mv.size(); ++i) consistent = consistent && sigma[q.coalition[i]] == mv[i];
        if (consistent && !good(m.step(s, sigma), left)) all = false;
      }
      if (all) return true;
    }
    return false;
  };

  std::vector<StateId> starts;
  if (q.start) starts.push_back(*q.start);
  else starts = m.initial_states();
  if (q.op == TemporalOp::Next) {
    for (auto s : starts)
      if (!enforce(s, q.budget, [&](StateId t, const ResourceVector&) { return in(q.target, t); })) return false;
    return true;
  }
  const std::size_t rounds = m.state_count() * budgets.size() + 1;
  for (std::size_t k = 0; k < rounds; ++k) {
    auto prev = win;
    auto good = [&](StateId t, const ResourceVector& r) { return prev.at({t.index(), r}); };
    for (auto& [key, w] : win) {
      const StateId s(key.first);
      switch (q.op) {
        case TemporalOp::Eventually: w = in(q.target, s) || enforce(s, key.second, good); break;
        case TemporalOp::Until: w = in(q.target, s) || (in(q.hold, s) && enforce(s, key.second, good)); break;
        case TemporalOp::Globally: w = in(q.target, s) && enforce(s, key.second, good); break;
        case TemporalOp::Next: break;
      }
    }
  }
  for (auto s : starts)
    if (!win.at({s.index(), q.budget})) return false;
  return true;
}

}  // namespace iss::testing
