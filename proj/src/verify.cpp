#include "iss/verify.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <set>

namespace iss {

const char* to_string(TemporalOp op) {
  switch (op) {
    case TemporalOp::Next: return "X";
    case TemporalOp::Eventually: return "F";
    case TemporalOp::Globally: return "G";
    case TemporalOp::Until: return "U";
  }
  return "?";
}

void check_query(const Model& m, const CoalitionQuery& q) {
  if (q.budget.size() != m.resource_count())
    throw Error(ErrorCode::BudgetDimensionMismatch, "budget " + q.budget.str() + " has " +
                                                        std::to_string(q.budget.size()) + " entries, the model has " +
                                                        std::to_string(m.resource_count()) + " resources");
  std::set<AgentId> seen;
  for (auto a : q.coalition) {
    if (a.index() >= m.agent_count()) throw Error(ErrorCode::UnknownAgent, "coalition names an unknown agent");
    if (!seen.insert(a).second)
      throw Error(ErrorCode::InvalidArgument, "agent " + m.agent_name(a) + " appears twice in the coalition");
  }
  for (const auto* set : {&q.target, &q.hold})
    for (auto s : *set)
      if (s.index() >= m.state_count()) throw Error(ErrorCode::UnknownState, "query names an unknown state");
  if (q.start && q.start->index() >= m.state_count())
    throw Error(ErrorCode::UnknownState, "query starts in an unknown state");
}

namespace {

/// A coalition move at one model state: its cost and the successor states
/// over all opponent replies.
struct StateMove {
  CoalitionMove move;
  ResourceVector cost;
  std::vector<StateId> successors;
};

std::vector<StateMove> state_moves(const Model& m, const AgentSet& coalition, StateId q) {
  std::map<CoalitionMove, std::set<StateId>> grouped;
  for (std::size_t k = 0; k < m.joint_count(q); ++k) {
    const JointAction sigma = m.joint_at(q, k);
    CoalitionMove move;
    for (auto a : coalition) move.push_back(sigma[a]);
    grouped[move].insert(m.successor(q, k));
  }
  std::vector<StateMove> out;
  for (auto& [move, succ] : grouped) {
    ResourceVector cost = ResourceVector::zero(m.resource_count());
    for (std::size_t i = 0; i < coalition.size(); ++i) cost += m.action_cost(q, coalition[i], move[i]);
    out.push_back(StateMove{move, cost, std::vector<StateId>(succ.begin(), succ.end())});
  }
  return out;
}

std::vector<bool> membership(const Model& m, const std::vector<StateId>& states) {
  std::vector<bool> in(m.state_count(), false);
  for (auto s : states) in[s.index()] = true;
  return in;
}

struct Game {
  std::vector<Config> configs;
  std::map<Config, std::uint32_t> index;
  struct Move {
    std::size_t state_move;
    std::vector<std::uint32_t> succ;
  };
  std::vector<std::vector<Move>> moves;  // empty for configs that are not expanded
  std::vector<std::uint32_t> start;
};

}  // namespace

CheckResult check(const Model& m, const CoalitionQuery& q) {
  check_query(m, q);
  const auto goal = membership(m, q.target);
  const auto hold = membership(m, q.hold);
  std::vector<std::vector<StateMove>> per_state(m.state_count());
  std::vector<bool> have_moves(m.state_count(), false);
  auto moves_at = [&](StateId s) -> const std::vector<StateMove>& {
    if (!have_moves[s.index()]) {
      per_state[s.index()] = state_moves(m, q.coalition, s);
      have_moves[s.index()] = true;
    }
    return per_state[s.index()];
  };

  // Configurations that need a move: the rest are decided by their state.
  auto expand = [&](const Config& c, bool at_start) {
    switch (q.op) {
      case TemporalOp::Next: return at_start;
      case TemporalOp::Eventually: return !goal[c.state.index()];
      case TemporalOp::Until: return !goal[c.state.index()] && hold[c.state.index()];
      case TemporalOp::Globally: return bool(goal[c.state.index()]);
    }
    return false;
  };

  Game g;
  std::deque<std::uint32_t> work;
  auto intern = [&](const Config& c) {
    auto [it, fresh] = g.index.emplace(c, static_cast<std::uint32_t>(g.configs.size()));
    if (fresh) {
      g.configs.push_back(c);
      g.moves.emplace_back();
      work.push_back(it->second);
    }
    return it->second;
  };
  std::vector<StateId> starts;
  if (q.start) starts.push_back(*q.start);
  else starts = m.initial_states();
  for (auto s : starts) g.start.push_back(intern(Config{s, q.budget}));
  std::set<std::uint32_t> start_set(g.start.begin(), g.start.end());
  std::vector<bool> expanded;
  while (!work.empty()) {
    const auto id = work.front();
    work.pop_front();
    expanded.resize(g.configs.size(), false);
    const Config c = g.configs[id];
    if (!expand(c, start_set.count(id) > 0)) continue;
    expanded[id] = true;
    const auto& sm = moves_at(c.state);
    std::vector<Game::Move> list;
    for (std::size_t i = 0; i < sm.size(); ++i) {
      if (!sm[i].cost.fits_within(c.remaining)) continue;
      const ResourceVector left = c.remaining.minus(sm[i].cost);
      Game::Move mv{i, {}};
      for (auto s : sm[i].successors) {
        if (q.op == TemporalOp::Next) {
          // Successors of a Next step are judged by their state only.
          auto [it, fresh] = g.index.emplace(Config{s, left}, static_cast<std::uint32_t>(g.configs.size()));
          if (fresh) {
            g.configs.push_back(Config{s, left});
            g.moves.emplace_back();
          }
          mv.succ.push_back(it->second);
        } else {
          mv.succ.push_back(intern(Config{s, left}));
        }
      }
      std::sort(mv.succ.begin(), mv.succ.end());
      mv.succ.erase(std::unique(mv.succ.begin(), mv.succ.end()), mv.succ.end());
      list.push_back(std::move(mv));
    }
    g.moves[id] = std::move(list);
  }
  const std::size_t n = g.configs.size();
  expanded.resize(n, false);

  std::vector<bool> win(n, false);
  std::vector<std::int64_t> choice(n, -1);
  if (q.op == TemporalOp::Next) {
    for (auto s : g.start) {
      for (std::size_t i = 0; i < g.moves[s].size() && !win[s]; ++i) {
        const auto& mv = g.moves[s][i];
        if (std::all_of(mv.succ.begin(), mv.succ.end(),
                        [&](std::uint32_t t) { return goal[g.configs[t].state.index()]; })) {
          win[s] = true;
          choice[s] = static_cast<std::int64_t>(i);
        }
      }
    }
  } else {
    // preds[t] = (config, move) pairs that may lead to t.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> preds(n);
    for (std::uint32_t c = 0; c < n; ++c)
      for (std::uint32_t i = 0; i < g.moves[c].size(); ++i)
        for (auto t : g.moves[c][i].succ) preds[t].push_back({c, i});
    std::deque<std::uint32_t> queue;
    if (q.op == TemporalOp::Globally) {
      std::vector<bool> lose(n, false);
      std::vector<std::size_t> alive(n, 0);
      std::vector<std::vector<bool>> dead(n);
      for (std::uint32_t c = 0; c < n; ++c) {
        alive[c] = g.moves[c].size();
        dead[c].assign(g.moves[c].size(), false);
        if (!expanded[c] || alive[c] == 0) {
          lose[c] = true;
          queue.push_back(c);
        }
      }
      while (!queue.empty()) {
        const auto t = queue.front();
        queue.pop_front();
        for (auto [c, i] : preds[t]) {
          if (lose[c] || dead[c][i]) continue;
          dead[c][i] = true;
          if (--alive[c] == 0) {
            lose[c] = true;
            queue.push_back(c);
          }
        }
      }
      for (std::uint32_t c = 0; c < n; ++c) {
        win[c] = !lose[c];
        if (!win[c]) continue;
        for (std::size_t i = 0; i < dead[c].size(); ++i)
          if (!dead[c][i]) {
            choice[c] = static_cast<std::int64_t>(i);
            break;
          }
      }
    } else {
      std::vector<std::vector<std::size_t>> pending(n);
      for (std::uint32_t c = 0; c < n; ++c) {
        for (const auto& mv : g.moves[c]) pending[c].push_back(mv.succ.size());
        if (goal[g.configs[c].state.index()]) {
          win[c] = true;
          queue.push_back(c);
        }
      }
      while (!queue.empty()) {
        const auto t = queue.front();
        queue.pop_front();
        for (auto [c, i] : preds[t]) {
          if (win[c]) continue;
          if (--pending[c][i] == 0) {
            win[c] = true;
            choice[c] = i;
            queue.push_back(c);
          }
        }
      }
    }
  }

  CheckResult out;
  out.configs_explored = n;
  out.holds = std::all_of(g.start.begin(), g.start.end(), [&](std::uint32_t s) { return bool(win[s]); });
  if (!out.holds || q.coalition.empty()) return out;

  std::map<Config, CoalitionMove> witness;
  std::vector<bool> visited(n, false);
  std::deque<std::uint32_t> walk(g.start.begin(), g.start.end());
  for (auto s : g.start) visited[s] = true;
  while (!walk.empty()) {
    const auto c = walk.front();
    walk.pop_front();
    if (choice[c] < 0) continue;
    const auto& mv = g.moves[c][static_cast<std::size_t>(choice[c])];
    witness[g.configs[c]] = per_state[g.configs[c].state.index()][mv.state_move].move;
    if (q.op == TemporalOp::Next) continue;
    for (auto t : mv.succ)
      if (!visited[t]) {
        visited[t] = true;
        walk.push_back(t);
      }
  }
  out.witness = std::move(witness);
  return out;
}

NormEnforceability check_norm_enforceable(const Model& m, const NormMonitor& mon, const AgentSet& coalition,
                                          const ResourceVector& budget) {
  CompiledMonitor cm(m, mon);
  const ProductGraph g = explore_product(cm, ViolationMode::Absorb, false);
  ProductModel p = materialize(m, mon, g);
  CoalitionQuery q;
  q.coalition = coalition;
  q.budget = budget;
  q.op = TemporalOp::Globally;
  for (std::size_t i = 0; i < p.origin.size(); ++i)
    if (!mon.is_violation(p.origin[i].monitor)) q.target.emplace_back(i);
  auto result = check(p.model, q);
  return NormEnforceability{std::move(p), std::move(result)};
}

ComplexityProbe complexity_probe(const Model& m, const CoalitionQuery& q) {
  ComplexityProbe out;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = check(m, q);
  const auto t1 = std::chrono::steady_clock::now();
  out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.configs_explored = r.configs_explored;
  out.holds = r.holds;
  out.model_size = m.state_count() + m.transition_count();
  out.budget_lattice = q.budget.lattice_size();
  out.config_bound = static_cast<std::uint64_t>(m.state_count()) * out.budget_lattice;
  out.bound_ok = out.configs_explored <= out.config_bound;
  return out;
}

std::optional<std::string> replay_witness(const Model& m, const CoalitionQuery& q,
                                          const std::map<Config, CoalitionMove>& witness) {
  check_query(m, q);
  const auto goal = membership(m, q.target);
  const auto hold = membership(m, q.hold);
  std::vector<StateId> starts;
  if (q.start) starts.push_back(*q.start);
  else starts = m.initial_states();

  auto describe = [&](const Config& c) { return m.state_name(c.state) + " " + c.remaining.str(); };
  // Successor configurations of `c` under the witness move, or an error.
  auto follow = [&](const Config& c, std::vector<Config>& next) -> std::optional<std::string> {
    auto it = witness.find(c);
    if (it == witness.end()) return "no move at " + describe(c);
    const CoalitionMove& move = it->second;
    if (move.size() != q.coalition.size()) return "wrong move arity at " + describe(c);
    ResourceVector cost = ResourceVector::zero(m.resource_count());
    for (std::size_t i = 0; i < move.size(); ++i) {
      if (!m.is_available(c.state, q.coalition[i], move[i])) return "unavailable action at " + describe(c);
      cost += m.action_cost(c.state, q.coalition[i], move[i]);
    }
    if (!cost.fits_within(c.remaining)) return "overspends at " + describe(c);
    const ResourceVector left = c.remaining.minus(cost);
    for (const auto& sigma : m.joint_actions(c.state)) {
      bool consistent = true;
      for (std::size_t i = 0; i < move.size() && consistent; ++i) consistent = sigma[q.coalition[i]] == move[i];
      if (consistent) next.push_back(Config{m.step(c.state, sigma), left});
    }
    return std::nullopt;
  };

  if (q.op == TemporalOp::Next) {
    for (auto s : starts) {
      std::vector<Config> next;
      if (auto e = follow(Config{s, q.budget}, next)) return e;
      for (const auto& c : next)
        if (!goal[c.state.index()]) return "opponents reach " + m.state_name(c.state) + " outside the target";
    }
    return std::nullopt;
  }

  // Explore the induced graph; for reachability goals also reject cycles
  // that avoid the target.
  enum class Mark { New, Active, Done };
  std::map<Config, Mark> mark;
  std::optional<std::string> failure;
  std::function<void(const Config&)> dfs = [&](const Config& c) {
    if (failure) return;
    const bool at_goal = goal[c.state.index()];
    if (q.op != TemporalOp::Globally && at_goal) return;
    if (q.op == TemporalOp::Globally && !at_goal) {
      failure = "run leaves the target at " + describe(c);
      return;
    }
    if (q.op == TemporalOp::Until && !hold[c.state.index()]) {
      failure = "run leaves the hold set at " + describe(c);
      return;
    }
    auto& mk = mark[c];
    if (mk == Mark::Done) return;
    if (mk == Mark::Active) {
      if (q.op != TemporalOp::Globally) failure = "run can loop forever without reaching the target at " + describe(c);
      return;
    }
    mk = Mark::Active;
    std::vector<Config> next;
    if (auto e = follow(c, next)) {
      failure = e;
      return;
    }
    for (const auto& t : next) dfs(t);
    mark[c] = Mark::Done;
  };
  for (auto s : starts) dfs(Config{s, q.budget});
  return failure;
}

}  // namespace iss
