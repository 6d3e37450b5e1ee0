#include "iss/product.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace iss {

std::optional<std::uint32_t> ProductGraph::find(ProductNode n) const {
  auto it = index.find(n);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<StateId> ProductModel::find(ProductNode n) const {
  for (std::size_t i = 0; i < origin.size(); ++i)
    if (origin[i] == n) return StateId(i);
  return std::nullopt;
}

ProductGraph explore_product(const CompiledMonitor& cm, ViolationMode mode, bool cover_all_states) {
  const Model& m = cm.model();
  const NormMonitor& mon = cm.monitor();
  ProductGraph g;
  std::deque<std::uint32_t> work;
  auto intern = [&](ProductNode n) {
    auto [it, fresh] = g.index.emplace(n, static_cast<std::uint32_t>(g.nodes.size()));
    if (fresh) {
      g.nodes.push_back(n);
      work.push_back(it->second);
    }
    return it->second;
  };
  auto drain = [&] {
    while (!work.empty()) {
      const auto id = work.front();
      work.pop_front();
      const ProductNode n = g.nodes[id];
      const std::size_t count = m.joint_count(n.state);
      std::vector<std::uint32_t> succ(count);
      std::vector<bool> viol(count, false);
      for (std::size_t k = 0; k < count; ++k) {
        MonitorStateId next = cm.next(n.monitor, n.state, k);
        if (cm.enters_violation(n.monitor, n.state, k)) {
          viol[k] = true;
          if (mode == ViolationMode::Forgive) next = n.monitor;
        }
        succ[k] = intern(ProductNode{m.successor(n.state, k), next});
      }
      if (g.succ.size() <= id) {
        g.succ.resize(id + 1);
        g.violating.resize(id + 1);
      }
      g.succ[id] = std::move(succ);
      g.violating[id] = std::move(viol);
    }
  };
  for (auto q0 : m.initial_states()) g.initial.push_back(intern(ProductNode{q0, mon.initial()}));
  drain();
  if (cover_all_states) {
    std::vector<bool> covered(m.state_count(), false);
    for (const auto& n : g.nodes) covered[n.state.index()] = true;
    for (std::size_t q = 0; q < m.state_count(); ++q) {
      if (covered[q]) continue;
      intern(ProductNode{StateId(q), mon.initial()});
      drain();
      for (const auto& n : g.nodes) covered[n.state.index()] = true;
    }
  }
  g.succ.resize(g.nodes.size());
  g.violating.resize(g.nodes.size());
  return g;
}

std::vector<std::string> product_state_names(const Model& base, const NormMonitor& mon,
                                             const std::vector<ProductNode>& nodes, bool* collapsed) {
  std::vector<std::size_t> copies(base.state_count(), 0);
  for (const auto& n : nodes) ++copies[n.state.index()];
  const bool keep = std::all_of(copies.begin(), copies.end(), [](std::size_t c) { return c <= 1; });
  if (collapsed) *collapsed = keep;
  std::vector<std::string> names;
  std::set<std::string> taken;
  if (!keep)
    for (const auto& s : base.state_names()) taken.insert(s);
  for (const auto& n : nodes) {
    if (keep) {
      names.push_back(base.state_name(n.state));
      continue;
    }
    std::string name = base.state_name(n.state) + "__" + mon.states()[n.monitor.index()].name;
    std::string candidate = name;
    for (int i = 2; taken.count(candidate); ++i) candidate = name + "_" + std::to_string(i);
    taken.insert(candidate);
    names.push_back(candidate);
  }
  return names;
}

ProductModel materialize(const Model& base, const NormMonitor& mon, const ProductGraph& g, const ProductShape& shape) {
  std::vector<std::uint32_t> keep = shape.nodes;
  if (keep.empty())
    for (std::uint32_t i = 0; i < g.nodes.size(); ++i) keep.push_back(i);
  std::sort(keep.begin(), keep.end(), [&](std::uint32_t a, std::uint32_t b) { return g.nodes[a] < g.nodes[b]; });
  std::vector<std::int64_t> slot(g.nodes.size(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) slot[keep[i]] = static_cast<std::int64_t>(i);

  std::vector<ProductNode> origin;
  for (auto id : keep) origin.push_back(g.nodes[id]);
  bool collapsed = false;
  ModelDraft d;
  d.agents = base.agent_names();
  d.resources = base.resource_names();
  d.actions = base.action_names();
  d.states = product_state_names(base, mon, origin, &collapsed);
  for (auto id : g.initial)
    if (slot[id] >= 0) d.initial_states.emplace_back(static_cast<std::size_t>(slot[id]));

  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto id = keep[i];
    const StateId q = g.nodes[id].state;
    const StateId out(i);
    std::vector<std::vector<ActionId>> acts(base.agent_count());
    for (std::size_t a = 0; a < base.agent_count(); ++a) {
      const AgentId agent(a);
      if (shape.availability) {
        acts[a] = shape.availability(id, agent);
      } else {
        auto span = base.available(q, agent);
        acts[a].assign(span.begin(), span.end());
      }
      d.availability.push_back({out, agent, acts[a]});
      for (auto act : acts[a]) {
        std::optional<ResourceVector> c;
        if (shape.cost) {
          c = shape.cost(id, agent, act);
        } else if (const auto* declared = base.declared_cost(q, agent, act)) {
          c = *declared;
        }
        if (c) d.costs.push_back({out, agent, act, *c});
      }
    }
    // Odometer over the (possibly restricted) joint actions.
    std::vector<std::size_t> pos(base.agent_count(), 0);
    bool empty = std::any_of(acts.begin(), acts.end(), [](const auto& v) { return v.empty(); });
    while (!empty) {
      JointAction sigma;
      for (std::size_t a = 0; a < pos.size(); ++a) sigma.choices.push_back(acts[a][pos[a]]);
      auto k = base.joint_index(q, sigma);
      if (!k) throw Error(ErrorCode::IllegalJointAction, "restricted availability is not a subset of the base");
      const auto target = g.succ[id][*k];
      if (slot[target] < 0) throw Error(ErrorCode::InvalidArgument, "product shape drops a successor of a kept node");
      d.outcomes.push_back({out, std::move(sigma), StateId(static_cast<std::size_t>(slot[target]))});
      std::size_t a = pos.size();
      while (a > 0) {
        --a;
        if (++pos[a] < acts[a].size()) break;
        pos[a] = 0;
        if (a == 0) empty = true;
      }
      if (pos.empty()) empty = true;
    }
  }

  auto r = validate_model(d);
  if (!r.model) {
    std::string why = r.report.issues.empty() ? "" : r.report.issues.front().message;
    throw Error(ErrorCode::ValidationFailed, "product model is not valid: " + why);
  }
  return ProductModel{std::move(*r.model), std::move(origin), mon.initial(), collapsed};
}

NormMonitor lift_monitor(const NormMonitor& mon, const ProductModel& p) {
  std::vector<MonitorRule> rules = mon.rules();
  for (auto& r : rules) {
    if (!r.state.states) continue;
    std::vector<StateId> lifted;
    for (std::size_t i = 0; i < p.origin.size(); ++i)
      if (std::find(r.state.states->begin(), r.state.states->end(), p.origin[i].state) != r.state.states->end())
        lifted.emplace_back(i);
    r.state.states = std::move(lifted);
  }
  return NormMonitor(mon.name(), mon.states(), mon.initial(), std::move(rules));
}

std::optional<Lasso> lift_lasso(const ProductModel& p, const Lasso& base_lasso) {
  const Model& pm = p.model;
  auto start = p.find(ProductNode{base_lasso.stem.start, p.initial_monitor});
  if (!start) return std::nullopt;
  Trace t(*start);
  for (const auto& s : base_lasso.stem.steps) {
    if (!pm.is_legal(t.end, s.action)) return std::nullopt;
    t = extend_trace(pm, t, s.action);
  }
  std::vector<StateId> heads;
  std::vector<Trace> prefixes;
  for (;;) {
    auto seen = std::find(heads.begin(), heads.end(), t.end);
    if (seen != heads.end()) {
      const std::size_t first = static_cast<std::size_t>(seen - heads.begin());
      Lasso out;
      out.stem = prefixes[first];
      out.cycle.assign(t.steps.begin() + static_cast<std::ptrdiff_t>(out.stem.size()), t.steps.end());
      return out;
    }
    heads.push_back(t.end);
    prefixes.push_back(t);
    for (const auto& s : base_lasso.cycle) {
      if (!pm.is_legal(t.end, s.action)) return std::nullopt;
      t = extend_trace(pm, t, s.action);
    }
  }
}

Lasso project_lasso(const Model& base, const ProductModel& p, const Lasso& product_lasso) {
  Lasso out;
  out.stem = Trace(p.origin[product_lasso.stem.start.index()].state);
  for (const auto& s : product_lasso.stem.steps) out.stem = extend_trace(base, out.stem, s.action);
  for (const auto& s : product_lasso.cycle) out.cycle.push_back(Step{p.origin[s.source.index()].state, s.action});
  return out;
}

}  // namespace iss
