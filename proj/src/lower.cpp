#include <algorithm>
#include <map>
#include <set>

#include "iss/spec_io.hpp"

namespace iss {

const NormMonitor* Lowered::find_norm(const std::string& name) const {
  for (const auto& n : norms)
    if (n.name() == name) return &n;
  return nullptr;
}

namespace {

using Catalog = std::map<std::string, std::size_t>;

class Lowering {
public:
  Lowering(const Document& d, std::vector<Diagnostic>& diags) : d_(d), diags_(diags) {
    file_span_.file = d.file;
  }

  void error(DiagKind k, std::string msg, const SourceSpan& span, std::string expected = "") {
    diags_.push_back(Diagnostic{Severity::Error, k, std::move(msg), span, std::move(expected)});
  }
  void warning(DiagKind k, std::string msg, const SourceSpan& span) {
    diags_.push_back(Diagnostic{Severity::Warning, k, std::move(msg), span, ""});
  }
  std::size_t errors() const {
    return static_cast<std::size_t>(std::count_if(diags_.begin(), diags_.end(),
                                                  [](const Diagnostic& x) { return x.severity == Severity::Error; }));
  }

  /// Declares names into a catalog, reporting repeats.
  std::vector<std::string> declare(const std::vector<const Ident*>& names, Catalog& into, const char* what) {
    std::vector<std::string> order;
    std::map<std::string, SourceSpan> first;
    for (const auto* n : names) {
      if (into.count(n->value)) {
        const auto& f = first[n->value];
        error(DiagKind::DuplicateDefinition,
              std::string(what) + " '" + n->value + "' is declared twice (first at line " + std::to_string(f.line) +
                  ", column " + std::to_string(f.column) + ")",
              n->span);
        continue;
      }
      into[n->value] = order.size();
      first[n->value] = n->span;
      order.push_back(n->value);
    }
    return order;
  }

  static std::string choices(const Catalog& c) {
    std::vector<std::pair<std::size_t, std::string>> by_index;
    for (const auto& [name, i] : c) by_index.emplace_back(i, name);
    std::sort(by_index.begin(), by_index.end());
    std::string s;
    for (std::size_t i = 0; i < by_index.size() && i < 8; ++i) s += (i ? ", " : "") + by_index[i].second;
    if (by_index.size() > 8) s += ", ...";
    return s.empty() ? "nothing declared" : "one of " + s;
  }

  std::optional<std::size_t> resolve(const Catalog& c, const Ident& n, const char* what) {
    auto it = c.find(n.value);
    if (it != c.end()) return it->second;
    error(DiagKind::UnknownIdentifier, std::string("unknown ") + what + " '" + n.value + "'", n.span, choices(c));
    return std::nullopt;
  }

  std::optional<Lowered> run();

private:
  SourceSpan span_of(const Violation& v) const;
  std::optional<NormMonitor> lower_norm(const Model& m, const NormDecl& n);

  const Document& d_;
  std::vector<Diagnostic>& diags_;
  SourceSpan file_span_;
  Catalog agents_, resources_, states_, actions_;
  std::vector<SourceSpan> avail_spans_, cost_spans_, outcome_spans_;
  std::map<std::size_t, SourceSpan> state_spans_;
};

SourceSpan Lowering::span_of(const Violation& v) const {
  if (v.entry) {
    switch (v.kind) {
      case ViolationKind::DuplicateAvailability:
      case ViolationKind::EmptyAvailability:
        if (*v.entry < avail_spans_.size()) return avail_spans_[*v.entry];
        break;
      case ViolationKind::CostOutsideAvailability:
      case ViolationKind::CostDimensionMismatch:
      case ViolationKind::DuplicateCost:
        if (*v.entry < cost_spans_.size()) return cost_spans_[*v.entry];
        break;
      case ViolationKind::OutcomeOutsideAvailability:
      case ViolationKind::ConflictingOutcome:
      case ViolationKind::DanglingTarget:
        if (*v.entry < outcome_spans_.size()) return outcome_spans_[*v.entry];
        break;
      default: break;
    }
  }
  if (v.state) {
    auto it = state_spans_.find(v.state->index());
    if (it != state_spans_.end()) return it->second;
  }
  return file_span_;
}

std::optional<NormMonitor> Lowering::lower_norm(const Model& m, const NormDecl& n) {
  const std::size_t before = errors();
  Catalog mstates;
  std::vector<MonitorState> states;
  std::optional<MonitorStateId> initial;
  for (const auto& s : n.states) {
    if (s.name.value == "stay") {
      error(DiagKind::InvalidNorm, "'stay' is reserved for rules that keep the monitor state", s.name.span);
      continue;
    }
    if (mstates.count(s.name.value)) {
      error(DiagKind::DuplicateDefinition, "monitor state '" + s.name.value + "' is declared twice in norm " + n.name.value,
            s.name.span);
      continue;
    }
    mstates[s.name.value] = states.size();
    if (s.initial) {
      if (initial)
        error(DiagKind::InvalidNorm, "norm " + n.name.value + " marks more than one initial state", s.loc.span);
      else
        initial = MonitorStateId(states.size());
    }
    states.push_back(MonitorState{s.name.value, s.status});
  }
  if (!initial && errors() == before)
    error(DiagKind::InvalidNorm, "norm " + n.name.value + " has no initial state", n.name.span,
          "one state marked 'init'");
  if (std::none_of(states.begin(), states.end(), [](const MonitorState& s) { return s.status == MonitorStatus::Ok; }))
    error(DiagKind::InvalidNorm, "norm " + n.name.value + " needs at least one ok state", n.name.span);

  std::vector<MonitorRule> rules;
  for (const auto& r : n.rules) {
    MonitorRule out;
    bool ok = true;
    if (r.from && !r.from->wildcard) {
      std::vector<MonitorStateId> from;
      for (const auto& f : r.from->names) {
        auto id = resolve(mstates, f, "monitor state");
        if (id) from.emplace_back(*id);
        else ok = false;
      }
      out.from = std::move(from);
    }
    if (!r.state.wildcard) {
      std::vector<StateId> qs;
      for (const auto& q : r.state.names) {
        auto id = resolve(states_, q, "state");
        if (id) qs.emplace_back(*id);
        else ok = false;
      }
      out.state.states = std::move(qs);
    }
    if (r.action.slots) {
      if (r.action.slots->size() != m.agent_count()) {
        error(DiagKind::InvalidNorm,
              "joint-action pattern has " + std::to_string(r.action.slots->size()) + " slots, the model has " +
                  std::to_string(m.agent_count()) + " agents",
              r.action.loc.span);
        ok = false;
      } else {
        std::vector<ActionPattern::AgentSlot> slots;
        for (const auto& slot : *r.action.slots) {
          if (slot.wildcard) {
            slots.emplace_back(std::nullopt);
            continue;
          }
          std::vector<ActionId> acts;
          for (const auto& a : slot.names) {
            auto id = resolve(actions_, a, "action");
            if (id) acts.emplace_back(*id);
            else ok = false;
          }
          slots.emplace_back(std::move(acts));
        }
        out.action.agents = std::move(slots);
      }
    }
    if (r.target) {
      auto id = resolve(mstates, *r.target, "monitor state");
      if (id) out.target = MonitorStateId(*id);
      else ok = false;
    }
    if (ok) rules.push_back(std::move(out));
  }
  if (errors() != before) return std::nullopt;
  try {
    NormMonitor mon(n.name.value, std::move(states), *initial, std::move(rules));
    CompiledMonitor check(m, mon);
    return mon;
  } catch (const Error& e) {
    error(DiagKind::InvalidNorm, e.what(), n.name.span, "a final catch-all rule such as 'on _ / _ -> stay;'");
    return std::nullopt;
  }
}

std::optional<Lowered> Lowering::run() {
  auto refs = [](const std::vector<Ident>& v) {
    std::vector<const Ident*> out;
    for (const auto& x : v) out.push_back(&x);
    return out;
  };
  std::vector<const Ident*> state_names;
  for (const auto& s : d_.states) state_names.push_back(&s.name);

  ModelDraft draft;
  draft.agents = declare(refs(d_.agents), agents_, "agent");
  draft.resources = declare(refs(d_.resources), resources_, "resource");
  draft.states = declare(state_names, states_, "state");
  draft.actions = declare(refs(d_.actions), actions_, "action");
  if (draft.agents.empty()) error(DiagKind::InvalidModel, "no agents declared", file_span_, "'agents A, B;'");
  if (draft.states.empty()) error(DiagKind::InvalidModel, "no states declared", file_span_, "'states *q0, q1;'");
  if (draft.actions.empty()) error(DiagKind::InvalidModel, "no actions declared", file_span_, "'actions a, b;'");

  std::set<std::size_t> initial;
  for (const auto& s : d_.states) {
    auto it = states_.find(s.name.value);
    if (it == states_.end()) continue;
    state_spans_.emplace(it->second, s.name.span);
    if (s.initial && initial.insert(it->second).second) draft.initial_states.emplace_back(it->second);
  }
  if (!draft.states.empty() && draft.initial_states.empty())
    error(DiagKind::InvalidModel, "no initial state", d_.states.front().name.span, "a state marked with '*'");

  for (const auto& a : d_.availability) {
    auto q = resolve(states_, a.state, "state");
    auto ag = resolve(agents_, a.agent, "agent");
    std::vector<ActionId> acts;
    bool ok = q && ag;
    for (const auto& x : a.actions) {
      auto id = resolve(actions_, x, "action");
      if (id) acts.emplace_back(*id);
      else ok = false;
    }
    if (!ok) continue;
    draft.availability.push_back({StateId(*q), AgentId(*ag), std::move(acts)});
    avail_spans_.push_back(a.loc.span);
  }
  for (const auto& c : d_.costs) {
    auto q = resolve(states_, c.state, "state");
    auto ag = resolve(agents_, c.agent, "agent");
    auto act = resolve(actions_, c.action, "action");
    if (c.amounts.size() != draft.resources.size()) {
      error(DiagKind::InvalidModel,
            "cost has " + std::to_string(c.amounts.size()) + " entries, the model has " +
                std::to_string(draft.resources.size()) + " resources",
            c.loc.span);
      continue;
    }
    if (!q || !ag || !act) continue;
    std::vector<std::int64_t> amounts;
    for (const auto& n : c.amounts) amounts.push_back(n.value);
    draft.costs.push_back({StateId(*q), AgentId(*ag), ActionId(*act), ResourceVector(std::move(amounts))});
    cost_spans_.push_back(c.loc.span);
  }
  for (const auto& o : d_.outcomes) {
    auto q = resolve(states_, o.state, "state");
    auto t = resolve(states_, o.target, "state");
    if (o.joint.size() != draft.agents.size()) {
      error(DiagKind::InvalidModel,
            "joint action has " + std::to_string(o.joint.size()) + " entries, the model has " +
                std::to_string(draft.agents.size()) + " agents",
            o.loc.span);
      continue;
    }
    JointAction sigma;
    bool ok = q && t;
    for (const auto& x : o.joint) {
      auto id = resolve(actions_, x, "action");
      if (id) sigma.choices.emplace_back(*id);
      else ok = false;
    }
    if (!ok) continue;
    draft.outcomes.push_back({StateId(*q), std::move(sigma), StateId(*t)});
    outcome_spans_.push_back(o.loc.span);
  }
  if (errors()) return std::nullopt;

  auto v = validate_model(draft);
  for (const auto& issue : v.report.issues) {
    if (issue.severity == Severity::Warning)
      warning(DiagKind::InvalidModel, issue.message, span_of(issue));
    else
      error(DiagKind::InvalidModel, issue.message, span_of(issue));
  }
  if (!v.model) return std::nullopt;
  Lowered out{std::move(*v.model), {}, std::nullopt, std::nullopt};
  const Model& m = out.model;

  std::map<std::string, SourceSpan> norm_names;
  for (const auto& n : d_.norms) {
    auto [it, fresh] = norm_names.emplace(n.name.value, n.name.span);
    if (!fresh) {
      error(DiagKind::DuplicateDefinition,
            "norm '" + n.name.value + "' is declared twice (first at line " + std::to_string(it->second.line) + ")",
            n.name.span);
      continue;
    }
    if (auto mon = lower_norm(m, n)) out.norms.push_back(std::move(*mon));
  }

  for (std::size_t i = 0; i < d_.sanctions.size(); ++i) {
    const auto& s = d_.sanctions[i];
    if (i > 0) {
      error(DiagKind::DuplicateDefinition, "more than one sanction policy", s.loc.span);
      continue;
    }
    auto money = resolve(resources_, s.money, "resource");
    SanctionPolicy p;
    bool ok = money.has_value();
    if (money) p.money = ResourceId(*money);
    p.value = s.value.value;
    if (p.value < 1) {
      error(DiagKind::InvalidPolicy, "sanction value sv must be at least 1", s.value.span);
      ok = false;
    }
    if (s.attribution) {
      if (s.attribution->value == "triggering") p.attribution = SanctionAttribution::TriggeringAgent;
      else if (s.attribution->value == "collective") p.attribution = SanctionAttribution::Collective;
      else {
        error(DiagKind::InvalidPolicy, "unknown attribution '" + s.attribution->value + "'", s.attribution->span,
              "'triggering' or 'collective'");
        ok = false;
      }
    }
    if (ok) out.sanction = p;
  }

  for (std::size_t i = 0; i < d_.repairs.size(); ++i) {
    const auto& r = d_.repairs[i];
    if (i > 0) {
      error(DiagKind::DuplicateDefinition, "more than one repair policy", r.loc.span);
      continue;
    }
    const std::size_t before = errors();
    auto need = [&](bool present, const char* key) {
      if (!present)
        error(DiagKind::InvalidPolicy, std::string("repair policy without ") + key, r.loc.span,
              std::string("'") + key + "=...'");
    };
    need(r.cv.has_value(), "cv");
    need(r.sv.has_value(), "sv");
    need(r.window.has_value(), "w");
    need(r.action.has_value(), "action");
    if (r.cv && r.sv && r.cv->value >= r.sv->value)
      error(DiagKind::InvalidPolicy,
            "compensation cv=" + std::to_string(r.cv->value) + " must be lower than the sanction value sv=" +
                std::to_string(r.sv->value) + " (cv < sv)",
            r.cv->span);
    if (r.cv && r.cv->value < 1) error(DiagKind::InvalidPolicy, "compensation cv must be at least 1", r.cv->span);
    if (r.window && r.window->value < 1) error(DiagKind::InvalidPolicy, "window w must be at least 1", r.window->span);
    ReparationPolicy p;
    if (r.action) {
      if (auto id = resolve(actions_, *r.action, "action")) p.repair_action = ActionId(*id);
    }
    if (r.money) {
      if (auto id = resolve(resources_, *r.money, "resource")) p.money = ResourceId(*id);
    } else if (out.sanction) {
      p.money = out.sanction->money;
    } else if (auto id = m.find_resource("money")) {
      p.money = *id;
    } else {
      error(DiagKind::InvalidPolicy, "repair policy does not say which resource is money", r.loc.span,
            "'money=<resource>'");
    }
    if (errors() != before) continue;
    p.compensation = r.cv->value;
    p.sanction = r.sv->value;
    p.window = static_cast<std::size_t>(r.window->value);
    try {
      check_reparation_policy(m, p);
      out.repair = p;
    } catch (const Error& e) {
      error(DiagKind::InvalidPolicy, e.what(), r.loc.span);
    }
  }
  if (errors()) return std::nullopt;
  return out;
}

}  // namespace

LowerResult lower(const Document& d) {
  LowerResult out;
  Lowering L(d, out.diagnostics);
  out.value = L.run();
  return out;
}

LowerResult load(const std::string& text, const std::string& file) {
  auto parsed = parse_document(text, file);
  if (!parsed.document) return LowerResult{std::nullopt, std::move(parsed.diagnostics)};
  auto out = lower(*parsed.document);
  out.diagnostics.insert(out.diagnostics.begin(), parsed.diagnostics.begin(), parsed.diagnostics.end());
  return out;
}

namespace {

std::optional<std::size_t> lookup(std::vector<Diagnostic>& diags, const std::vector<std::string>& names,
                                  const Ident& n, const char* what) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == n.value) return i;
  diags.push_back(Diagnostic{Severity::Error, DiagKind::UnknownIdentifier,
                             std::string("unknown ") + what + " '" + n.value + "'", n.span, ""});
  return std::nullopt;
}

}  // namespace

StrategyLowerResult lower_strategy(const Model& m, const StrategyDoc& s) {
  StrategyLowerResult out;
  auto& diags = out.diagnostics;
  LoweredStrategy ls;
  for (const auto& st : s.starts)
    if (auto q = lookup(diags, m.state_names(), st, "state")) ls.starts.emplace_back(*q);
  if (s.starts.empty()) ls.starts = m.initial_states();
  for (const auto& p : s.plays) {
    auto q = lookup(diags, m.state_names(), p.state, "state");
    auto a = lookup(diags, m.agent_names(), p.agent, "agent");
    auto act = lookup(diags, m.action_names(), p.action, "action");
    if (!q || !a || !act) continue;
    if (!m.is_available(StateId(*q), AgentId(*a), ActionId(*act))) {
      diags.push_back(Diagnostic{Severity::Error, DiagKind::InvalidModel,
                                 "action " + p.action.value + " is not available to " + p.agent.value + " at " +
                                     p.state.value,
                                 p.loc.span, ""});
      continue;
    }
    auto [it, fresh] = ls.profile.emplace(std::make_pair(AgentId(*a), StateId(*q)), ActionId(*act));
    if (!fresh)
      diags.push_back(Diagnostic{Severity::Error, DiagKind::DuplicateDefinition,
                                 "a second play for " + p.agent.value + " at " + p.state.value, p.loc.span, ""});
  }
  if (!has_errors(diags)) out.value = std::move(ls);
  return out;
}

QueryLowerResult lower_query(const Model& m, const QueryDoc& q) {
  QueryLowerResult out;
  auto& diags = out.diagnostics;
  CoalitionQuery cq;
  std::set<std::size_t> seen;
  for (const auto& a : q.coalition) {
    auto id = lookup(diags, m.agent_names(), a, "agent");
    if (!id) continue;
    if (!seen.insert(*id).second) {
      diags.push_back(Diagnostic{Severity::Error, DiagKind::DuplicateDefinition,
                                 "agent " + a.value + " appears twice in the coalition", a.span, ""});
      continue;
    }
    cq.coalition.emplace_back(*id);
  }
  if (q.budget) {
    if (q.budget->size() != m.resource_count()) {
      SourceSpan span = q.budget->empty() ? q.op.span : q.budget->front().span;
      diags.push_back(Diagnostic{Severity::Error, DiagKind::QuerySyntax,
                                 "budget has " + std::to_string(q.budget->size()) + " entries, the model has " +
                                     std::to_string(m.resource_count()) + " resources",
                                 span, ""});
    } else {
      std::vector<std::int64_t> b;
      for (const auto& n : *q.budget) b.push_back(n.value);
      cq.budget = ResourceVector(std::move(b));
    }
  } else {
    cq.budget = ResourceVector(m.resource_count());
  }
  const std::string& op = q.op.value;
  if (op == "X") cq.op = TemporalOp::Next;
  else if (op == "F") cq.op = TemporalOp::Eventually;
  else if (op == "G") cq.op = TemporalOp::Globally;
  else if (op == "U") cq.op = TemporalOp::Until;
  else
    diags.push_back(
        Diagnostic{Severity::Error, DiagKind::QuerySyntax, "unknown operator '" + op + "'", q.op.span, "X, F, G or U"});
  auto states = [&](const NameSet& s) {
    std::vector<StateId> out;
    if (s.wildcard) {
      for (std::size_t i = 0; i < m.state_count(); ++i) out.emplace_back(i);
      return out;
    }
    for (const auto& n : s.names)
      if (auto id = lookup(diags, m.state_names(), n, "state")) out.emplace_back(*id);
    return out;
  };
  cq.target = states(q.target);
  if (q.hold) cq.hold = states(*q.hold);
  if (q.start)
    if (auto id = lookup(diags, m.state_names(), *q.start, "state")) cq.start = StateId(*id);
  if (!has_errors(diags)) out.query = std::move(cq);
  return out;
}

}  // namespace iss
