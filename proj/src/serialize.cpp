#include <sstream>

#include "iss/spec_io.hpp"

namespace iss {

namespace {

void write_list(std::ostringstream& out, const char* keyword, const std::vector<Ident>& names) {
  if (names.empty()) return;
  out << keyword;
  for (const auto& n : names) out << ' ' << n.value;
  out << ";\n";
}

std::string joined(const std::vector<Ident>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i].value;
  return s;
}

std::string name_set(const NameSet& s) {
  if (s.wildcard) return "_";
  if (s.names.size() == 1) return s.names[0].value;
  return "{" + joined(s.names) + "}";
}

const char* status_word(MonitorStatus s) {
  switch (s) {
    case MonitorStatus::Ok: return "ok";
    case MonitorStatus::Violation: return "violation";
    case MonitorStatus::PendingRepair: return "pending";
  }
  return "ok";
}

}  // namespace

std::string serialize(const Document& d) {
  std::ostringstream out;
  write_list(out, "agents", d.agents);
  write_list(out, "resources", d.resources);
  if (!d.states.empty()) {
    out << "states";
    for (const auto& s : d.states) out << ' ' << s.name.value << (s.initial ? "*" : "");
    out << ";\n";
  }
  write_list(out, "actions", d.actions);

  if (!d.availability.empty()) out << '\n';
  for (const auto& a : d.availability)
    out << "avail " << a.state.value << ' ' << a.agent.value << " {" << joined(a.actions) << "};\n";
  if (!d.costs.empty()) out << '\n';
  for (const auto& c : d.costs) {
    out << "cost " << c.state.value << ' ' << c.agent.value << ' ' << c.action.value << " = [";
    for (std::size_t i = 0; i < c.amounts.size(); ++i) out << (i ? ", " : "") << c.amounts[i].value;
    out << "];\n";
  }
  if (!d.outcomes.empty()) out << '\n';
  for (const auto& o : d.outcomes)
    out << "outcome " << o.state.value << " (" << joined(o.joint) << ") -> " << o.target.value << ";\n";

  for (const auto& n : d.norms) {
    out << "\nnorm " << n.name.value << " {\n";
    for (const auto& s : n.states)
      out << "  state " << s.name.value << ' ' << status_word(s.status) << (s.initial ? " init" : "") << ";\n";
    for (const auto& r : n.rules) {
      out << "  ";
      if (r.from) out << "from " << name_set(*r.from) << ' ';
      out << "on " << name_set(r.state) << " / ";
      if (!r.action.slots) {
        out << '_';
      } else {
        out << '(';
        for (std::size_t i = 0; i < r.action.slots->size(); ++i) out << (i ? ", " : "") << name_set((*r.action.slots)[i]);
        out << ')';
      }
      out << " -> " << (r.target ? r.target->value : "stay") << ";\n";
    }
    out << "}\n";
  }

  if (!d.sanctions.empty() || !d.repairs.empty()) out << '\n';
  for (const auto& s : d.sanctions) {
    out << "policy sanction " << s.money.value << " sv=" << s.value.value;
    if (s.attribution) out << " attribution=" << s.attribution->value;
    out << ";\n";
  }
  for (const auto& r : d.repairs) {
    out << "policy repair";
    if (r.cv) out << " cv=" << r.cv->value;
    if (r.sv) out << " sv=" << r.sv->value;
    if (r.window) out << " w=" << r.window->value;
    if (r.action) out << " action=" << r.action->value;
    if (r.money) out << " money=" << r.money->value;
    out << ";\n";
  }
  return out.str();
}

Document document_from(const Model& m, const std::vector<NormMonitor>& norms, const std::optional<SanctionPolicy>& sanction,
                       const std::optional<ReparationPolicy>& repair) {
  Document d;
  auto id = [](const std::string& s) { return Ident{s, {}}; };
  for (const auto& a : m.agent_names()) d.agents.push_back(id(a));
  for (const auto& r : m.resource_names()) d.resources.push_back(id(r));
  for (std::size_t q = 0; q < m.state_count(); ++q)
    d.states.push_back(StateDecl{id(m.state_name(StateId(q))), m.is_initial(StateId(q))});
  for (const auto& a : m.action_names()) d.actions.push_back(id(a));
  for (std::size_t q = 0; q < m.state_count(); ++q) {
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      AvailDecl e{id(m.state_name(StateId(q))), id(m.agent_name(AgentId(a))), {}, {}};
      for (auto act : m.available(StateId(q), AgentId(a))) e.actions.push_back(id(m.action_name(act)));
      d.availability.push_back(std::move(e));
    }
  }
  for (const auto& [key, amount] : m.declared_costs()) {
    CostDecl c{id(m.state_name(key.state)), id(m.agent_name(key.agent)), id(m.action_name(key.action)), {}, {}};
    for (auto v : amount.values()) c.amounts.push_back(Number{v, {}});
    d.costs.push_back(std::move(c));
  }
  for (std::size_t q = 0; q < m.state_count(); ++q) {
    for (std::size_t k = 0; k < m.joint_count(StateId(q)); ++k) {
      OutcomeDecl o;
      o.state = id(m.state_name(StateId(q)));
      for (auto act : m.joint_at(StateId(q), k).choices) o.joint.push_back(id(m.action_name(act)));
      o.target = id(m.state_name(m.successor(StateId(q), k)));
      d.outcomes.push_back(std::move(o));
    }
  }
  for (const auto& mon : norms) {
    NormDecl n;
    n.name = id(mon.name());
    for (std::size_t s = 0; s < mon.size(); ++s)
      n.states.push_back(MonitorStateDecl{id(mon.states()[s].name), mon.states()[s].status,
                                          mon.initial() == MonitorStateId(s), {}});
    auto mon_name = [&](MonitorStateId s) { return id(mon.states()[s.index()].name); };
    for (const auto& r : mon.rules()) {
      RuleDecl rd;
      if (r.from) {
        NameSet f{false, {}, {}};
        for (auto s : *r.from) f.names.push_back(mon_name(s));
        rd.from = std::move(f);
      }
      if (r.state.states) {
        rd.state.wildcard = false;
        for (auto q : *r.state.states) rd.state.names.push_back(id(m.state_name(q)));
      }
      if (r.action.agents) {
        std::vector<NameSet> slots;
        for (const auto& slot : *r.action.agents) {
          NameSet s;
          if (slot) {
            s.wildcard = false;
            for (auto act : *slot) s.names.push_back(id(m.action_name(act)));
          }
          slots.push_back(std::move(s));
        }
        rd.action.slots = std::move(slots);
      }
      if (r.target) rd.target = mon_name(*r.target);
      n.rules.push_back(std::move(rd));
    }
    d.norms.push_back(std::move(n));
  }
  if (sanction) {
    SanctionDecl s{id(m.resource_name(sanction->money)), Number{sanction->value, {}}, std::nullopt, {}};
    if (sanction->attribution == SanctionAttribution::Collective) s.attribution = id("collective");
    d.sanctions.push_back(std::move(s));
  }
  if (repair) {
    RepairDecl r;
    r.cv = Number{repair->compensation, {}};
    r.sv = Number{repair->sanction, {}};
    r.window = Number{static_cast<std::int64_t>(repair->window), {}};
    r.action = id(m.action_name(repair->repair_action));
    if (repair->money) r.money = id(m.resource_name(*repair->money));
    d.repairs.push_back(std::move(r));
  }
  return d;
}

}  // namespace iss
