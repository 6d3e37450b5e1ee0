#include "app.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace iss::app {

namespace {

std::string quote(const std::string& v) {
  const bool plain = !v.empty() && v.find_first_of(" \t\"=\\\n") == std::string::npos;
  if (plain) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

class Record {
public:
  explicit Record(const std::string& kind) : line_("record=" + kind) {}
  Record& kv(const std::string& k, const std::string& v) {
    line_ += " " + k + "=" + quote(v);
    return *this;
  }
  Record& kv(const std::string& k, const char* v) { return kv(k, std::string(v)); }
  Record& kv(const std::string& k, bool v) { return kv(k, std::string(v ? "true" : "false")); }
  template <class N, class = std::enable_if_t<std::is_arithmetic_v<N>>>
  Record& kv(const std::string& k, N v) {
    return kv(k, std::to_string(v));
  }
  std::string str() const { return line_ + "\n"; }

private:
  std::string line_;
};

std::string vec(const ResourceVector& r) {
  std::string s = "[";
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s + "]";
}

std::string named_vec(const Model& m, const ResourceVector& r) {
  std::string s = "[";
  for (std::size_t i = 0; i < r.size(); ++i)
    s += (i ? ", " : "") + m.resource_name(ResourceId(i)) + "=" + std::to_string(r[i]);
  return s + "]";
}

std::string joint_short(const Model& m, const JointAction& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + m.action_name(a[i]);
  return s;
}

std::string steps_str(const Model& m, const std::vector<Step>& steps) {
  if (steps.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < steps.size(); ++i)
    s += (i ? ";" : "") + m.state_name(steps[i].source) + "/" + joint_short(m, steps[i].action);
  return s;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

struct Paint {
  bool on = false;
  std::string operator()(const std::string& text, const char* code) const {
    return on ? std::string("\x1b[") + code + "m" + text + "\x1b[0m" : text;
  }
};

Output fail(int code, std::string message) {
  Output o;
  o.exit_code = code;
  o.err = "error: " + std::move(message) + "\n";
  return o;
}

std::string render_diagnostics(const std::vector<Diagnostic>& ds, const std::string& text) {
  std::string out;
  for (const auto& d : ds) out += format_diagnostic(d, text);
  return out;
}

/// Diagnostics as records, for machine readers.
std::string diagnostic_records(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds)
    out += Record("diagnostic")
               .kv("severity", d.severity == Severity::Error ? "error" : "warning")
               .kv("kind", to_string(d.kind))
               .kv("file", d.span.file)
               .kv("line", d.span.line)
               .kv("column", d.span.column)
               .kv("length", d.span.length)
               .kv("message", d.message)
               .str();
  return out;
}

/// Fails with the document's diagnostics when it did not lower.
std::optional<Output> require_ok(const Session& s) {
  if (s.ok()) return std::nullopt;
  Output o;
  o.exit_code = 1;
  o.err = render_diagnostics(s.lowered.diagnostics, s.text);
  return o;
}

std::vector<const NormMonitor*> selected_norms(const Lowered& l, const Options& o, std::string& error) {
  std::vector<const NormMonitor*> out;
  if (o.norm) {
    if (const auto* n = l.find_norm(*o.norm)) out.push_back(n);
    else error = "unknown norm '" + *o.norm + "'";
    return out;
  }
  for (const auto& n : l.norms) out.push_back(&n);
  return out;
}

const NormMonitor* single_norm(const Lowered& l, const Options& o, std::string& error) {
  auto ns = selected_norms(l, o, error);
  if (!error.empty()) return nullptr;
  if (ns.empty()) {
    error = "the document declares no norm";
    return nullptr;
  }
  return ns.front();
}

std::optional<ResourceId> resource_named(const Model& m, const std::string& name, std::string& error) {
  auto r = m.find_resource(name);
  if (!r) error = "unknown resource '" + name + "'";
  return r;
}

std::optional<SanctionPolicy> sanction_policy(const Lowered& l, const EnforceArgs& a, std::string& error) {
  std::optional<SanctionPolicy> p = l.sanction;
  if (!p && !a.sv) {
    error = "no sanction policy: add 'policy sanction <money> sv=<n>;' or pass --sv";
    return std::nullopt;
  }
  if (!p) {
    p = SanctionPolicy{};
    if (auto m = l.model.find_resource("money")) p->money = *m;
    else if (!a.money) {
      error = "no resource named money: pass --money";
      return std::nullopt;
    }
  }
  if (a.sv) p->value = *a.sv;
  if (a.money) {
    auto r = resource_named(l.model, *a.money, error);
    if (!r) return std::nullopt;
    p->money = *r;
  }
  if (a.attribution) {
    if (*a.attribution == "triggering") p->attribution = SanctionAttribution::TriggeringAgent;
    else if (*a.attribution == "collective") p->attribution = SanctionAttribution::Collective;
    else {
      error = "attribution must be 'triggering' or 'collective'";
      return std::nullopt;
    }
  }
  try {
    check_sanction_policy(l.model, *p);
  } catch (const Error& e) {
    error = e.what();
    return std::nullopt;
  }
  return p;
}

std::optional<ReparationPolicy> repair_policy(const Lowered& l, const EnforceArgs& a, std::string& error) {
  std::optional<ReparationPolicy> p = l.repair;
  if (!p && !(a.cv && a.sv && a.repair_action)) {
    error = "no repair policy: add 'policy repair cv=.. sv=.. w=.. action=..;' or pass --cv, --sv and --repair-action";
    return std::nullopt;
  }
  if (!p) {
    p = ReparationPolicy{};
    if (l.sanction) p->money = l.sanction->money;
    else p->money = l.model.find_resource("money");
  }
  if (a.cv) p->compensation = *a.cv;
  if (a.sv) p->sanction = *a.sv;
  if (a.window) {
    if (*a.window < 1) {
      error = "window w must be at least 1";
      return std::nullopt;
    }
    p->window = static_cast<std::size_t>(*a.window);
  }
  if (a.repair_action) {
    auto act = l.model.find_action(*a.repair_action);
    if (!act) {
      error = "unknown action '" + *a.repair_action + "'";
      return std::nullopt;
    }
    p->repair_action = *act;
  }
  if (a.money) {
    auto r = resource_named(l.model, *a.money, error);
    if (!r) return std::nullopt;
    p->money = *r;
  }
  if (!p->money) {
    error = "repair policy does not say which resource is money: pass --money";
    return std::nullopt;
  }
  try {
    check_reparation_policy(l.model, *p);
  } catch (const Error& e) {
    error = e.what();
    return std::nullopt;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Lasso rendering

void render_lasso(std::string& out, const Model& m, const std::vector<const NormMonitor*>& norms, const Lasso& l,
                  std::size_t index, const Options& o, std::vector<std::size_t>& violating) {
  Paint paint{o.color};
  const Trace once = l.unroll(m, 1);
  if (o.format == Format::Records) {
    out += Record("lasso")
               .kv("index", index)
               .kv("start", m.state_name(l.stem.start))
               .kv("stem_length", l.stem.size())
               .kv("cycle_length", l.cycle.size())
               .kv("stem", steps_str(m, l.stem.steps))
               .kv("cycle", steps_str(m, l.cycle))
               .str();
  } else {
    out += "lasso " + std::to_string(index) + " from " + m.state_name(l.stem.start) + "\n" + format_lasso(m, l);
  }
  for (std::size_t n = 0; n < norms.size(); ++n) {
    const Verdict v = classify_lasso(m, *norms[n], l);
    if (v.violating()) ++violating[n];
    if (o.format == Format::Records) {
      Record r("verdict");
      r.kv("lasso", index).kv("norm", norms[n]->name()).kv("outcome", v.violating() ? "violating" : "compliant");
      if (v.position)
        r.kv("step", v.position->step)
            .kv("in_cycle", v.position->in_cycle)
            .kv("iteration", v.position->iteration)
            .kv("offset", v.position->offset);
      out += r.str();
      continue;
    }
    out += "  norm " + norms[n]->name() + ": ";
    if (!v.violating()) {
      out += paint("COMPLIANT", "32") + "\n";
      continue;
    }
    const auto& p = *v.position;
    out += paint("VIOLATING", "31") + " at step " + std::to_string(p.step) + " (" +
           (p.in_cycle ? "cycle iteration " + std::to_string(p.iteration) + ", offset " + std::to_string(p.offset)
                       : "stem, offset " + std::to_string(p.offset)) +
           ")\n";
  }
  for (std::size_t a = 0; a < m.agent_count(); ++a) {
    const auto c = cumulative_cost(m, once, AgentSet{AgentId(a)});
    if (o.format == Format::Records)
      out += Record("cost").kv("lasso", index).kv("agent", m.agent_name(AgentId(a))).kv("amount", vec(c)).str();
    else
      out += "  cost " + m.agent_name(AgentId(a)) + " (stem + one cycle): " + named_vec(m, c) + "\n";
  }
}

// ---------------------------------------------------------------------------
// Audit rendering

std::string census_text(const Census& c) {
  return "lassos up to length " + std::to_string(c.bound) + ": " + std::to_string(c.lassos) + ", compliant before " +
         std::to_string(c.compliant_before) + ", after " + std::to_string(c.compliant_after);
}

Record& census_kv(Record& r, const Census& c) {
  return r.kv("bound", c.bound)
      .kv("lassos", c.lassos)
      .kv("compliant_before", c.compliant_before)
      .kv("compliant_after", c.compliant_after);
}

std::string render(const RegimentationAudit& a, const std::string& norm, const Options& o) {
  if (o.format == Format::Records) {
    Record r("audit");
    r.kv("mode", "regiment")
        .kv("norm", norm)
        .kv("violation_before", a.violation_before)
        .kv("violation_after", a.violation_after)
        .kv("pruned", a.pruned)
        .kv("forced", a.forced)
        .kv("deadlocked", a.deadlocked)
        .kv("lost_compliant", a.lost_compliant_behaviors)
        .kv("unsound_lassos", a.unsound_lassos);
    return census_kv(r, a.census).str();
  }
  std::string s;
  s += "# audit: regiment, norm " + norm + "\n";
  s += "#   violation reachable: before " + yes(a.violation_before) + ", after " + yes(a.violation_after) + "\n";
  s += "#   pruned joint actions: " + std::to_string(a.pruned) + " (" + std::to_string(a.forced) +
       " forced), deadlocked states: " + std::to_string(a.deadlocked) + "\n";
  s += "#   " + census_text(a.census) + "\n";
  s += "#   compliant behaviour lost: " + yes(a.lost_compliant_behaviors) +
       ", unsound lassos: " + std::to_string(a.unsound_lassos) + "\n";
  return s;
}

std::string render(const SanctionAudit& a, const std::string& norm, const Options& o) {
  if (o.format == Format::Records) {
    Record r("audit");
    r.kv("mode", "sanction")
        .kv("norm", norm)
        .kv("violation_before", a.violation_before)
        .kv("violation_after", a.violation_after)
        .kv("sv", a.sanction_value)
        .kv("charged_actions", a.charged_actions)
        .kv("inexact_charges", a.inexact_charges)
        .kv("violating_lassos", a.violating_lassos)
        .kv("total_extra_money", a.total_extra_money)
        .kv("min_extra_money", a.min_extra_money)
        .kv("accounting_mismatches", a.accounting_mismatches);
    std::ostringstream mean;
    mean.precision(6);
    mean << std::fixed << a.mean_extra_money;
    r.kv("mean_extra_money", mean.str());
    return census_kv(r, a.census).str();
  }
  std::ostringstream s;
  s << "# audit: sanction sv=" << a.sanction_value << ", norm " << norm << "\n";
  s << "#   violation reachable: before " << yes(a.violation_before) << ", after " << yes(a.violation_after) << "\n";
  s << "#   charged actions: " << a.charged_actions << " (" << a.inexact_charges << " inexact)\n";
  s << "#   violating lassos: " << a.violating_lassos << ", extra money min " << a.min_extra_money << ", mean "
    << a.mean_extra_money << ", accounting mismatches " << a.accounting_mismatches << "\n";
  s << "#   " << census_text(a.census) << "\n";
  return s.str();
}

std::string render(const ReparationAudit& a, const std::string& norm, const Options& o) {
  if (o.format == Format::Records) {
    Record r("audit");
    r.kv("mode", "repair")
        .kv("norm", norm)
        .kv("violation_before", a.violation_before)
        .kv("violation_after", a.violation_after)
        .kv("cv", a.compensation)
        .kv("sv", a.sanction)
        .kv("window", a.window)
        .kv("repaired_lassos", a.repaired_lassos)
        .kv("lost_lassos", a.lost_lassos)
        .kv("pending_states", a.pending_states);
    return census_kv(r, a.census).str();
  }
  std::string s;
  s += "# audit: repair cv=" + std::to_string(a.compensation) + " sv=" + std::to_string(a.sanction) +
       " w=" + std::to_string(a.window) + ", norm " + norm + "\n";
  s += "#   violation reachable: before " + yes(a.violation_before) + ", after " + yes(a.violation_after) + "\n";
  s += "#   pending states: " + std::to_string(a.pending_states) + ", repaired lassos: " +
       std::to_string(a.repaired_lassos) + ", newly violating: " + std::to_string(a.lost_lassos) + "\n";
  s += "#   " + census_text(a.census) + "\n";
  return s;
}

std::string render_skip(const std::string& mode, const std::string& norm, const std::string& why, const Options& o) {
  if (o.format == Format::Records)
    return Record("audit").kv("mode", mode).kv("norm", norm).kv("status", "skipped").kv("reason", why).str();
  return "# audit: " + mode + ", norm " + norm + ": skipped, " + why + "\n";
}

std::string error_name(const Error& e) { return std::string(to_string(e.code())) + ": " + e.what(); }

}  // namespace

Session Session::from_text(std::string text, std::string file) {
  Session s;
  s.file = std::move(file);
  s.text = std::move(text);
  s.lowered = load(s.text, s.file);
  return s;
}

// ---------------------------------------------------------------------------

Output validate(const Session& s, const Options& o) {
  Output out;
  out.err = render_diagnostics(s.lowered.diagnostics, s.text);
  if (o.format == Format::Records) out.out += diagnostic_records(s.lowered.diagnostics);
  const auto errors = std::count_if(s.lowered.diagnostics.begin(), s.lowered.diagnostics.end(),
                                    [](const Diagnostic& d) { return d.severity == Severity::Error; });
  if (!s.ok()) {
    out.exit_code = 1;
    if (o.format == Format::Records)
      out.out += Record("validate").kv("file", s.file).kv("status", "error").kv("errors", errors).str();
    else
      out.out += s.file + ": " + std::to_string(errors) + " error(s)\n";
    return out;
  }
  const auto& l = *s.lowered.value;
  const Model& m = l.model;
  std::string norms;
  for (const auto& n : l.norms) norms += (norms.empty() ? "" : ",") + n.name();
  const auto warnings = s.lowered.diagnostics.size() - static_cast<std::size_t>(errors);
  if (o.format == Format::Records) {
    out.out += Record("validate")
                   .kv("file", s.file)
                   .kv("status", "ok")
                   .kv("agents", m.agent_count())
                   .kv("resources", m.resource_count())
                   .kv("states", m.state_count())
                   .kv("actions", m.action_count())
                   .kv("transitions", m.transition_count())
                   .kv("norms", norms.empty() ? "-" : norms)
                   .kv("sanction_policy", l.sanction.has_value())
                   .kv("repair_policy", l.repair.has_value())
                   .kv("warnings", warnings)
                   .str();
    return out;
  }
  Paint paint{o.color};
  out.out += s.file + ": " + paint("ok", "32") + "\n";
  out.out += "  " + std::to_string(m.agent_count()) + " agents, " + std::to_string(m.resource_count()) +
             " resources, " + std::to_string(m.state_count()) + " states, " + std::to_string(m.action_count()) +
             " actions, " + std::to_string(m.transition_count()) + " transitions\n";
  out.out += "  norms: " + (norms.empty() ? std::string("none") : norms) + "\n";
  out.out += "  policies: sanction " + yes(l.sanction.has_value()) + ", repair " + yes(l.repair.has_value()) + "\n";
  if (warnings) out.out += "  warnings: " + std::to_string(warnings) + "\n";
  return out;
}

Output simulate(const Session& s, const Options& o, const SimulateArgs& a) {
  if (auto bad = require_ok(s)) return *bad;
  const auto& l = *s.lowered.value;
  const Model& m = l.model;
  std::string error;
  auto norms = selected_norms(l, o, error);
  if (!error.empty()) return fail(1, error);
  if (a.strategy_text.has_value() == a.enumerate.has_value())
    return fail(2, "simulate needs exactly one of a strategy file or --enumerate");

  std::vector<Lasso> lassos;
  std::size_t total = 0;
  if (a.strategy_text) {
    auto parsed = parse_strategy(*a.strategy_text, a.strategy_name);
    if (!parsed.document) {
      Output out;
      out.exit_code = 1;
      out.err = render_diagnostics(parsed.diagnostics, *a.strategy_text);
      return out;
    }
    auto lowered = lower_strategy(m, *parsed.document);
    if (!lowered.value) {
      Output out;
      out.exit_code = 1;
      out.err = render_diagnostics(lowered.diagnostics, *a.strategy_text);
      return out;
    }
    try {
      for (auto q : lowered.value->starts) lassos.push_back(lasso_from_strategy(m, lowered.value->profile, q));
    } catch (const Error& e) {
      return fail(1, error_name(e));
    }
    total = lassos.size();
  } else {
    if (*a.enumerate == 0) return fail(2, "--enumerate needs a length of at least 1");
    for (auto q : m.initial_states()) {
      auto ls = enumerate_lassos(m, q, *a.enumerate);
      lassos.insert(lassos.end(), ls.begin(), ls.end());
    }
    total = lassos.size();
  }

  std::vector<std::size_t> shown(lassos.size());
  std::iota(shown.begin(), shown.end(), std::size_t{0});
  if (a.sample && *a.sample < shown.size()) {
    std::mt19937_64 rng(o.seed);
    std::shuffle(shown.begin(), shown.end(), rng);
    shown.resize(*a.sample);
    std::sort(shown.begin(), shown.end());
  }

  Output out;
  std::vector<std::size_t> violating(norms.size(), 0);
  for (auto i : shown) render_lasso(out.out, m, norms, lassos[i], i, o, violating);
  // Counts over every lasso, not only the sample.
  std::vector<std::size_t> all_violating(norms.size(), 0);
  for (std::size_t n = 0; n < norms.size(); ++n) {
    CompiledMonitor cm(m, *norms[n]);
    for (const auto& l2 : lassos)
      if (classify_lasso(cm, l2).violating()) ++all_violating[n];
  }
  if (o.format == Format::Records) {
    out.out += Record("summary").kv("lassos", total).kv("shown", shown.size()).kv("seed", o.seed).str();
    for (std::size_t n = 0; n < norms.size(); ++n)
      out.out += Record("norm_summary")
                     .kv("norm", norms[n]->name())
                     .kv("violating", all_violating[n])
                     .kv("compliant", total - all_violating[n])
                     .str();
  } else {
    out.out += "lassos: " + std::to_string(total);
    if (shown.size() != total) out.out += " (" + std::to_string(shown.size()) + " shown)";
    out.out += "\n";
    for (std::size_t n = 0; n < norms.size(); ++n)
      out.out += "  " + norms[n]->name() + ": " + std::to_string(all_violating[n]) + " violating, " +
                 std::to_string(total - all_violating[n]) + " compliant\n";
  }
  return out;
}

Output enforce(const Session& s, const Options& o, const EnforceArgs& a) {
  if (auto bad = require_ok(s)) return *bad;
  const auto& l = *s.lowered.value;
  const Model& m = l.model;
  std::string error;
  const NormMonitor* mon = single_norm(l, o, error);
  if (!mon) return fail(1, error);

  Output out;
  try {
    if (a.mode == "regiment") {
      RegimentOptions ro;
      ro.allow_deadlock = a.allow_deadlock;
      auto r = regiment(m, *mon, ro);
      auto lifted = lift_monitor(*mon, r.product);
      out.document = serialize(document_from(r.product.model, {lifted}, l.sanction, l.repair));
      out.out = render(audit_regimentation(m, *mon, r, o.bound), mon->name(), o);
    } else if (a.mode == "sanction") {
      auto p = sanction_policy(l, a, error);
      if (!p) return fail(1, "InvalidPolicy: " + error);
      auto sn = sanction(m, *mon, *p);
      auto lifted = lift_monitor(*mon, sn.product);
      out.document = serialize(document_from(sn.product.model, {lifted}, p, l.repair));
      out.out = render(audit_sanction(m, *mon, *p, sn, o.bound), mon->name(), o);
    } else if (a.mode == "repair") {
      auto p = repair_policy(l, a, error);
      if (!p) return fail(1, "InvalidPolicy: " + error);
      auto repaired = repair_extend(m, *mon, *p);
      std::vector<NormMonitor> norms;
      for (const auto& n : l.norms) norms.push_back(n.name() == mon->name() ? repaired : n);
      out.document = serialize(document_from(m, norms, l.sanction, p));
      out.out = render(audit_reparation(m, *mon, repaired, *p, o.bound), mon->name(), o);
    } else {
      return fail(2, "unknown mode '" + a.mode + "' (regiment, sanction or repair)");
    }
  } catch (const Error& e) {
    return fail(1, error_name(e));
  }
  return out;
}

Output verify(const Session& s, const Options& o, const VerifyArgs& a) {
  if (auto bad = require_ok(s)) return *bad;
  const Model& m = s.lowered.value->model;
  auto parsed = parse_query(a.query);
  if (!parsed.query) {
    Output out;
    out.exit_code = 1;
    out.err = render_diagnostics(parsed.diagnostics, a.query);
    return out;
  }
  auto lowered = lower_query(m, *parsed.query);
  if (!lowered.query) {
    Output out;
    out.exit_code = 1;
    out.err = render_diagnostics(lowered.diagnostics, a.query);
    return out;
  }
  CoalitionQuery q = *lowered.query;
  if (a.from) {
    auto st = m.find_state(*a.from);
    if (!st) return fail(1, "UnknownState: unknown state '" + *a.from + "'");
    q.start = *st;
  }

  Output out;
  Paint paint{o.color};
  auto coalition = [&] {
    std::string c;
    for (auto ag : q.coalition) c += (c.empty() ? "" : ",") + m.agent_name(ag);
    return c.empty() ? std::string("-") : c;
  };
  try {
    if (a.sweep_resource) {
      auto r = m.find_resource(*a.sweep_resource);
      if (!r) return fail(1, "unknown resource '" + *a.sweep_resource + "'");
      bool monotone = true, seen_true = false;
      std::optional<std::int64_t> first_true;
      for (std::int64_t b = 0; b <= a.sweep_max; ++b) {
        std::vector<std::int64_t> values = q.budget.values();
        values[r->index()] = b;
        CoalitionQuery qb = q;
        qb.budget = ResourceVector(values);
        const auto res = check(m, qb);
        if (seen_true && !res.holds) monotone = false;
        if (res.holds && !seen_true) first_true = b;
        seen_true = seen_true || res.holds;
        if (o.format == Format::Records)
          out.out += Record("sweep")
                         .kv("resource", *a.sweep_resource)
                         .kv("budget", vec(qb.budget))
                         .kv("holds", res.holds)
                         .kv("configs_explored", res.configs_explored)
                         .str();
        else
          out.out += "  " + *a.sweep_resource + "=" + std::to_string(b) + " budget " + vec(qb.budget) + ": " +
                     (res.holds ? paint("holds", "32") : paint("fails", "31")) + " (" +
                     std::to_string(res.configs_explored) + " configurations)\n";
      }
      if (o.format == Format::Records) {
        Record r2("sweep_summary");
        r2.kv("monotone", monotone);
        if (first_true) r2.kv("first_holding", *first_true);
        else r2.kv("first_holding", "-");
        out.out += r2.str();
      } else {
        out.out += "monotone: " + yes(monotone) + "\n";
      }
      return out;
    }

    if (a.probe) {
      const auto p = complexity_probe(m, q);
      if (o.format == Format::Records) {
        out.out += Record("probe")
                       .kv("holds", p.holds)
                       .kv("configs_explored", p.configs_explored)
                       .kv("model_size", p.model_size)
                       .kv("budget_lattice", p.budget_lattice)
                       .kv("config_bound", p.config_bound)
                       .kv("bound_ok", p.bound_ok)
                       .str();
      } else {
        std::ostringstream ss;
        ss << "probe: holds " << yes(p.holds) << ", configs_explored " << p.configs_explored << ", |Q| + transitions "
           << p.model_size << ", budget lattice " << p.budget_lattice << ", bound |Q| x lattice " << p.config_bound
           << (p.bound_ok ? " (respected)" : " (EXCEEDED)") << ", " << p.wall_ms << " ms\n";
        out.out += ss.str();
      }
      return out;
    }

    const auto res = check(m, q);
    if (o.format == Format::Records) {
      Record r("verify");
      r.kv("query", a.query)
          .kv("op", to_string(q.op))
          .kv("coalition", coalition())
          .kv("budget", vec(q.budget))
          .kv("start", q.start ? m.state_name(*q.start) : std::string("initial"))
          .kv("holds", res.holds)
          .kv("configs_explored", res.configs_explored);
      out.out += r.str();
    } else {
      out.out += "query: " + a.query + "\n";
      out.out += "holds: " + (res.holds ? paint("true", "32") : paint("false", "31")) + "\n";
      out.out += "configs_explored: " + std::to_string(res.configs_explored) + "\n";
    }
    if (a.witness && res.witness) {
      if (o.format == Format::Human) out.out += "witness (state, remaining budget -> coalition move):\n";
      for (const auto& [cfg, move] : *res.witness) {
        if (o.format == Format::Records) {
          Record r("witness");
          r.kv("state", m.state_name(cfg.state)).kv("remaining", vec(cfg.remaining));
          for (std::size_t i = 0; i < move.size(); ++i) r.kv(m.agent_name(q.coalition[i]), m.action_name(move[i]));
          out.out += r.str();
        } else {
          std::string mv;
          for (std::size_t i = 0; i < move.size(); ++i)
            mv += (i ? " " : "") + m.agent_name(q.coalition[i]) + ":" + m.action_name(move[i]);
          out.out += "  " + m.state_name(cfg.state) + " " + vec(cfg.remaining) + " -> " + mv + "\n";
        }
      }
    } else if (a.witness && o.format == Format::Human) {
      out.out += res.holds ? "witness: none needed (empty coalition)\n" : "witness: none (query fails)\n";
    }
  } catch (const Error& e) {
    return fail(1, error_name(e));
  }
  return out;
}

Output audit(const Session& s, const Options& o, const EnforceArgs& policy) {
  if (auto bad = require_ok(s)) return *bad;
  const auto& l = *s.lowered.value;
  const Model& m = l.model;
  std::string error;
  auto norms = selected_norms(l, o, error);
  if (!error.empty()) return fail(1, error);
  if (norms.empty()) return fail(1, "the document declares no norm");

  Output out;
  for (const auto* mon : norms) {
    const auto ev = exists_violation(m, *mon);
    if (o.format == Format::Records) {
      Record r("detect");
      r.kv("norm", mon->name()).kv("violation_reachable", ev.exists);
      if (ev.witness) r.kv("stem", steps_str(m, ev.witness->stem.steps)).kv("cycle", steps_str(m, ev.witness->cycle));
      out.out += r.str();
    } else {
      out.out += "# norm " + mon->name() + ": violation reachable " + yes(ev.exists) + "\n";
      if (ev.witness) {
        std::istringstream lines(format_lasso(m, *ev.witness));
        for (std::string line; std::getline(lines, line);) out.out += "#   " + line + "\n";
      }
    }
    try {
      RegimentOptions ro;
      ro.allow_deadlock = policy.allow_deadlock;
      auto r = regiment(m, *mon, ro);
      out.out += render(audit_regimentation(m, *mon, r, o.bound), mon->name(), o);
    } catch (const Error& e) {
      out.out += render_skip("regiment", mon->name(), error_name(e), o);
    }
    std::string why;
    if (auto p = sanction_policy(l, policy, why)) {
      auto sn = sanction(m, *mon, *p);
      out.out += render(audit_sanction(m, *mon, *p, sn, o.bound), mon->name(), o);
    } else {
      out.out += render_skip("sanction", mon->name(), why, o);
    }
    why.clear();
    if (auto p = repair_policy(l, policy, why)) {
      auto repaired = repair_extend(m, *mon, *p);
      out.out += render(audit_reparation(m, *mon, repaired, *p, o.bound), mon->name(), o);
    } else {
      out.out += render_skip("repair", mon->name(), why, o);
    }
  }
  return out;
}

}  // namespace iss::app
