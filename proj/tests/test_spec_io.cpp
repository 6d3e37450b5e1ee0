#include "doctest.h"

#include <random>

#include "iss/spec_io.hpp"
#include "support.hpp"

using namespace iss;

namespace {

const char* kSelfLoop = R"(agents A;
resources money;
states q0*;
actions noop;
avail q0 A {noop};
cost q0 A noop = [0];
outcome q0 (noop) -> q0;
)";

const char* kTwoAgents = R"(# two firms, one shared state machine
agents A B;
resources money steam;
states q0* q1;
actions send recv noop pay;
avail q0 A {send, noop};
avail q0 B {recv, noop};
avail q1 A {noop, pay};
avail q1 B {noop};
cost q0 A send = [2, 1];
cost q0 A noop = [0, 0];
cost q0 B recv = [1, 0];
cost q0 B noop = [0, 0];
cost q1 A noop = [0, 0];
cost q1 A pay = [2, 0];
cost q1 B noop = [0, 0];
outcome q0 (send, recv) -> q1;
outcome q0 (send, noop) -> q0;
outcome q0 (noop, recv) -> q0;
outcome q0 (noop, noop) -> q0;
outcome q1 (noop, noop) -> q0;
outcome q1 (pay, noop) -> q0;
norm N1 {
  state s0 ok init;
  state bad violation;
  on q0 / (send, noop) -> bad;
  on q0 / (send, _) -> s0;
  on _ / _ -> stay;
}
policy sanction money sv=5;
policy repair cv=2 sv=5 w=1 action=pay;
)";

Lowered must_load(const std::string& text) {
  auto r = load(text, "t.iss");
  for (const auto& d : r.diagnostics)
    if (d.severity == Severity::Error) FAIL_CHECK(format_diagnostic(d, text));
  REQUIRE(r.value.has_value());
  return std::move(*r.value);
}

const Diagnostic* find_kind(const std::vector<Diagnostic>& ds, DiagKind k) {
  for (const auto& d : ds)
    if (d.kind == k) return &d;
  return nullptr;
}

std::string slice(const std::string& text, const SourceSpan& s) { return text.substr(s.offset, s.length); }

}  // namespace

TEST_CASE("minimal self-loop document") {
  auto l = must_load(kSelfLoop);
  CHECK(l.model.state_count() == 1);
  CHECK(l.model.is_initial(StateId(0)));
  CHECK(l.norms.empty());
}

TEST_CASE("two-agent document lowers") {
  auto l = must_load(kTwoAgents);
  CHECK(l.model.agent_count() == 2);
  CHECK(l.model.joint_count(StateId(0)) == 4);
  REQUIRE(l.norms.size() == 1);
  REQUIRE(l.find_norm("N1") != nullptr);
  CHECK(l.find_norm("N2") == nullptr);
  REQUIRE(l.sanction);
  CHECK(l.sanction->value == 5);
  CHECK(l.sanction->money == ResourceId(0));
  REQUIRE(l.repair);
  CHECK(l.repair->compensation == 2);
  CHECK(l.repair->window == 1u);
  CHECK(l.repair->money == ResourceId(0));
}

TEST_CASE("round trip") {
  for (const char* text : {kSelfLoop, kTwoAgents}) {
    auto p = parse_document(text, "a.iss");
    REQUIRE(p.document);
    const std::string once = serialize(*p.document);
    auto q = parse_document(once, "b.iss");
    REQUIRE(q.document);
    CHECK(*q.document == *p.document);
    CHECK(serialize(*q.document) == once);
  }
  SUBCASE("initial markers survive") {
    auto p = parse_document("agents A; states a, b*, c*; actions x;");
    REQUIRE(p.document);
    auto q = parse_document(serialize(*p.document));
    REQUIRE(q.document);
    CHECK_FALSE(q.document->states[0].initial);
    CHECK(q.document->states[1].initial);
    CHECK(q.document->states[2].initial);
  }
  SUBCASE("document_from reproduces the lowered values") {
    auto l = must_load(kTwoAgents);
    auto doc = document_from(l.model, l.norms, l.sanction, l.repair);
    auto again = must_load(serialize(doc));
    CHECK(again.model.to_draft().outcomes.size() == l.model.to_draft().outcomes.size());
    CHECK(again.model.declared_costs() == l.model.declared_costs());
    CHECK(again.norms == l.norms);
    CHECK(again.sanction->value == l.sanction->value);
    CHECK(again.repair->compensation == l.repair->compensation);
  }
  SUBCASE("random models") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 60; ++i) {
      auto m = iss::testing::random_model(rng, {});
      auto mon = iss::testing::random_monitor(rng, m);
      auto text = serialize(document_from(m, {mon}));
      auto back = must_load(text);
      CHECK(back.model.state_names() == m.state_names());
      CHECK(back.model.declared_costs() == m.declared_costs());
      CHECK(back.norms.front() == mon);
      for (std::size_t q = 0; q < m.state_count(); ++q)
        for (std::size_t k = 0; k < m.joint_count(StateId(q)); ++k)
          CHECK(back.model.successor(StateId(q), k) == m.successor(StateId(q), k));
      CHECK(serialize(*parse_document(text).document) == text);
    }
  }
}

TEST_CASE("CRLF input") {
  std::string crlf;
  for (char c : std::string(kTwoAgents)) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  auto a = parse_document(kTwoAgents);
  auto b = parse_document(crlf);
  REQUIRE(a.document);
  REQUIRE(b.document);
  CHECK(*a.document == *b.document);
  CHECK(serialize(*b.document).find('\r') == std::string::npos);
}

TEST_CASE("unknown state in an outcome has an exact span") {
  const std::string text = "agents A;\nstates q0*;\nactions x;\navail q0 A {x};\noutcome q0 (x) -> q9;\n";
  auto r = load(text, "u.iss");
  CHECK_FALSE(r.value);
  const auto* d = find_kind(r.diagnostics, DiagKind::UnknownIdentifier);
  REQUIRE(d);
  CHECK(d->span.line == 5);
  CHECK(d->span.column == 19);
  CHECK(d->span.length == 2);
  CHECK(slice(text, d->span) == "q9");
  CHECK(d->span.file == "u.iss");
  CHECK(format_diagnostic(*d, text).find("^~") != std::string::npos);
}

TEST_CASE("parse errors carry spans and hints") {
  const std::string text = "agents A;\nstates q0*;\nactions x\navail q0 A {x};\ncost q0 A x = [1;\noutcome q0 (x) -> q0;\n";
  auto r = parse_document(text);
  REQUIRE(has_errors(r.diagnostics));
  CHECK(r.diagnostics.size() >= 2);
  for (const auto& d : r.diagnostics) {
    CHECK(d.span.line >= 1);
    CHECK(d.span.offset + d.span.length <= text.size());
    CHECK_FALSE(d.expected.empty());
  }
  auto lex = parse_document("agents A;\nstates q0 $;\n");
  const auto* d = find_kind(lex.diagnostics, DiagKind::LexError);
  REQUIRE(d);
  CHECK(d->span.line == 2);
  CHECK(d->span.column == 11);
}

TEST_CASE("duplicate definitions") {
  auto r = load("agents A, A;\nstates q0*;\nactions x;\navail q0 A {x};\noutcome q0 (x) -> q0;\n");
  const auto* d = find_kind(r.diagnostics, DiagKind::DuplicateDefinition);
  REQUIRE(d);
  CHECK(d->span.line == 1);
  CHECK(d->span.column == 11);
  auto two = load(std::string(kSelfLoop) + "policy sanction money sv=1;\npolicy sanction money sv=2;\n");
  CHECK(find_kind(two.diagnostics, DiagKind::DuplicateDefinition));
}

TEST_CASE("repair policy with cv >= sv is rejected") {
  std::string text = kTwoAgents;
  text.replace(text.find("cv=2 sv=5"), 9, "cv=5 sv=2");
  auto r = load(text, "bad.iss");
  CHECK_FALSE(r.value);
  const auto* d = find_kind(r.diagnostics, DiagKind::InvalidPolicy);
  REQUIRE(d);
  CHECK(d->message.find("cv < sv") != std::string::npos);
  CHECK(slice(text, d->span) == "5");
  std::string equal = kTwoAgents;
  equal.replace(equal.find("cv=2 sv=5"), 9, "cv=5 sv=5");
  CHECK_FALSE(load(equal).value);
}

TEST_CASE("policy checks") {
  std::string base = kSelfLoop;
  CHECK_FALSE(load(base + "policy sanction money sv=0;").value);
  CHECK_FALSE(load(base + "policy sanction gold sv=1;").value);
  CHECK_FALSE(load(base + "policy sanction money sv=1 attribution=random;").value);
  CHECK(load(base + "policy sanction money sv=1 attribution=collective;").value->sanction->attribution ==
        SanctionAttribution::Collective);
  CHECK_FALSE(load(base + "policy repair cv=1 sv=2 action=noop;").value);  // no window
  CHECK(has_errors(parse_document(base + "policy repair cv=1 cv=1 sv=2 w=1 action=noop;").diagnostics));
}

TEST_CASE("missing cost is a warning with a zero default") {
  const std::string text = "agents A;\nresources money;\nstates q0*;\nactions x;\navail q0 A {x};\noutcome q0 (x) -> q0;\n";
  auto r = load(text);
  REQUIRE(r.value);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].severity == Severity::Warning);
  CHECK(r.value->model.action_cost(StateId(0), AgentId(0), ActionId(0)) == ResourceVector{0});
}

TEST_CASE("model errors are forwarded with a span") {
  const std::string text = "agents A;\nstates q0*, q1;\nactions x, y;\navail q0 A {x};\navail q1 A {x};\n"
                           "outcome q0 (x) -> q1;\noutcome q0 (y) -> q1;\noutcome q1 (x) -> q0;\n";
  auto r = load(text);
  CHECK_FALSE(r.value);
  const auto* d = find_kind(r.diagnostics, DiagKind::InvalidModel);
  REQUIRE(d);
  CHECK(d->span.line == 7);

  auto missing = load("agents A;\nstates q0*, q1;\nactions x;\navail q0 A {x};\navail q1 A {x};\noutcome q0 (x) -> q1;\n");
  CHECK_FALSE(missing.value);
  const auto* m = find_kind(missing.diagnostics, DiagKind::InvalidModel);
  REQUIRE(m);
  CHECK(m->span.line == 2);
}

TEST_CASE("norm lowering errors") {
  std::string base = kTwoAgents;
  auto with_norm = [&](const std::string& norm) {
    std::string t = base.substr(0, base.find("norm N1"));
    return load(t + norm);
  };
  CHECK(find_kind(with_norm("norm N { state s ok; on _ / _ -> stay; }").diagnostics, DiagKind::InvalidNorm));
  CHECK(find_kind(with_norm("norm N { state s ok init; state t ok init; on _ / _ -> stay; }").diagnostics,
                  DiagKind::InvalidNorm));
  CHECK(find_kind(with_norm("norm N { state s ok init; on q0 / _ -> stay; }").diagnostics, DiagKind::InvalidNorm));
  CHECK(find_kind(with_norm("norm N { state s ok init; on _ / (send) -> stay; on _ / _ -> stay; }").diagnostics,
                  DiagKind::InvalidNorm));
  CHECK(find_kind(with_norm("norm N { state s ok init; on _ / _ -> t; }").diagnostics,
                  DiagKind::UnknownIdentifier));
  CHECK(find_kind(with_norm("norm N { state s ok init; state s violation; on _ / _ -> stay; }").diagnostics,
                  DiagKind::DuplicateDefinition));
}

TEST_CASE("wildcard rules follow first-match order") {
  auto l = must_load(kTwoAgents);
  const Model& m = l.model;
  const NormMonitor& lowered = *l.find_norm("N1");
  // One explicit rule per (state, joint action) written out by hand.
  auto A = [&](const char* n) { return *m.find_action(n); };
  auto pat = [&](const char* a, const char* b) {
    return ActionPattern{std::vector<ActionPattern::AgentSlot>{std::vector<ActionId>{A(a)}, std::vector<ActionId>{A(b)}}};
  };
  const MonitorStateId s0(0), bad(1);
  std::vector<MonitorRule> rules;
  auto at = [&](const char* q) { return StatePattern{std::vector<StateId>{*m.find_state(q)}}; };
  rules.push_back({std::nullopt, at("q0"), pat("send", "noop"), bad});
  rules.push_back({std::nullopt, at("q0"), pat("send", "recv"), s0});
  rules.push_back({std::nullopt, at("q0"), pat("noop", "recv"), std::nullopt});
  rules.push_back({std::nullopt, at("q0"), pat("noop", "noop"), std::nullopt});
  rules.push_back({std::nullopt, at("q1"), pat("noop", "noop"), std::nullopt});
  rules.push_back({std::nullopt, at("q1"), pat("pay", "noop"), std::nullopt});
  NormMonitor hand("N1", lowered.states(), s0, rules);
  CompiledMonitor a(m, lowered), b(m, hand);
  std::size_t compared = 0;
  for (std::size_t ms = 0; ms < lowered.size(); ++ms)
    for (std::size_t q = 0; q < m.state_count(); ++q)
      for (std::size_t k = 0; k < m.joint_count(StateId(q)); ++k) {
        CHECK(a.next(MonitorStateId(ms), StateId(q), k) == b.next(MonitorStateId(ms), StateId(q), k));
        ++compared;
      }
  CHECK(compared == 12);
  // The (send, recv) step is caught by the second rule, not the first.
  const auto k = *m.joint_index(StateId(0), JointAction{{A("send"), A("recv")}});
  CHECK(a.rule(s0, StateId(0), k) == std::optional<std::size_t>(1));
  CHECK_FALSE(a.enters_violation(s0, StateId(0), k));
}

TEST_CASE("strategy files") {
  auto l = must_load(kTwoAgents);
  auto s = parse_strategy("start q0;\nplay q0 A send;\nplay q0 B noop;\nplay q1 A noop;\nplay q1 B noop;\n");
  REQUIRE(s.document);
  auto ls = lower_strategy(l.model, *s.document);
  REQUIRE(ls.value);
  CHECK(ls.value->profile.size() == 4);
  CHECK(ls.value->starts == std::vector<StateId>{StateId(0)});

  auto dup = parse_strategy("play q0 A send;\nplay q0 A noop;\n");
  REQUIRE(dup.document);
  CHECK(find_kind(lower_strategy(l.model, *dup.document).diagnostics, DiagKind::DuplicateDefinition));
  auto bad = parse_strategy("play q1 A send;\n");
  REQUIRE(bad.document);
  CHECK_FALSE(lower_strategy(l.model, *bad.document).value);
  auto none = parse_strategy("");
  REQUIRE(none.document);
  CHECK(lower_strategy(l.model, *none.document).value->starts == l.model.initial_states());
}

TEST_CASE("queries") {
  auto l = must_load(kTwoAgents);
  const Model& m = l.model;
  auto lowered = [&](const std::string& text) {
    auto p = parse_query(text);
    for (const auto& d : p.diagnostics) FAIL_CHECK(format_diagnostic(d, text));
    REQUIRE(p.query);
    return lower_query(m, *p.query);
  };
  auto f = lowered("<<A budget=[1,0]>> F {q1}");
  REQUIRE(f.query);
  CHECK(f.query->op == TemporalOp::Eventually);
  CHECK(f.query->coalition == AgentSet{AgentId(0)});
  CHECK(f.query->budget == ResourceVector{1, 0});
  CHECK(f.query->target == std::vector<StateId>{StateId(1)});

  auto u = lowered("<<C1: A, B>> {q0} U q1 from q0");
  REQUIRE(u.query);
  CHECK(u.query->op == TemporalOp::Until);
  CHECK(u.query->budget == ResourceVector{0, 0});
  CHECK(u.query->hold == std::vector<StateId>{StateId(0)});
  CHECK(u.query->start == std::optional<StateId>(StateId(0)));

  auto g = lowered("<<>> G _");
  REQUIRE(g.query);
  CHECK(g.query->target.size() == m.state_count());

  auto dims = lowered("<<A budget=[1]>> X q0");
  CHECK_FALSE(dims.query);
  CHECK(find_kind(dims.diagnostics, DiagKind::QuerySyntax));
  CHECK(find_kind(lowered("<<Z>> F q0").diagnostics, DiagKind::UnknownIdentifier));

  auto syntax = parse_query("<<A>> Q q0");
  CHECK_FALSE(syntax.query);
  REQUIRE_FALSE(syntax.diagnostics.empty());
  CHECK(syntax.diagnostics[0].kind == DiagKind::QuerySyntax);
  // `Q` reads as the left operand of U, so the operator is missing at `q0`.
  CHECK(syntax.diagnostics[0].span.column == 9);
}
