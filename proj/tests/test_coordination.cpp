#include "doctest.h"

#include <random>

#include "fixtures.hpp"
#include "iss/coordination.hpp"
#include "support.hpp"

using namespace iss;
using iss::testing::Builder;

namespace {

NormMonitor universal_ok() {
  return NormMonitor("any", {{"ok", MonitorStatus::Ok}}, MonitorStateId(0), {MonitorRule{}});
}

/// Two agents at a single state; only both dumping together is banned.
Builder joint_dump() {
  Builder b({"a", "b"}, {"money"}, {"q0"}, {"safe", "dump"});
  b.initial("q0").avail("q0", "a", {"safe", "dump"}).avail("q0", "b", {"safe", "dump"});
  for (auto x : {"safe", "dump"})
    for (auto y : {"safe", "dump"}) b.outcome("q0", {x, y}, "q0");
  return b;
}

NormMonitor joint_ban(const Builder& b) {
  std::vector<ActionPattern::AgentSlot> slots{std::vector<ActionId>{b.action("dump")},
                                              std::vector<ActionId>{b.action("dump")}};
  return NormMonitor("no_joint_dump", {{"ok", MonitorStatus::Ok}, {"bad", MonitorStatus::Violation}},
                     MonitorStateId(0),
                     {MonitorRule{std::nullopt, {}, ActionPattern{slots}, MonitorStateId(1)}, MonitorRule{}});
}

Builder repairable() {
  Builder b({"a0"}, {"money"}, {"q0"}, {"safe", "dump", "repair"});
  b.initial("q0").avail("q0", "a0", {"safe", "dump", "repair"}).cost("q0", "a0", "repair", {3});
  for (auto x : {"safe", "dump", "repair"}) b.outcome("q0", {x}, "q0");
  return b;
}

std::size_t compliant_count(const Model& m, const NormMonitor& mon, std::size_t bound) {
  std::size_t n = 0;
  for (auto q0 : m.initial_states())
    for (const auto& l : enumerate_lassos(m, q0, bound))
      if (!iss::testing::oracle_first_violation(mon, l)) ++n;
  return n;
}

}  // namespace

TEST_CASE("regiment: universal monitor changes nothing") {
  auto m = iss::testing::toggle().build();
  auto r = regiment(m, universal_ok());
  CHECK(r.report.pruned.empty());
  CHECK(r.product.collapsed);
  CHECK(r.product.model.state_count() == m.state_count());
  CHECK(r.product.model.transition_count() == m.transition_count());
  CHECK(r.product.model.state_names() == m.state_names());
}

TEST_CASE("regiment: banning dump") {
  auto b = iss::testing::dump_model();
  auto m = b.build();
  auto mon = action_norm(m, {{b.state("q0"), b.agent("a0"), b.action("dump")}});
  auto r = regiment(m, mon);
  REQUIRE(r.report.pruned.size() == 1);
  CHECK(r.report.pruned[0].action == b.joint({"dump"}));
  CHECK(r.report.pruned[0].forced);
  CHECK_FALSE(r.report.lost_compliant_behaviors);
  const auto& pm = r.product.model;
  REQUIRE(pm.state_count() == 1);
  auto left = pm.available(StateId(0), AgentId(0));
  CHECK(std::vector<ActionId>(left.begin(), left.end()) == std::vector<ActionId>{b.action("safe")});
  CHECK_FALSE(exists_violation(pm, lift_monitor(mon, r.product)).exists);
  CHECK(exists_violation(m, mon).exists);

  auto audit = audit_regimentation(m, mon, r, 4);
  CHECK(audit.violation_before);
  CHECK_FALSE(audit.violation_after);
  CHECK(audit.unsound_lassos == 0u);
  CHECK(audit.census.compliant_after == audit.census.compliant_before);
  CHECK(audit.census.compliant_before == compliant_count(m, mon, 4));
}

TEST_CASE("regiment: ordering norm keeps beta before gamma") {
  auto b = iss::testing::two_action_single_state();
  auto m = b.build();
  auto slot = [&](const char* a) {
    return ActionPattern{std::vector<ActionPattern::AgentSlot>{std::vector<ActionId>{b.action(a)}}};
  };
  NormMonitor mon("order", {{"fresh", MonitorStatus::Ok}, {"seen", MonitorStatus::Ok}, {"bad", MonitorStatus::Violation}},
                  MonitorStateId(0),
                  {{std::vector<MonitorStateId>{MonitorStateId(0)}, {}, slot("gamma"), MonitorStateId(1)},
                   {std::vector<MonitorStateId>{MonitorStateId(1)}, {}, slot("beta"), MonitorStateId(2)},
                   {}});
  auto r = regiment(m, mon);
  CHECK_FALSE(r.product.collapsed);
  CHECK(r.product.model.state_count() == 2);
  // beta then gamma forever is still possible.
  Lasso l;
  l.stem = extend_trace(m, Trace(StateId(0)), b.joint({"beta"}));
  l.cycle = {Step{StateId(0), b.joint({"gamma"})}};
  CHECK(lift_lasso(r.product, l).has_value());
  auto audit = audit_regimentation(m, mon, r, 4);
  CHECK_FALSE(audit.violation_after);
  CHECK(audit.unsound_lassos == 0u);
  CHECK(audit.census.compliant_after == audit.census.compliant_before);
}

TEST_CASE("regiment: a joint ban over-restricts") {
  auto b = joint_dump();
  auto m = b.build();
  auto mon = joint_ban(b);
  auto r = regiment(m, mon);
  CHECK(r.report.lost_compliant_behaviors);
  CHECK(r.report.pruned.size() == 2);
  auto audit = audit_regimentation(m, mon, r, 4);
  CHECK_FALSE(audit.violation_after);
  CHECK(audit.unsound_lassos == 0u);
  CHECK(audit.census.compliant_after < audit.census.compliant_before);
  CHECK(audit.census.compliant_before == compliant_count(m, mon, 4));
}

TEST_CASE("regiment: unenforceable norm") {
  Builder b({"a0"}, {"money"}, {"q0"}, {"dump"});
  b.initial("q0").avail("q0", "a0", {"dump"}).outcome("q0", {"dump"}, "q0");
  auto m = b.build();
  try {
    regiment(m, action_norm(m, {{StateId(0), AgentId(0), ActionId(0)}}));
    FAIL("expected NormUnenforceable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NormUnenforceable);
  }
}

TEST_CASE("regiment: soundness and conservativity on random models") {
  std::mt19937_64 rng(23);
  int enforced = 0;
  for (int i = 0; i < 120; ++i) {
    auto m = iss::testing::random_model(rng);
    auto mon = iss::testing::random_monitor(rng, m);
    std::optional<Regimentation> r;
    try {
      r = regiment(m, mon);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NormUnenforceable);
      continue;
    }
    ++enforced;
    CHECK(r->report.deadlocked_states.empty());
    CHECK_FALSE(iss::testing::oracle_violation_reachable(r->product.model, lift_monitor(mon, r->product)));
    for (auto q0 : r->product.model.initial_states())
      for (const auto& l : enumerate_lassos(r->product.model, q0, 3))
        CHECK_FALSE(iss::testing::oracle_first_violation(mon, project_lasso(m, r->product, l)).has_value());
  }
  CHECK(enforced > 30);
}

TEST_CASE("sanction: universal monitor keeps costs") {
  auto b = iss::testing::dump_model();
  auto m = b.build();
  auto s = sanction(m, universal_ok(), SanctionPolicy{ResourceId(0), 5});
  CHECK(s.charged.empty());
  CHECK(s.product.model.declared_costs() == m.declared_costs());
}

TEST_CASE("sanction: dump cost rises by sv") {
  auto b = iss::testing::dump_model();
  auto m = b.build();
  auto mon = action_norm(m, {{b.state("q0"), b.agent("a0"), b.action("dump")}});
  SanctionPolicy p{ResourceId(0), 5};
  auto s = sanction(m, mon, p);
  const auto& pm = s.product.model;
  REQUIRE(s.product.collapsed);
  CHECK(pm.action_cost(StateId(0), AgentId(0), b.action("dump")) == ResourceVector{6, 3});
  CHECK(pm.action_cost(StateId(0), AgentId(0), b.action("safe")) == ResourceVector{0, 0});
  REQUIRE(s.charged.size() == 1);
  CHECK(s.charged[0].exact);
  CHECK(pm.transition_count() == m.transition_count());

  auto audit = audit_sanction(m, mon, p, s, 4);
  CHECK(audit.violation_before);
  CHECK(audit.violation_after);
  CHECK(audit.accounting_mismatches == 0u);
  CHECK(audit.min_extra_money >= 5);
  CHECK(audit.violating_lassos > 0u);
  CHECK(audit.census.compliant_after == audit.census.compliant_before);

  CHECK_THROWS_AS(sanction(m, mon, SanctionPolicy{ResourceId(0), 0}), Error);
  CHECK_THROWS_AS(sanction(m, mon, SanctionPolicy{ResourceId(4), 1}), Error);
}

TEST_CASE("sanction: joint ban charges both or the collective") {
  auto b = joint_dump();
  auto m = b.build();
  auto mon = joint_ban(b);
  auto s = sanction(m, mon, SanctionPolicy{ResourceId(0), 2});
  // Both slots constrained, each dump is charged but only paid fully on (dump, dump).
  CHECK(s.charged.size() == 2);
  for (const auto& c : s.charged) CHECK_FALSE(c.exact);
  auto audit = audit_sanction(m, mon, SanctionPolicy{ResourceId(0), 2}, s, 3);
  CHECK(audit.inexact_charges == 2u);
  CHECK(audit.accounting_mismatches > 0u);

  auto any = NormMonitor("any_dump", {{"ok", MonitorStatus::Ok}, {"bad", MonitorStatus::Violation}},
                         MonitorStateId(0),
                         {MonitorRule{std::nullopt, {}, ActionPattern{std::vector<ActionPattern::AgentSlot>{
                                                             std::vector<ActionId>{b.action("dump")}, std::nullopt}},
                                      MonitorStateId(1)},
                          MonitorRule{}});
  SanctionPolicy collective{ResourceId(0), 2, SanctionAttribution::Collective};
  auto c = sanction(m, any, collective);
  // a:dump plus b's two actions; b's charges also hit compliant steps.
  CHECK(c.charged.size() == 3);
  auto ca = audit_sanction(m, any, collective, c, 3);
  CHECK(ca.inexact_charges == 2u);
  CHECK(ca.accounting_mismatches > 0u);
  auto triggering = sanction(m, any, SanctionPolicy{ResourceId(0), 2});
  CHECK(triggering.charged.size() == 1);
  CHECK(audit_sanction(m, any, SanctionPolicy{ResourceId(0), 2}, triggering, 3).accounting_mismatches == 0u);
}

TEST_CASE("sanction: structure preserved on random models") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    auto m = iss::testing::random_model(rng);
    if (m.resource_count() == 0) continue;
    auto mon = iss::testing::random_monitor(rng, m);
    SanctionPolicy p{ResourceId(0), 4};
    auto s = sanction(m, mon, p);
    const auto& pm = s.product.model;
    for (std::size_t i2 = 0; i2 < pm.state_count(); ++i2) {
      const StateId ps(i2);
      const StateId q = s.product.origin[i2].state;
      CHECK(pm.joint_count(ps) == m.joint_count(q));
      for (std::size_t k = 0; k < pm.joint_count(ps); ++k) {
        CHECK(pm.joint_at(ps, k) == m.joint_at(q, k));
        CHECK(s.product.origin[pm.successor(ps, k).index()].state == m.successor(q, k));
      }
      for (std::size_t a = 0; a < m.agent_count(); ++a)
        for (auto act : pm.available(ps, AgentId(a))) {
          auto before = m.action_cost(q, AgentId(a), act);
          auto after = pm.action_cost(ps, AgentId(a), act);
          auto diff = after[0] - before[0];
          CHECK((diff == 0 || diff == 4));
          for (std::size_t r = 1; r < m.resource_count(); ++r) CHECK(after[r] == before[r]);
        }
    }
  }
}

TEST_CASE("reparation policy checks") {
  auto b = repairable();
  auto m = b.build();
  try {
    check_reparation_policy(ReparationPolicy{3, 2, 1, b.action("repair"), ResourceId(0)});
    FAIL("expected InvalidPolicy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidPolicy);
  }
  CHECK_THROWS_AS(check_reparation_policy(ReparationPolicy{2, 2, 1, b.action("repair"), ResourceId(0)}), Error);
  CHECK_THROWS_AS(check_reparation_policy(ReparationPolicy{1, 2, 0, b.action("repair"), ResourceId(0)}), Error);
  CHECK_NOTHROW(check_reparation_policy(m, ReparationPolicy{3, 5, 1, b.action("repair"), ResourceId(0)}));
  // repair costs 3 < cv = 4.
  CHECK_THROWS_AS(check_reparation_policy(m, ReparationPolicy{4, 5, 1, b.action("repair"), ResourceId(0)}), Error);
  CHECK_THROWS_AS(check_reparation_policy(m, ReparationPolicy{1, 5, 1, b.action("repair"), std::nullopt}), Error);
}

TEST_CASE("repair_extend: window of one") {
  auto b = repairable();
  auto m = b.build();
  auto mon = action_norm(m, {{b.state("q0"), b.agent("a0"), b.action("dump")}});
  ReparationPolicy p{3, 5, 1, b.action("repair"), ResourceId(0)};
  auto ext = repair_extend(m, mon, p);
  CHECK(ext.size() == mon.size() + 1);

  Lasso repaired;
  repaired.stem = extend_trace(m, extend_trace(m, Trace(StateId(0)), b.joint({"dump"})), b.joint({"repair"}));
  repaired.cycle = {Step{StateId(0), b.joint({"safe"})}};
  CHECK(classify_lasso(m, mon, repaired).violating());
  CHECK_FALSE(classify_lasso(m, ext, repaired).violating());

  Lasso late;
  late.stem = extend_trace(m, extend_trace(m, Trace(StateId(0)), b.joint({"dump"})), b.joint({"safe"}));
  late.cycle = {Step{StateId(0), b.joint({"repair"})}};
  auto v = classify_lasso(m, ext, late);
  REQUIRE(v.violating());
  CHECK(v.position->step == 1u);

  auto audit = audit_reparation(m, mon, ext, p, 5);
  CHECK(audit.lost_lassos == 0u);
  CHECK(audit.repaired_lassos > 0u);
  CHECK(audit.census.compliant_after > audit.census.compliant_before);
  CHECK(audit.pending_states == 1u);
}

TEST_CASE("repair_extend: longer window") {
  auto b = repairable();
  auto m = b.build();
  auto mon = action_norm(m, {{b.state("q0"), b.agent("a0"), b.action("dump")}});
  auto ext = repair_extend(m, mon, ReparationPolicy{3, 5, 2, b.action("repair"), ResourceId(0)});
  Lasso l;
  l.stem = extend_trace(m, extend_trace(m, Trace(StateId(0)), b.joint({"dump"})), b.joint({"safe"}));
  l.cycle = {Step{StateId(0), b.joint({"repair"})}};
  CHECK_FALSE(classify_lasso(m, ext, l).violating());
  Lasso twice;
  twice.stem = Trace(StateId(0));
  twice.cycle = {Step{StateId(0), b.joint({"dump"})}, Step{StateId(0), b.joint({"repair"})}};
  CHECK_FALSE(classify_lasso(m, ext, twice).violating());
}

TEST_CASE("repair_extend is monotone on random models") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 60; ++i) {
    auto m = iss::testing::random_model(rng);
    auto mon = iss::testing::random_monitor(rng, m);
    ReparationPolicy p{1, 2, 1 + static_cast<std::size_t>(i % 2), ActionId(static_cast<std::size_t>(i) % m.action_count()),
                       std::nullopt};
    auto ext = repair_extend(m, mon, p);
    for (auto q0 : m.initial_states())
      for (const auto& l : enumerate_lassos(m, q0, 4))
        if (!iss::testing::oracle_first_violation(mon, l)) CHECK_FALSE(iss::testing::oracle_first_violation(ext, l));
  }
}
