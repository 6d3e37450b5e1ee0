#include "doctest.h"

#include <algorithm>
#include <set>

#include "fixtures.hpp"
#include "iss/behavior.hpp"

using namespace iss;
using iss::testing::Builder;

namespace {

// Counts lassos by trying every split of every joint-action word; shares no
// code with the walker under test.
std::size_t count_lassos_by_words(const Model& m, StateId start, std::size_t bound) {
  std::size_t alphabet = 1;
  for (std::size_t q = 0; q < m.state_count(); ++q) alphabet = std::max(alphabet, m.joint_count(StateId(q)));
  std::size_t count = 0;
  for (std::size_t len = 1; len <= bound; ++len) {
    std::size_t words = 1;
    for (std::size_t i = 0; i < len; ++i) words *= alphabet;
    for (std::size_t w = 0; w < words; ++w) {
      std::vector<StateId> states{start};
      std::size_t rest = w;
      bool legal = true;
      for (std::size_t i = 0; i < len && legal; ++i) {
        const std::size_t k = rest % alphabet;
        rest /= alphabet;
        if (k >= m.joint_count(states.back())) legal = false;
        else states.push_back(m.successor(states.back(), k));
      }
      if (!legal) continue;
      for (std::size_t stem = 0; stem < len; ++stem)
        if (states[len] == states[stem]) ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("extend_trace") {
  auto loop = iss::testing::self_loop();
  auto m = loop.build();
  Trace t(StateId(0));
  t = extend_trace(m, t, loop.joint({"noop"}));
  CHECK(t.size() == 1);
  CHECK(t.end == StateId(0));

  auto tb = iss::testing::toggle();
  auto tm = tb.build();
  Trace u(StateId(0));
  u = extend_trace(tm, u, tb.joint({"go"}));
  u = extend_trace(tm, u, tb.joint({"go"}));
  CHECK(u.states(tm) == std::vector<StateId>{StateId(0), StateId(1), StateId(0)});
  CHECK_NOTHROW(check_trace(tm, u));

  auto dm = iss::testing::dump_model().build();
  CHECK_THROWS_AS(extend_trace(dm, Trace(StateId(0)), JointAction{{ActionId(7)}}), Error);
}

TEST_CASE("lasso_from_strategy") {
  SUBCASE("self loop") {
    auto b = iss::testing::self_loop();
    auto m = b.build();
    StrategyProfile p{{{AgentId(0), StateId(0)}, b.action("noop")}};
    auto l = lasso_from_strategy(m, p, StateId(0));
    CHECK(l.stem.empty());
    REQUIRE(l.cycle.size() == 1);
    CHECK(l.cycle[0].source == StateId(0));
  }
  SUBCASE("toggle has period two") {
    auto b = iss::testing::toggle();
    auto m = b.build();
    StrategyProfile p{{{AgentId(0), StateId(0)}, b.action("go")}, {{AgentId(0), StateId(1)}, b.action("go")}};
    auto l = lasso_from_strategy(m, p, StateId(0));
    CHECK(l.stem.empty());
    REQUIRE(l.cycle.size() == 2);
    CHECK(l.cycle[0].source == StateId(0));
    CHECK(l.cycle[1].source == StateId(1));
  }
  SUBCASE("chain: stem 2, cycle 1") {
    auto b = iss::testing::chain();
    auto m = b.build();
    StrategyProfile p;
    for (std::size_t q = 0; q < 4; ++q) p[{AgentId(0), StateId(q)}] = b.action("go");
    auto l = lasso_from_strategy(m, p, StateId(0));
    CHECK(l.stem.size() == 2);
    CHECK(l.cycle.size() == 1);
    CHECK(l.cycle[0].source == StateId(2));
    CHECK(lasso_from_strategy(m, p, StateId(0)) == l);
    CHECK_NOTHROW(check_lasso(m, l));
  }
  SUBCASE("incomplete profile") {
    auto b = iss::testing::toggle();
    auto m = b.build();
    StrategyProfile p{{{AgentId(0), StateId(0)}, b.action("go")}};
    try {
      lasso_from_strategy(m, p, StateId(0));
      FAIL("expected IncompleteProfile");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IncompleteProfile);
    }
  }
}

TEST_CASE("cumulative_cost") {
  Builder b({"a0", "a1"}, {"r0", "r1"}, {"q0", "q1"}, {"x", "y"});
  b.initial("q0");
  for (auto q : {"q0", "q1"}) b.avail(q, "a0", {"x"}).avail(q, "a1", {"y"});
  b.cost("q0", "a0", "x", {1, 0}).cost("q1", "a0", "x", {0, 2}).cost("q0", "a1", "y", {5, 5});
  b.outcome("q0", {"x", "y"}, "q1").outcome("q1", {"x", "y"}, "q0");
  auto m = b.build();
  Trace t(StateId(0));
  AgentSet a0{AgentId(0)};
  CHECK(cumulative_cost(m, t, a0) == ResourceVector{0, 0});
  t = extend_trace(m, t, b.joint({"x", "y"}));
  t = extend_trace(m, t, b.joint({"x", "y"}));
  CHECK(cumulative_cost(m, t, a0) == ResourceVector{1, 2});
  CHECK(cumulative_cost(m, t, AgentSet{AgentId(0), AgentId(1)}) == ResourceVector{6, 7});

  // Additivity over concatenation.
  Trace first(StateId(0));
  first = extend_trace(m, first, b.joint({"x", "y"}));
  Trace second(StateId(1));
  second = extend_trace(m, second, b.joint({"x", "y"}));
  CHECK(cumulative_cost(m, t, a0) == cumulative_cost(m, first, a0) + cumulative_cost(m, second, a0));
}

TEST_CASE("feasible_under_budget checks every prefix") {
  Builder b({"a0"}, {"money"}, {"q0"}, {"pay", "free"});
  b.initial("q0").avail("q0", "a0", {"pay", "free"}).cost("q0", "a0", "pay", {1}).cost("q0", "a0", "free", {0});
  b.outcome("q0", {"pay"}, "q0").outcome("q0", {"free"}, "q0");
  auto m = b.build();
  Trace zero(StateId(0));
  zero = extend_trace(m, extend_trace(m, zero, b.joint({"free"})), b.joint({"free"}));
  CHECK(feasible_under_budget(m, zero, Budget::uniform(m, {0})).feasible);

  Trace two(StateId(0));
  two = extend_trace(m, extend_trace(m, two, b.joint({"pay"})), b.joint({"pay"}));
  CHECK(feasible_under_budget(m, two, Budget::uniform(m, {2})).feasible);
  auto f = feasible_under_budget(m, two, Budget::uniform(m, {1}));
  CHECK_FALSE(f.feasible);
  CHECK(f.step == 1u);
  CHECK(f.resource == 0u);

  Builder c({"a0"}, {"money"}, {"q0"}, {"big"});
  c.initial("q0").avail("q0", "a0", {"big"}).cost("q0", "a0", "big", {2}).outcome("q0", {"big"}, "q0");
  auto cm = c.build();
  auto g = feasible_under_budget(cm, extend_trace(cm, Trace(StateId(0)), c.joint({"big"})), Budget::uniform(cm, {1}));
  CHECK_FALSE(g.feasible);
  CHECK(g.step == 0u);
  CHECK(g.resource == 0u);

  // Enlarging the endowment never breaks feasibility.
  for (std::int64_t e = 0; e < 5; ++e) {
    bool before = feasible_under_budget(m, two, Budget::uniform(m, {e})).feasible;
    bool after = feasible_under_budget(m, two, Budget::uniform(m, {e + 1})).feasible;
    CHECK((!before || after));
  }
}

TEST_CASE("enumerate_lassos") {
  SUBCASE("self loop, bound 1") {
    auto m = iss::testing::self_loop().build();
    CHECK(enumerate_lassos(m, StateId(0), 1).size() == 1);
  }
  SUBCASE("toggle, bound 2") {
    auto m = iss::testing::toggle().build();
    auto ls = enumerate_lassos(m, StateId(0), 2);
    REQUIRE(ls.size() == 1);
    CHECK(ls[0].stem.empty());
    CHECK(ls[0].cycle.size() == 2);
  }
  SUBCASE("one state, two actions, bound 2") {
    auto m = iss::testing::two_action_single_state().build();
    auto ls = enumerate_lassos(m, StateId(0), 2);
    // 2 cycles of length one, 4 of length two, 2 x 2 stem-plus-cycle.
    CHECK(ls.size() == 10);
    CHECK(ls.size() == count_lassos_by_words(m, StateId(0), 2));
    std::set<std::pair<std::vector<Step>, std::vector<Step>>> distinct;
    for (const auto& l : ls) distinct.insert({l.stem.steps, l.cycle});
    CHECK(distinct.size() == ls.size());
    for (std::size_t i = 1; i < ls.size(); ++i) CHECK(ls[i - 1].stem.size() <= ls[i].stem.size());
  }
  SUBCASE("agrees with word enumeration on a two-agent model") {
    Builder b({"a", "b"}, {}, {"q0", "q1", "q2"}, {"x", "y"});
    b.initial("q0");
    for (auto q : {"q0", "q1", "q2"}) b.avail(q, "a", {"x", "y"}).avail(q, "b", {"x"});
    b.outcome("q0", {"x", "x"}, "q1").outcome("q0", {"y", "x"}, "q0");
    b.outcome("q1", {"x", "x"}, "q2").outcome("q1", {"y", "x"}, "q0");
    b.outcome("q2", {"x", "x"}, "q2").outcome("q2", {"y", "x"}, "q1");
    auto m = b.build();
    for (std::size_t bound = 1; bound <= 5; ++bound) {
      auto ls = enumerate_lassos(m, StateId(0), bound);
      CHECK(ls.size() == count_lassos_by_words(m, StateId(0), bound));
      for (const auto& l : ls) {
        CHECK_NOTHROW(check_lasso(m, l));
        for (std::size_t k = 1; k <= 3; ++k) CHECK_NOTHROW(check_trace(m, l.unroll(m, k)));
      }
    }
  }
}

TEST_CASE("dump format") {
  auto b = iss::testing::toggle();
  auto m = b.build();
  StrategyProfile p{{{AgentId(0), StateId(0)}, b.action("go")}, {{AgentId(0), StateId(1)}, b.action("go")}};
  auto l = lasso_from_strategy(m, p, StateId(0));
  CHECK(format_lasso(m, l) == "repeat:\nq0 --(a0:go)--> q1\nq1 --(a0:go)--> q0\n");
}
