#pragma once

// Small hand-built models shared by the unit tests.

#include <stdexcept>
#include <string>
#include <vector>

#include "iss/model.hpp"

namespace iss::testing {

class Builder {
public:
  Builder(std::vector<std::string> agents, std::vector<std::string> resources, std::vector<std::string> states,
          std::vector<std::string> actions) {
    d_.agents = std::move(agents);
    d_.resources = std::move(resources);
    d_.states = std::move(states);
    d_.actions = std::move(actions);
  }

  Builder& initial(const std::string& q) {
    d_.initial_states.push_back(state(q));
    return *this;
  }
  Builder& avail(const std::string& q, const std::string& a, const std::vector<std::string>& acts) {
    ModelDraft::Availability e{state(q), agent(a), {}};
    for (const auto& x : acts) e.actions.push_back(action(x));
    d_.availability.push_back(std::move(e));
    return *this;
  }
  Builder& cost(const std::string& q, const std::string& a, const std::string& act, ResourceVector amount) {
    d_.costs.push_back({state(q), agent(a), action(act), std::move(amount)});
    return *this;
  }
  Builder& outcome(const std::string& q, const std::vector<std::string>& joint, const std::string& target) {
    d_.outcomes.push_back({state(q), this->joint(joint), state(target)});
    return *this;
  }

  JointAction joint(const std::vector<std::string>& acts) const {
    JointAction j;
    for (const auto& x : acts) j.choices.push_back(action(x));
    return j;
  }

  const ModelDraft& draft() const { return d_; }
  ModelDraft& draft() { return d_; }

  Model build() const {
    auto r = validate_model(d_);
    if (!r.model) {
      std::string msg = "fixture is invalid:";
      for (const auto& v : r.report.issues) msg += " " + v.message + ";";
      throw std::logic_error(msg);
    }
    return std::move(*r.model);
  }

  StateId state(const std::string& n) const { return StateId(find(d_.states, n)); }
  AgentId agent(const std::string& n) const { return AgentId(find(d_.agents, n)); }
  ActionId action(const std::string& n) const { return ActionId(find(d_.actions, n)); }

private:
  static std::size_t find(const std::vector<std::string>& v, const std::string& n) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == n) return i;
    throw std::logic_error("fixture names unknown identifier " + n);
  }

  ModelDraft d_;
};

/// One agent, one state, one action `noop` looping on q0.
inline Builder self_loop() {
  Builder b({"a0"}, {"money"}, {"q0"}, {"noop"});
  b.initial("q0").avail("q0", "a0", {"noop"}).outcome("q0", {"noop"}, "q0");
  return b;
}

/// One agent toggling between q0 and q1 with `go`.
inline Builder toggle() {
  Builder b({"a0"}, {"money"}, {"q0", "q1"}, {"go"});
  b.initial("q0")
      .avail("q0", "a0", {"go"})
      .avail("q1", "a0", {"go"})
      .outcome("q0", {"go"}, "q1")
      .outcome("q1", {"go"}, "q0");
  return b;
}

/// q0 -> q1 -> q2 with a self-loop on q2, plus an isolated q3.
inline Builder chain() {
  Builder b({"a0"}, {"money"}, {"q0", "q1", "q2", "q3"}, {"go"});
  b.initial("q0");
  for (auto q : {"q0", "q1", "q2", "q3"}) b.avail(q, "a0", {"go"});
  b.outcome("q0", {"go"}, "q1").outcome("q1", {"go"}, "q2").outcome("q2", {"go"}, "q2").outcome("q3", {"go"}, "q3");
  return b;
}

/// One state, one agent choosing between `safe` and `dump`; dump costs 1 money.
inline Builder dump_model() {
  Builder b({"a0"}, {"money", "waste"}, {"q0"}, {"safe", "dump"});
  b.initial("q0")
      .avail("q0", "a0", {"safe", "dump"})
      .cost("q0", "a0", "dump", {1, 3})
      .outcome("q0", {"safe"}, "q0")
      .outcome("q0", {"dump"}, "q0");
  return b;
}

/// One state, one agent with actions beta and gamma (single-letter free names).
inline Builder two_action_single_state() {
  Builder b({"a0"}, {"money"}, {"q0"}, {"beta", "gamma"});
  b.initial("q0")
      .avail("q0", "a0", {"beta", "gamma"})
      .outcome("q0", {"beta"}, "q0")
      .outcome("q0", {"gamma"}, "q0");
  return b;
}

}  // namespace iss::testing
