#include "iss/behavior.hpp"

#include <sstream>

namespace iss {

std::vector<StateId> Trace::states(const Model& m) const {
  std::vector<StateId> out{start};
  for (const auto& s : steps) out.push_back(m.step(s.source, s.action));
  return out;
}

const Step& Lasso::at(std::size_t i) const {
  if (i < stem.size()) return stem.steps[i];
  return cycle[(i - stem.size()) % cycle.size()];
}

Trace Lasso::unroll(const Model& m, std::size_t k) const {
  Trace t = stem;
  for (std::size_t r = 0; r < k; ++r)
    for (const auto& s : cycle) t = extend_trace(m, t, s.action);
  return t;
}

Budget Budget::uniform(const Model& m, const ResourceVector& each) {
  return Budget{std::vector<ResourceVector>(m.agent_count(), each)};
}

Trace extend_trace(const Model& m, const Trace& t, const JointAction& sigma) {
  Trace out = t;
  const StateId next = m.step(t.end, sigma);
  out.steps.push_back(Step{t.end, sigma});
  out.end = next;
  return out;
}

void check_trace(const Model& m, const Trace& t) {
  StateId at = t.start;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    if (s.source != at)
      throw Error(ErrorCode::InvalidTrace, "step " + std::to_string(i) + " starts at " + m.state_name(s.source) +
                                               " but the trace is at " + m.state_name(at));
    if (!m.is_legal(s.source, s.action))
      throw Error(ErrorCode::InvalidTrace, "step " + std::to_string(i) + " uses an unavailable joint action");
    at = m.step(s.source, s.action);
  }
  if (at != t.end) throw Error(ErrorCode::InvalidTrace, "trace end state is stale");
}

void check_lasso(const Model& m, const Lasso& l) {
  try {
    check_trace(m, l.stem);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidLasso, std::string("stem: ") + e.what());
  }
  if (l.cycle.empty()) throw Error(ErrorCode::InvalidLasso, "cycle is empty");
  if (l.cycle.front().source != l.stem.end)
    throw Error(ErrorCode::InvalidLasso, "cycle does not start where the stem ends");
  for (std::size_t i = 0; i < l.cycle.size(); ++i) {
    const auto& s = l.cycle[i];
    if (!m.is_legal(s.source, s.action))
      throw Error(ErrorCode::InvalidLasso, "cycle step " + std::to_string(i) + " uses an unavailable joint action");
    const StateId next = m.step(s.source, s.action);
    const StateId expected = l.cycle[(i + 1) % l.cycle.size()].source;
    if (next != expected)
      throw Error(ErrorCode::InvalidLasso, "cycle step " + std::to_string(i) + " leads to " + m.state_name(next) +
                                               " instead of " + m.state_name(expected));
  }
}

Lasso lasso_from_strategy(const Model& m, const StrategyProfile& profile, StateId start) {
  if (start.index() >= m.state_count()) throw Error(ErrorCode::UnknownState, "unknown start state");
  std::vector<std::size_t> first_visit(m.state_count(), static_cast<std::size_t>(-1));
  std::vector<Step> run;
  StateId q = start;
  while (first_visit[q.index()] == static_cast<std::size_t>(-1)) {
    first_visit[q.index()] = run.size();
    JointAction sigma;
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      auto it = profile.find({AgentId(a), q});
      if (it == profile.end())
        throw Error(ErrorCode::IncompleteProfile,
                    "no action for agent " + m.agent_name(AgentId(a)) + " at state " + m.state_name(q));
      if (!m.is_available(q, AgentId(a), it->second))
        throw Error(ErrorCode::IllegalJointAction, "profile assigns " + m.agent_name(AgentId(a)) +
                                                       " an unavailable action at " + m.state_name(q));
      sigma.choices.push_back(it->second);
    }
    const StateId next = m.step(q, sigma);
    run.push_back(Step{q, std::move(sigma)});
    q = next;
  }
  const std::size_t loop_at = first_visit[q.index()];
  Lasso l;
  l.stem = Trace(start);
  for (std::size_t i = 0; i < loop_at; ++i) l.stem = extend_trace(m, l.stem, run[i].action);
  l.cycle.assign(run.begin() + static_cast<std::ptrdiff_t>(loop_at), run.end());
  return l;
}

ResourceVector cumulative_cost(const Model& m, const Trace& t, const AgentSet& group) {
  ResourceVector total = ResourceVector::zero(m.resource_count());
  for (const auto& s : t.steps) total += m.group_cost(s.source, s.action, group);
  return total;
}

Feasibility feasible_under_budget(const Model& m, const Trace& t, const Budget& b) {
  if (b.endowment.size() != m.agent_count())
    throw Error(ErrorCode::BudgetDimensionMismatch, "budget must give one endowment per agent");
  std::vector<ResourceVector> spent(m.agent_count(), ResourceVector::zero(m.resource_count()));
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& s = t.steps[i];
    for (std::size_t a = 0; a < m.agent_count(); ++a) {
      spent[a] += m.action_cost(s.source, AgentId(a), s.action[a]);
      if (auto r = spent[a].first_excess(b.endowment[a])) return Feasibility{false, i, AgentId(a), *r};
    }
  }
  return Feasibility{};
}

namespace {

class LassoWalker {
public:
  LassoWalker(const Model& m, StateId start, std::size_t max_len, const std::function<bool(const Lasso&)>& visit)
      : m_(m), start_(start), max_len_(max_len), visit_(visit) {}

  void run() {
    for (std::size_t stem_len = 0; stem_len < max_len_ && !stopped_; ++stem_len) {
      stem_len_ = stem_len;
      path_.clear();
      walk(start_);
    }
  }

private:
  void walk(StateId at) {
    if (stopped_) return;
    if (path_.size() > stem_len_ && path_[stem_len_].source == at) emit();
    if (stopped_ || path_.size() == max_len_) return;
    const std::size_t count = m_.joint_count(at);
    for (std::size_t k = 0; k < count && !stopped_; ++k) {
      path_.push_back(Step{at, m_.joint_at(at, k)});
      walk(m_.successor(at, k));
      path_.pop_back();
    }
  }

  void emit() {
    Lasso l;
    l.stem = Trace(start_);
    for (std::size_t i = 0; i < stem_len_; ++i) l.stem = extend_trace(m_, l.stem, path_[i].action);
    l.cycle.assign(path_.begin() + static_cast<std::ptrdiff_t>(stem_len_), path_.end());
    if (!visit_(l)) stopped_ = true;
  }

  const Model& m_;
  StateId start_;
  std::size_t max_len_;
  const std::function<bool(const Lasso&)>& visit_;
  std::size_t stem_len_ = 0;
  std::vector<Step> path_;
  bool stopped_ = false;
};

}  // namespace

void for_each_lasso(const Model& m, StateId start, std::size_t max_total_len,
                    const std::function<bool(const Lasso&)>& visit) {
  if (start.index() >= m.state_count()) throw Error(ErrorCode::UnknownState, "unknown start state");
  if (max_total_len == 0) throw Error(ErrorCode::InvalidArgument, "lasso length bound must be at least 1");
  LassoWalker(m, start, max_total_len, visit).run();
}

std::vector<Lasso> enumerate_lassos(const Model& m, StateId start, std::size_t max_total_len) {
  std::vector<Lasso> out;
  for_each_lasso(m, start, max_total_len, [&](const Lasso& l) {
    out.push_back(l);
    return true;
  });
  return out;
}

std::string format_step(const Model& m, const Step& s) {
  return m.state_name(s.source) + " --" + m.format_joint(s.action) + "--> " + m.state_name(m.step(s.source, s.action));
}

std::string format_trace(const Model& m, const Trace& t) {
  std::ostringstream os;
  for (const auto& s : t.steps) os << format_step(m, s) << '\n';
  return os.str();
}

std::string format_lasso(const Model& m, const Lasso& l) {
  std::ostringstream os;
  os << format_trace(m, l.stem) << "repeat:\n";
  for (const auto& s : l.cycle) os << format_step(m, s) << '\n';
  return os.str();
}

}  // namespace iss
