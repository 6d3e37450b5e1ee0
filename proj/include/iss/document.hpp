#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iss/model.hpp"
#include "iss/norms.hpp"
#include "iss/types.hpp"

namespace iss {

/// Source location carried by syntax nodes. Always compares equal, so that
/// documents compare structurally.
struct Loc {
  SourceSpan span;

  bool operator==(const Loc&) const { return true; }
};

using Ident = Spanned<std::string>;
using Number = Spanned<std::int64_t>;

struct StateDecl {
  Ident name;
  bool initial = false;

  bool operator==(const StateDecl&) const = default;
};

struct AvailDecl {
  Ident state;
  Ident agent;
  std::vector<Ident> actions;
  Loc loc;

  bool operator==(const AvailDecl&) const = default;
};

struct CostDecl {
  Ident state;
  Ident agent;
  Ident action;
  std::vector<Number> amounts;
  Loc loc;

  bool operator==(const CostDecl&) const = default;
};

struct OutcomeDecl {
  Ident state;
  std::vector<Ident> joint;
  Ident target;
  Loc loc;

  bool operator==(const OutcomeDecl&) const = default;
};

/// `_`, a single name, or `{a, b}`.
struct NameSet {
  bool wildcard = true;
  std::vector<Ident> names;
  Loc loc;

  bool operator==(const NameSet&) const = default;
};

/// `_` or `(slot, ...)` with one slot per agent.
struct ActionPatternDecl {
  std::optional<std::vector<NameSet>> slots;
  Loc loc;

  bool operator==(const ActionPatternDecl&) const = default;
};

struct MonitorStateDecl {
  Ident name;
  MonitorStatus status = MonitorStatus::Ok;
  bool initial = false;
  Loc loc;

  bool operator==(const MonitorStateDecl&) const = default;
};

/// `[from S] on <states> / <actions> -> <target | stay>`
struct RuleDecl {
  std::optional<NameSet> from;
  NameSet state;
  ActionPatternDecl action;
  std::optional<Ident> target;
  Loc loc;

  bool operator==(const RuleDecl&) const = default;
};

struct NormDecl {
  Ident name;
  std::vector<MonitorStateDecl> states;
  std::vector<RuleDecl> rules;
  Loc loc;

  bool operator==(const NormDecl&) const = default;
};

struct SanctionDecl {
  Ident money;
  Number value;
  std::optional<Ident> attribution;
  Loc loc;

  bool operator==(const SanctionDecl&) const = default;
};

struct RepairDecl {
  std::optional<Number> cv;
  std::optional<Number> sv;
  std::optional<Number> window;
  std::optional<Ident> action;
  std::optional<Ident> money;
  Loc loc;

  bool operator==(const RepairDecl&) const = default;
};

/// One `.iss` file. Sections may appear in any order and be repeated; the
/// lists keep declaration order.
struct Document {
  std::string file;
  std::vector<Ident> agents;
  std::vector<Ident> resources;
  std::vector<StateDecl> states;
  std::vector<Ident> actions;
  std::vector<AvailDecl> availability;
  std::vector<CostDecl> costs;
  std::vector<OutcomeDecl> outcomes;
  std::vector<NormDecl> norms;
  std::vector<SanctionDecl> sanctions;
  std::vector<RepairDecl> repairs;

  bool operator==(const Document& o) const {
    return agents == o.agents && resources == o.resources && states == o.states && actions == o.actions &&
           availability == o.availability && costs == o.costs && outcomes == o.outcomes && norms == o.norms &&
           sanctions == o.sanctions && repairs == o.repairs;
  }
};

/// Strategy file: `start q0;` and `play <state> <agent> <action>;` lines.
struct StrategyDoc {
  std::vector<Ident> starts;
  struct Play {
    Ident state;
    Ident agent;
    Ident action;
    Loc loc;

    bool operator==(const Play&) const = default;
  };
  std::vector<Play> plays;
};

/// `<<[label:] a, b budget=[..]>> X S | F S | G S | S U S [from q]`
struct QueryDoc {
  std::vector<Ident> coalition;
  std::optional<std::vector<Number>> budget;
  Ident op;
  NameSet target;
  std::optional<NameSet> hold;
  std::optional<Ident> start;
};

enum class DiagKind {
  LexError,
  ParseError,
  DuplicateDefinition,
  UnknownIdentifier,
  InvalidPolicy,
  InvalidNorm,
  InvalidModel,
  QuerySyntax,
};

const char* to_string(DiagKind k);

struct Diagnostic {
  Severity severity = Severity::Error;
  DiagKind kind = DiagKind::ParseError;
  std::string message;
  SourceSpan span;
  /// What the parser was looking for, when that helps.
  std::string expected;
};

/// `file:line:col: error[Kind]: message`, the source line and a caret line.
std::string format_diagnostic(const Diagnostic& d, const std::string& source);

bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace iss
