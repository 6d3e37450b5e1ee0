#include <algorithm>

#include "iss/spec_io.hpp"
#include "lexer.hpp"

namespace iss {

using detail::Tok;
using detail::TokenStream;
using detail::Token;

const char* to_string(DiagKind k) {
  switch (k) {
    case DiagKind::LexError: return "LexError";
    case DiagKind::ParseError: return "ParseError";
    case DiagKind::DuplicateDefinition: return "DuplicateDefinition";
    case DiagKind::UnknownIdentifier: return "UnknownIdentifier";
    case DiagKind::InvalidPolicy: return "InvalidPolicy";
    case DiagKind::InvalidNorm: return "InvalidNorm";
    case DiagKind::InvalidModel: return "InvalidModel";
    case DiagKind::QuerySyntax: return "QuerySyntax";
  }
  return "?";
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_diagnostic(const Diagnostic& d, const std::string& source) {
  std::string out = d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
                    (d.severity == Severity::Error ? "error" : "warning") + "[" + to_string(d.kind) + "]: " + d.message;
  if (!d.expected.empty()) out += " (expected " + d.expected + ")";
  out += "\n";
  if (d.span.offset > source.size()) return out;
  const std::size_t begin = d.span.offset - (d.span.column - 1 <= d.span.offset ? d.span.column - 1 : 0);
  std::size_t end = source.find('\n', begin);
  if (end == std::string::npos) end = source.size();
  std::string line = source.substr(begin, end - begin);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  out += "  " + line + "\n  " + std::string(d.span.column - 1, ' ') + "^";
  const std::size_t width = std::min(d.span.length, line.size() >= d.span.column ? line.size() - d.span.column + 1 : 0);
  if (width > 1) out += std::string(width - 1, '~');
  out += "\n";
  return out;
}

namespace {

NameSet parse_name_set(TokenStream& ts, const std::string& what) {
  NameSet s;
  const SourceSpan start = ts.peek().span;
  if (ts.accept(Tok::Wildcard)) {
    s.loc.span = start;
    return s;
  }
  s.wildcard = false;
  if (ts.accept(Tok::LBrace)) {
    if (!ts.at(Tok::RBrace)) {
      do s.names.push_back(ts.ident(what));
      while (ts.accept(Tok::Comma));
    }
    s.loc.span = detail::join(start, ts.expect(Tok::RBrace, "'}' closing the set").span);
    return s;
  }
  if (!ts.at(Tok::Ident)) ts.fail("expected " + what + ", '_' or a '{...}' set", "identifier, '_' or '{'");
  s.names.push_back(ts.ident(what));
  s.loc.span = start;
  return s;
}

ActionPatternDecl parse_action_pattern(TokenStream& ts) {
  ActionPatternDecl p;
  const SourceSpan start = ts.peek().span;
  if (ts.accept(Tok::Wildcard)) {
    p.loc.span = start;
    return p;
  }
  ts.expect(Tok::LParen, "'_' or '(' starting a joint-action pattern");
  std::vector<NameSet> slots;
  do slots.push_back(parse_name_set(ts, "action"));
  while (ts.accept(Tok::Comma));
  p.loc.span = detail::join(start, ts.expect(Tok::RParen, "')' closing the joint-action pattern").span);
  p.slots = std::move(slots);
  return p;
}

void parse_norm(TokenStream& ts, Document& d, const SourceSpan& kw) {
  NormDecl n;
  n.name = ts.ident("norm name");
  ts.expect(Tok::LBrace, "'{' opening the norm body");
  while (!ts.at(Tok::RBrace) && !ts.at(Tok::End)) {
    try {
      const SourceSpan start = ts.peek().span;
      if (ts.accept_word("state")) {
        MonitorStateDecl s;
        s.name = ts.ident("monitor state name");
        if (ts.accept_word("ok")) s.status = MonitorStatus::Ok;
        else if (ts.accept_word("violation")) s.status = MonitorStatus::Violation;
        else if (ts.accept_word("pending")) s.status = MonitorStatus::PendingRepair;
        else ts.fail("expected the status of monitor state " + s.name.value, "'ok', 'violation' or 'pending'");
        if (ts.accept_word("init")) s.initial = true;
        s.loc.span = detail::join(start, ts.expect(Tok::Semi, "';' after the monitor state").span);
        n.states.push_back(std::move(s));
        continue;
      }
      RuleDecl r;
      if (ts.accept_word("from")) r.from = parse_name_set(ts, "monitor state");
      ts.expect_word("on");
      r.state = parse_name_set(ts, "model state");
      ts.expect(Tok::Slash, "'/' between state and action patterns");
      r.action = parse_action_pattern(ts);
      ts.expect(Tok::Arrow, "'->' before the target monitor state");
      if (!ts.accept_word("stay")) r.target = ts.ident("target monitor state or 'stay'");
      r.loc.span = detail::join(start, ts.expect(Tok::Semi, "';' after the rule").span);
      n.rules.push_back(std::move(r));
    } catch (const TokenStream::Sync&) {
      ts.recover();
    }
  }
  n.loc.span = detail::join(kw, ts.expect(Tok::RBrace, "'}' closing the norm").span);
  ts.accept(Tok::Semi);
  d.norms.push_back(std::move(n));
}

void parse_policy(TokenStream& ts, Document& d, const SourceSpan& kw) {
  if (ts.accept_word("sanction")) {
    SanctionDecl s;
    s.money = ts.ident("money resource");
    bool have_sv = false;
    while (!ts.at(Tok::Semi)) {
      const Token& key = ts.expect(Tok::Ident, "policy parameter");
      ts.expect(Tok::Equals, "'=' after " + key.text);
      if (key.text == "sv") {
        s.value = ts.number("sanction value");
        have_sv = true;
      } else if (key.text == "attribution") {
        s.attribution = ts.ident("'triggering' or 'collective'");
      } else {
        ts.fail("unknown sanction parameter '" + key.text + "'", "'sv' or 'attribution'");
      }
    }
    if (!have_sv) ts.fail("sanction policy without a value", "'sv=<amount>'");
    s.loc.span = detail::join(kw, ts.expect(Tok::Semi, "';' after the policy").span);
    d.sanctions.push_back(std::move(s));
    return;
  }
  if (ts.accept_word("repair")) {
    RepairDecl r;
    while (!ts.at(Tok::Semi)) {
      const Token& key = ts.expect(Tok::Ident, "policy parameter");
      const std::string name = key.text;
      ts.expect(Tok::Equals, "'=' after " + name);
      auto once = [&](bool present) {
        if (present) ts.fail("repair parameter '" + name + "' given twice", "each of cv, sv, w, action, money at most once");
      };
      if (name == "cv") {
        once(r.cv.has_value());
        r.cv = ts.number("compensation value");
      } else if (name == "sv") {
        once(r.sv.has_value());
        r.sv = ts.number("sanction value");
      } else if (name == "w") {
        once(r.window.has_value());
        r.window = ts.number("repair window");
      } else if (name == "action") {
        once(r.action.has_value());
        r.action = ts.ident("repair action");
      } else if (name == "money") {
        once(r.money.has_value());
        r.money = ts.ident("money resource");
      } else {
        ts.fail("unknown repair parameter '" + name + "'", "'cv', 'sv', 'w', 'action' or 'money'");
      }
    }
    r.loc.span = detail::join(kw, ts.expect(Tok::Semi, "';' after the policy").span);
    d.repairs.push_back(std::move(r));
    return;
  }
  ts.fail("unknown policy kind", "'sanction' or 'repair'");
}

void parse_statement(TokenStream& ts, Document& d) {
  const SourceSpan kw = ts.peek().span;
  if (!ts.at(Tok::Ident)) ts.fail("expected a statement", "agents, resources, states, actions, avail, cost, outcome, norm or policy");
  const std::string word = ts.next().text;
  auto names = [&](std::vector<Ident>& into, const std::string& what, bool allow_empty) {
    if (!allow_empty || !ts.at(Tok::Semi)) {
      do into.push_back(ts.ident(what));
      while (!ts.at(Tok::Semi) && (ts.accept(Tok::Comma) || ts.at(Tok::Ident)));
    }
    ts.expect(Tok::Semi, "';' ending the " + word + " list");
  };
  if (word == "agents") return names(d.agents, "agent name", false);
  if (word == "resources") return names(d.resources, "resource name", true);
  if (word == "actions") return names(d.actions, "action name", false);
  if (word == "states") {
    do {
      StateDecl s;
      s.name = ts.ident("state name");
      s.initial = ts.accept(Tok::Star);
      d.states.push_back(std::move(s));
    } while (!ts.at(Tok::Semi) && (ts.accept(Tok::Comma) || ts.at(Tok::Ident)));
    ts.expect(Tok::Semi, "';' ending the states list");
    return;
  }
  if (word == "avail") {
    AvailDecl a;
    a.state = ts.ident("state");
    a.agent = ts.ident("agent");
    ts.expect(Tok::LBrace, "'{' opening the action set");
    if (!ts.at(Tok::RBrace)) {
      do a.actions.push_back(ts.ident("action"));
      while (ts.accept(Tok::Comma));
    }
    ts.expect(Tok::RBrace, "'}' closing the action set");
    a.loc.span = detail::join(kw, ts.expect(Tok::Semi, "';' after avail").span);
    d.availability.push_back(std::move(a));
    return;
  }
  if (word == "cost") {
    CostDecl c;
    c.state = ts.ident("state");
    c.agent = ts.ident("agent");
    c.action = ts.ident("action");
    ts.expect(Tok::Equals, "'=' before the cost vector");
    ts.expect(Tok::LBracket, "'[' opening the cost vector");
    if (!ts.at(Tok::RBracket)) {
      do c.amounts.push_back(ts.number("non-negative amount"));
      while (ts.accept(Tok::Comma));
    }
    ts.expect(Tok::RBracket, "']' closing the cost vector");
    c.loc.span = detail::join(kw, ts.expect(Tok::Semi, "';' after cost").span);
    d.costs.push_back(std::move(c));
    return;
  }
  if (word == "outcome") {
    OutcomeDecl o;
    o.state = ts.ident("state");
    ts.expect(Tok::LParen, "'(' opening the joint action");
    do o.joint.push_back(ts.ident("action"));
    while (ts.accept(Tok::Comma));
    ts.expect(Tok::RParen, "')' closing the joint action");
    ts.expect(Tok::Arrow, "'->' before the target state");
    o.target = ts.ident("target state");
    o.loc.span = detail::join(kw, ts.expect(Tok::Semi, "';' after outcome").span);
    d.outcomes.push_back(std::move(o));
    return;
  }
  if (word == "norm") return parse_norm(ts, d, kw);
  if (word == "policy") return parse_policy(ts, d, kw);
  ts.fail("unknown statement '" + word + "'", "agents, resources, states, actions, avail, cost, outcome, norm or policy");
}

}  // namespace

ParseResult parse_document(const std::string& text, const std::string& file) {
  ParseResult out;
  auto tokens = detail::lex(text, file, out.diagnostics);
  TokenStream ts(std::move(tokens), out.diagnostics);
  Document d;
  d.file = file;
  while (!ts.at(Tok::End)) {
    try {
      if (ts.at(Tok::RBrace)) ts.fail("unmatched '}'", "a statement");
      parse_statement(ts, d);
    } catch (const TokenStream::Sync&) {
      ts.recover();
      if (ts.at(Tok::RBrace)) ts.next();
    }
  }
  if (!has_errors(out.diagnostics)) out.document = std::move(d);
  return out;
}

StrategyParse parse_strategy(const std::string& text, const std::string& file) {
  StrategyParse out;
  auto tokens = detail::lex(text, file, out.diagnostics);
  TokenStream ts(std::move(tokens), out.diagnostics);
  StrategyDoc s;
  while (!ts.at(Tok::End)) {
    try {
      const SourceSpan kw = ts.peek().span;
      if (ts.accept_word("start")) {
        s.starts.push_back(ts.ident("start state"));
        ts.expect(Tok::Semi, "';' after start");
      } else if (ts.accept_word("play")) {
        StrategyDoc::Play p;
        p.state = ts.ident("state");
        p.agent = ts.ident("agent");
        p.action = ts.ident("action");
        p.loc.span = detail::join(kw, ts.expect(Tok::Semi, "';' after play").span);
        s.plays.push_back(std::move(p));
      } else {
        ts.fail("expected a strategy statement", "'start' or 'play'");
      }
    } catch (const TokenStream::Sync&) {
      ts.recover();
      if (ts.at(Tok::RBrace)) ts.next();
    }
  }
  if (!has_errors(out.diagnostics)) out.document = std::move(s);
  return out;
}

QueryParse parse_query(const std::string& text) {
  QueryParse out;
  auto tokens = detail::lex(text, "<query>", out.diagnostics);
  for (auto& d : out.diagnostics) d.kind = DiagKind::QuerySyntax;
  if (has_errors(out.diagnostics)) return out;
  TokenStream ts(std::move(tokens), out.diagnostics, DiagKind::QuerySyntax);
  QueryDoc q;
  try {
    ts.expect(Tok::LAngle2, "'<<' opening the coalition");
    if (ts.at(Tok::Ident) && ts.peek(1).kind == Tok::Colon) {
      ts.next();
      ts.next();
    }
    while (ts.at(Tok::Ident) && !(ts.peek().text == "budget" && ts.peek(1).kind == Tok::Equals)) {
      q.coalition.push_back(ts.ident("agent"));
      if (!ts.accept(Tok::Comma)) break;
    }
    if (ts.accept_word("budget")) {
      ts.expect(Tok::Equals, "'=' after budget");
      ts.expect(Tok::LBracket, "'[' opening the budget");
      std::vector<Number> b;
      if (!ts.at(Tok::RBracket)) {
        do b.push_back(ts.number("budget entry"));
        while (ts.accept(Tok::Comma));
      }
      ts.expect(Tok::RBracket, "']' closing the budget");
      q.budget = std::move(b);
    }
    ts.expect(Tok::RAngle2, "'>>' closing the coalition");
    if (ts.at(Tok::Ident) && (ts.peek().text == "X" || ts.peek().text == "F" || ts.peek().text == "G")) {
      q.op = ts.ident("operator");
      q.target = parse_name_set(ts, "state");
    } else {
      q.hold = parse_name_set(ts, "state");
      if (!ts.at_word("U")) ts.fail("expected a temporal operator", "'X', 'F', 'G' or '{...} U {...}'");
      q.op = ts.ident("operator");
      q.target = parse_name_set(ts, "state");
    }
    if (ts.accept_word("from")) q.start = ts.ident("start state");
    if (!ts.at(Tok::End)) ts.fail("unexpected text after the query", "end of query");
  } catch (const TokenStream::Sync&) {
    return out;
  }
  out.query = std::move(q);
  return out;
}

}  // namespace iss
