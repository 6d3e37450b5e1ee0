#include "lexer.hpp"

#include <cctype>

namespace iss::detail {

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Wildcard: return "'_'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Equals: return "'='";
    case Tok::Arrow: return "'->'";
    case Tok::Slash: return "'/'";
    case Tok::Star: return "'*'";
    case Tok::Colon: return "':'";
    case Tok::LAngle2: return "'<<'";
    case Tok::RAngle2: return "'>>'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& text, const std::string& file, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t line_start = 0;
  auto span_at = [&](std::size_t from, std::size_t len) {
    return SourceSpan{file, line, from - line_start + 1, len, from};
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() && ident_char(text[i])) ++i;
      std::string word = text.substr(start, i - start);
      out.push_back(Token{word == "_" ? Tok::Wildcard : Tok::Ident, word, span_at(start, i - start)});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i < text.size() && ident_char(text[i])) {
        while (i < text.size() && ident_char(text[i])) ++i;
        diags.push_back(Diagnostic{Severity::Error, DiagKind::LexError,
                                   "malformed token '" + text.substr(start, i - start) + "'", span_at(start, i - start),
                                   "a number or an identifier starting with a letter or '_'"});
        continue;
      }
      std::string digits = text.substr(start, i - start);
      if (digits.size() > 15) {
        diags.push_back(Diagnostic{Severity::Error, DiagKind::LexError, "number " + digits + " is too large",
                                   span_at(start, i - start), "at most 15 digits"});
        continue;
      }
      out.push_back(Token{Tok::Number, digits, span_at(start, i - start)});
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < text.size() && text[i + 1] == b; };
    Tok kind = Tok::End;
    std::size_t len = 1;
    if (two('-', '>')) {
      kind = Tok::Arrow;
      len = 2;
    } else if (two('<', '<')) {
      kind = Tok::LAngle2;
      len = 2;
    } else if (two('>', '>')) {
      kind = Tok::RAngle2;
      len = 2;
    } else {
      switch (c) {
        case ';': kind = Tok::Semi; break;
        case ',': kind = Tok::Comma; break;
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case '=': kind = Tok::Equals; break;
        case '/': kind = Tok::Slash; break;
        case '*': kind = Tok::Star; break;
        case ':': kind = Tok::Colon; break;
        default: break;
      }
    }
    if (kind == Tok::End) {
      // Treat a UTF-8 sequence as one character in the message.
      std::size_t n = 1;
      while (start + n < text.size() && (static_cast<unsigned char>(text[start + n]) & 0xC0) == 0x80) ++n;
      diags.push_back(Diagnostic{Severity::Error, DiagKind::LexError,
                                 "unexpected character '" + text.substr(start, n) + "'", span_at(start, n), ""});
      i += n;
      continue;
    }
    out.push_back(Token{kind, text.substr(start, len), span_at(start, len)});
    i += len;
  }
  out.push_back(Token{Tok::End, "", span_at(i, 0)});
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  const std::size_t p = pos_ + ahead;
  return p < toks_.size() ? toks_[p] : toks_.back();
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(Tok t) {
  if (!at(t)) return false;
  next();
  return true;
}

bool TokenStream::accept_word(const char* w) {
  if (!at_word(w)) return false;
  next();
  return true;
}

void TokenStream::fail(const std::string& message, const std::string& expected) {
  diags_.push_back(Diagnostic{Severity::Error, kind_, message, peek().span, expected});
  throw Sync{};
}

const Token& TokenStream::expect(Tok t, const std::string& what) {
  if (!at(t)) {
    const Token& got = peek();
    std::string found = got.kind == Tok::End ? "end of input" : "'" + got.text + "'";
    fail("expected " + what + ", found " + found, describe(t));
  }
  return next();
}

const Token& TokenStream::expect_word(const char* w) {
  if (!at_word(w)) {
    const Token& got = peek();
    std::string found = got.kind == Tok::End ? "end of input" : "'" + got.text + "'";
    fail(std::string("expected '") + w + "', found " + found, std::string("'") + w + "'");
  }
  return next();
}

Ident TokenStream::ident(const std::string& what) {
  const Token& t = expect(Tok::Ident, what);
  return Ident{t.text, t.span};
}

Number TokenStream::number(const std::string& what) {
  const Token& t = expect(Tok::Number, what);
  return Number{std::stoll(t.text), t.span};
}

void TokenStream::recover() {
  int depth = 0;
  while (!at(Tok::End)) {
    if (at(Tok::LBrace)) ++depth;
    if (at(Tok::RBrace)) {
      if (depth == 0) return;
      --depth;
    }
    if (at(Tok::Semi) && depth == 0) {
      next();
      return;
    }
    next();
  }
}

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  if (b.offset + b.length > a.offset) s.length = b.offset + b.length - a.offset;
  return s;
}

}  // namespace iss::detail
