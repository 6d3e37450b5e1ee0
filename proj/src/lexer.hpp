#pragma once

#include <string>
#include <vector>

#include "iss/document.hpp"

namespace iss::detail {

enum class Tok {
  Ident,
  Number,
  Wildcard,  // _
  Semi,
  Comma,
  LBrace,
  RBrace,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Equals,
  Arrow,  // ->
  Slash,
  Star,
  Colon,
  LAngle2,  // <<
  RAngle2,  // >>
  End,
};

const char* describe(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

/// Splits `text` into tokens. `#` starts a comment running to the end of the
/// line; `\r` is whitespace.
std::vector<Token> lex(const std::string& text, const std::string& file, std::vector<Diagnostic>& diags);

/// Cursor over a token list with the error-recovery helpers shared by the
/// document, strategy and query parsers.
class TokenStream {
public:
  TokenStream(std::vector<Token> tokens, std::vector<Diagnostic>& diags, DiagKind kind = DiagKind::ParseError)
      : toks_(std::move(tokens)), diags_(diags), kind_(kind) {}

  const Token& peek(std::size_t ahead = 0) const;
  bool at(Tok t) const { return peek().kind == t; }
  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }
  const Token& next();
  bool accept(Tok t);
  bool accept_word(const char* w);

  /// Consumes a token of kind `t` or records a diagnostic and throws Sync.
  const Token& expect(Tok t, const std::string& what);
  const Token& expect_word(const char* w);
  Ident ident(const std::string& what);
  Number number(const std::string& what);

  [[noreturn]] void fail(const std::string& message, const std::string& expected);
  /// Skips past the next `;` (or up to a `}` / end) after an error.
  void recover();

  struct Sync {};

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  DiagKind kind_;
};

SourceSpan join(const SourceSpan& a, const SourceSpan& b);

}  // namespace iss::detail
