// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qviz/error.hpp"

namespace qviz::sql {

enum class TokenKind {
  Keyword,
  Identifier,
  Integer,
  String,
  Dot,
  Comma,
  LParen,
  RParen,
  Star,
  Semicolon,
  Operator,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  /// Keywords and identifiers are lower-cased; string literals hold the
  /// unquoted value; everything else is the raw lexeme.
  std::string text;
  SourceSpan span;

  friend bool operator==(const Token&, const Token&) = default;
};

/// True for words reserved by the lexer (including those the parser only
/// recognizes in order to reject them).
bool is_keyword(std::string_view lowered);

/// Splits `source` into tokens. Whitespace and `--` line comments are
/// dropped. Throws Error(LexError) on any character outside the alphabet.
std::vector<Token> tokenize(std::string_view source);

}  // namespace qviz::sql
