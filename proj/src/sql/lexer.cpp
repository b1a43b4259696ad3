// SPDX-License-Identifier: Apache-2.0
#include "qviz/sql/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace qviz::sql {

namespace {

constexpr std::array kKeywords = {
    "select", "distinct", "all",    "from",   "where",     "and",    "or",     "not",
    "exists", "in",       "as",     "group",  "by",        "having", "order",  "union",
    "intersect", "except", "join",  "inner",  "left",      "right",  "full",   "outer",
    "cross",  "on",       "limit",  "null",   "is",        "like",   "between", "case",
    "with",   "offset",   "natural", "using",
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::String: return "string";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Comma: return "','";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Operator: return "operator";
  }
  return "token";
}

bool is_keyword(std::string_view lowered) {
  return std::find(kKeywords.begin(), kKeywords.end(), lowered) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  const std::size_t n = source.size();

  auto emit = [&](TokenKind kind, std::string text, std::size_t start) {
    tokens.push_back(Token{kind, std::move(text), SourceSpan{start, pos}});
  };

  while (pos < n) {
    const char c = source[pos];
    const std::size_t start = pos;

    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++pos;
      continue;
    }
    if (c == '-' && pos + 1 < n && source[pos + 1] == '-') {
      while (pos < n && source[pos] != '\n') ++pos;
      continue;
    }
    if (is_ident_start(c)) {
      while (pos < n && is_ident_char(source[pos])) ++pos;
      std::string word = lower(source.substr(start, pos - start));
      const TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      emit(kind, std::move(word), start);
      continue;
    }
    if (c == '"') {
      // Quoted identifier; case is preserved only through the span.
      ++pos;
      while (pos < n && source[pos] != '"') ++pos;
      if (pos >= n) {
        throw Error(ErrorCode::LexError, "unterminated quoted identifier", SourceSpan{start, n});
      }
      ++pos;
      const std::string_view inner = source.substr(start + 1, pos - start - 2);
      if (inner.empty()) {
        throw Error(ErrorCode::LexError, "empty quoted identifier", SourceSpan{start, pos});
      }
      emit(TokenKind::Identifier, lower(inner), start);
      continue;
    }
    if (is_digit(c) || (c == '-' && pos + 1 < n && is_digit(source[pos + 1]))) {
      ++pos;
      while (pos < n && is_digit(source[pos])) ++pos;
      if (pos < n && is_ident_start(source[pos])) {
        throw Error(ErrorCode::LexError, "malformed number", SourceSpan{start, pos + 1});
      }
      emit(TokenKind::Integer, std::string(source.substr(start, pos - start)), start);
      continue;
    }
    if (c == '\'') {
      std::string value;
      ++pos;
      bool closed = false;
      while (pos < n) {
        if (source[pos] == '\'') {
          if (pos + 1 < n && source[pos + 1] == '\'') {
            value.push_back('\'');
            pos += 2;
            continue;
          }
          ++pos;
          closed = true;
          break;
        }
        value.push_back(source[pos++]);
      }
      if (!closed) {
        throw Error(ErrorCode::LexError, "unterminated string literal", SourceSpan{start, n});
      }
      emit(TokenKind::String, std::move(value), start);
      continue;
    }

    switch (c) {
      case '.': ++pos; emit(TokenKind::Dot, ".", start); continue;
      case ',': ++pos; emit(TokenKind::Comma, ",", start); continue;
      case '(': ++pos; emit(TokenKind::LParen, "(", start); continue;
      case ')': ++pos; emit(TokenKind::RParen, ")", start); continue;
      case '*': ++pos; emit(TokenKind::Star, "*", start); continue;
      case ';': ++pos; emit(TokenKind::Semicolon, ";", start); continue;
      case '=': ++pos; emit(TokenKind::Operator, "=", start); continue;
      case '<':
        ++pos;
        if (pos < n && (source[pos] == '=' || source[pos] == '>')) ++pos;
        emit(TokenKind::Operator, std::string(source.substr(start, pos - start)), start);
        continue;
      case '>':
        ++pos;
        if (pos < n && source[pos] == '=') ++pos;
        emit(TokenKind::Operator, std::string(source.substr(start, pos - start)), start);
        continue;
      case '!':
        if (pos + 1 < n && source[pos + 1] == '=') {
          pos += 2;
          emit(TokenKind::Operator, "!=", start);
          continue;
        }
        break;
      default:
        break;
    }

    // Report the whole UTF-8 sequence, not a lone continuation byte.
    std::size_t stop = pos + 1;
    while (stop < n && (static_cast<unsigned char>(source[stop]) & 0xC0) == 0x80) ++stop;
    throw Error(ErrorCode::LexError,
                "unexpected character '" + std::string(source.substr(pos, stop - pos)) + "'",
                SourceSpan{pos, stop});
  }
  return tokens;
}

}  // namespace qviz::sql
