#include <algorithm>
#include <array>
#include <cctype>

#include "t2s/error.hpp"
#include "t2s/sql_dialect.hpp"
#include "t2s/text.hpp"

namespace t2s::sql {

namespace {

constexpr std::array<std::string_view, 31> kKeywords = {
    "select", "from",  "where",  "group", "by",        "having", "order", "limit",
    "distinct", "and", "or",     "not",   "in",        "like",   "between", "is",
    "exists", "join",  "on",     "as",    "asc",       "desc",   "union", "intersect",
    "except", "count", "max",    "min",   "sum",       "avg",    "null"};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

// A '-' directly before a digit is a sign when no operand precedes it.
bool minus_is_sign(const std::vector<Token>& out) {
  if (out.empty()) return true;
  const Token& prev = out.back();
  switch (prev.kind) {
    case TokenKind::identifier:
    case TokenKind::number_literal:
    case TokenKind::string_literal:
      return false;
    case TokenKind::punctuation:
      return prev.text != ")";
    case TokenKind::keyword:
      return prev.lower != "null";
    case TokenKind::op:
      return true;
  }
  return true;
}

}  // namespace

bool is_keyword(std::string_view lowered) {
  return std::find(kKeywords.begin(), kKeywords.end(), lowered) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = sql.size();
  auto emit = [&](TokenKind kind, std::size_t start, std::size_t end) {
    Token t;
    t.kind = kind;
    t.text = std::string(sql.substr(start, end - start));
    t.lower = kind == TokenKind::string_literal ? t.text : to_lower(t.text);
    t.offset = start;
    out.push_back(std::move(t));
  };

  while (i < n) {
    const char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (c == '\'' || c == '"') {
      ++i;
      bool closed = false;
      while (i < n) {
        if (sql[i] == c) {
          if (i + 1 < n && sql[i + 1] == c) {
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) throw LexError("unterminated string literal", start);
      emit(TokenKind::string_literal, start, i);
      continue;
    }
    const bool signed_number = c == '-' && i + 1 < n && is_digit(sql[i + 1]) && minus_is_sign(out);
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(sql[i + 1])) || signed_number) {
      if (signed_number) ++i;
      while (i < n && is_digit(sql[i])) ++i;
      if (i < n && sql[i] == '.') {
        ++i;
        while (i < n && is_digit(sql[i])) ++i;
      }
      if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (sql[j] == '+' || sql[j] == '-')) ++j;
        if (j < n && is_digit(sql[j])) {
          i = j;
          while (i < n && is_digit(sql[i])) ++i;
        }
      }
      emit(TokenKind::number_literal, start, i);
      continue;
    }
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(sql[i])) ++i;
      const std::string lowered = to_lower(sql.substr(start, i - start));
      emit(is_keyword(lowered) ? TokenKind::keyword : TokenKind::identifier, start, i);
      continue;
    }
    if (c == '(' || c == ')' || c == ',' || c == '.' || c == ';') {
      emit(TokenKind::punctuation, start, ++i);
      continue;
    }
    const std::string_view two = sql.substr(i, 2);
    if (two == "<=" || two == ">=" || two == "!=" || two == "<>" || two == "==" || two == "||") {
      i += 2;
      emit(TokenKind::op, start, i);
      continue;
    }
    if (std::string_view("=<>+-*/%").find(c) != std::string_view::npos) {
      emit(TokenKind::op, start, ++i);
      continue;
    }
    throw LexError(std::string("illegal character '") + c + "'", start);
  }
  return out;
}

std::string string_literal_value(const Token& token) {
  const std::string& t = token.text;
  if (t.size() < 2) return {};
  const char quote = t.front();
  std::string out;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    out += t[i];
    if (t[i] == quote && i + 2 < t.size() && t[i + 1] == quote) ++i;
  }
  return out;
}

Token canonical(const Token& token) {
  Token out = token;
  switch (token.kind) {
    case TokenKind::keyword:
    case TokenKind::identifier:
      out.text = token.lower;
      break;
    case TokenKind::string_literal: {
      std::string quoted = "'";
      for (char ch : string_literal_value(token)) {
        quoted += ch;
        if (ch == '\'') quoted += '\'';
      }
      quoted += '\'';
      out.text = quoted;
      out.lower = quoted;
      break;
    }
    case TokenKind::op:
      // `==` and `<>` are spelling variants of `=` and `!=`.
      if (token.text == "==") out.text = out.lower = "=";
      if (token.text == "<>") out.text = out.lower = "!=";
      break;
    default:
      break;
  }
  return out;
}

}  // namespace t2s::sql
