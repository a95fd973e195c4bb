#pragma once

// Tokenizer, parser and canonical printer for the benchmark SQL subset.
//
// The parser resolves table aliases while it reads, so every tree it returns
// is alias-free: qualifiers name tables, identifiers and keywords are
// lowercase, and string literals are single-quoted. Printing a tree therefore
// yields the normalized form of the query.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "t2s/box.hpp"

namespace t2s::sql {

enum class TokenKind { keyword, identifier, number_literal, string_literal, op, punctuation };

struct Token {
  TokenKind kind = TokenKind::punctuation;
  std::string text;   // verbatim (or canonical, for tokens stored in a tree)
  std::string lower;  // lowercased text; equals text for string literals
  std::size_t offset = 0;

  bool is(TokenKind k, std::string_view lowered) const { return kind == k && lower == lowered; }
  bool is_keyword(std::string_view kw) const { return is(TokenKind::keyword, kw); }
  bool is_punct(std::string_view p) const { return is(TokenKind::punctuation, p); }
  bool is_literal() const {
    return kind == TokenKind::number_literal || kind == TokenKind::string_literal;
  }

  // Offset is positional metadata and does not take part in equality.
  friend bool operator==(const Token& a, const Token& b) {
    return a.kind == b.kind && a.text == b.text;
  }
};

bool is_keyword(std::string_view lowered);

// Splits SQL text into tokens. Throws LexError on an unterminated string
// literal or a character outside the dialect.
std::vector<Token> tokenize(std::string_view sql);

// Canonical spelling of a token: keywords and identifiers lowercase, string
// literals single-quoted with embedded quotes doubled.
Token canonical(const Token& token);

// Contents of a string literal token without its quotes, escapes undone.
std::string string_literal_value(const Token& token);

enum class Aggregate { none, max, min, count, sum, avg };
enum class Comparator { eq, ne, lt, le, gt, ge, like, not_like, in, not_in, between, is, exists };
enum class Connective { and_, or_ };
enum class Direction { asc, desc };
enum class SetOperator { intersect, union_, except };

std::string_view to_string(Aggregate a);
std::string_view to_string(Comparator c);
std::string_view to_string(Connective c);
std::string_view to_string(Direction d);
std::string_view to_string(SetOperator s);

// A value expression kept as a canonical token run. An aggregate wrapping the
// whole expression is lifted out; `distinct` is the aggregate's own flag.
struct Expr {
  Aggregate aggregate = Aggregate::none;
  bool distinct = false;
  std::vector<Token> tokens;

  bool empty() const { return tokens.empty(); }
  bool is_star() const { return tokens.size() == 1 && tokens[0].text == "*"; }
  std::string text() const;

  bool operator==(const Expr&) const = default;
};

struct ColumnRef {
  std::string table;  // empty when the source left the column unqualified
  std::string column;

  std::string qualified() const { return table.empty() ? column : table + "." + column; }
  auto operator<=>(const ColumnRef&) const = default;
};

// Column references in an expression. `*` and function names are skipped.
std::vector<ColumnRef> column_refs(const Expr& e);

struct Literal {
  // Canonical token text: 'pop', 42, or for `is` the words null / not null.
  std::string text;
  bool is_null_test = false;

  bool operator==(const Literal&) const = default;
};

struct ClauseTree;
using Subquery = Box<ClauseTree>;
using Operand = std::variant<Literal, Expr, Subquery>;

struct Condition {
  Connective joined_by = Connective::and_;  // connective to the previous conjunct
  Expr left;                                // empty for exists
  Comparator comparator = Comparator::eq;
  Operand right;
  std::optional<Operand> upper;  // second bound of between

  bool operator==(const Condition&) const;
};

struct FromItem {
  std::string table;                 // lowercase original name; empty for a subquery
  std::optional<Subquery> subquery;
  bool comma_joined = false;         // introduced by ',' rather than join
  std::vector<Condition> on;         // conditions following this item's `on`

  bool operator==(const FromItem&) const;
};

struct OrderItem {
  Expr expr;
  Direction direction = Direction::asc;

  bool operator==(const OrderItem&) const = default;
};

struct SetOperation {
  SetOperator op = SetOperator::union_;
  Subquery right;

  bool operator==(const SetOperation&) const;
};

struct ClauseTree {
  bool distinct = false;
  std::vector<Expr> select_items;
  std::vector<FromItem> from;
  std::vector<Condition> where;
  std::vector<Expr> group_by;
  std::vector<Condition> having;
  std::vector<OrderItem> order_by;  // source order
  std::optional<std::int64_t> limit;
  std::optional<SetOperation> set_op;

  // Tables named directly in this query's from clause (not in subqueries).
  std::set<std::string> from_tables() const;
  // Printed equality conditions from every `on` of this query's from clause.
  std::set<std::string> join_conditions() const;

  bool operator==(const ClauseTree&) const;
};

// Parses one statement. A trailing ';' is accepted. Throws LexError or
// UnsupportedSyntax.
ClauseTree parse(std::string_view sql);

// Canonical printer; its output is the normalized spelling of the query.
std::string print(const ClauseTree& tree);
std::string print(const Expr& e);
std::string print(const Operand& o);
std::string print(const Condition& c);

// Calls `fn(core, outer)` for the query and every nested query. `outer` lists
// the enclosing queries whose from clauses are visible, innermost last.
using CoreVisitor =
    std::function<void(const ClauseTree& core, std::span<const ClauseTree* const> outer)>;
void visit_cores(const ClauseTree& tree, const CoreVisitor& fn);

// Calls `fn` on every expression owned by `core` itself (select list, join
// conditions, where/having operands, group by, order by). Subqueries are not
// entered.
void for_each_expr(const ClauseTree& core, const std::function<void(const Expr&)>& fn);

}  // namespace t2s::sql
