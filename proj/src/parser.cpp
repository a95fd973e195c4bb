#include <algorithm>
#include <array>
#include <charconv>

#include "t2s/error.hpp"
#include "t2s/sql_dialect.hpp"

namespace t2s::sql {

namespace {

constexpr std::array<std::string_view, 24> kExprStopKeywords = {
    "select", "from", "where", "group", "order", "having", "limit", "union",
    "intersect", "except", "and", "or", "join", "on", "as", "asc",
    "desc", "not", "in", "like", "between", "is", "exists", "by"};

constexpr std::array<std::string_view, 7> kJoinModifiers = {
    "left", "right", "inner", "outer", "cross", "full", "natural"};

bool is_comparison_op(const Token& t) {
  if (t.kind != TokenKind::op) return false;
  const std::string& s = t.text;
  return s == "=" || s == "==" || s == "!=" || s == "<>" || s == "<" || s == "<=" || s == ">" ||
         s == ">=";
}

std::optional<Aggregate> aggregate_of(const Token& t) {
  if (t.kind != TokenKind::keyword) return std::nullopt;
  if (t.lower == "max") return Aggregate::max;
  if (t.lower == "min") return Aggregate::min;
  if (t.lower == "count") return Aggregate::count;
  if (t.lower == "sum") return Aggregate::sum;
  if (t.lower == "avg") return Aggregate::avg;
  return std::nullopt;
}

struct TableAlias {
  std::string alias;
  std::string table;  // empty for a derived table
};

struct Scope {
  std::vector<TableAlias> aliases;
  std::vector<std::string> tables;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ClauseTree parse_statement() {
    ClauseTree tree = parse_query();
    if (at_punct(";")) ++pos_;
    if (pos_ != toks_.size()) unsupported("unexpected trailing input");
    return tree;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Scope> scopes_;

  // ---- token helpers ----
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
  }
  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->is_keyword(kw);
  }
  bool at_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->is_punct(p);
  }
  bool at_subquery() const { return at_punct("(") && at_keyword("select", 1); }

  [[noreturn]] void unsupported(const std::string& what) const {
    std::string span;
    for (std::size_t i = pos_; i < toks_.size() && i < pos_ + 4; ++i) {
      if (!span.empty()) span += ' ';
      span += toks_[i].text;
    }
    if (span.empty()) span = "<end of input>";
    throw UnsupportedSyntax(what, span);
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) unsupported("expected '" + std::string(kw) + "'");
    ++pos_;
  }
  void expect_punct(std::string_view p) {
    if (!at_punct(p)) unsupported("expected '" + std::string(p) + "'");
    ++pos_;
  }

  // ---- grammar ----
  // `derived` marks a query that is itself a from item.
  ClauseTree parse_query(bool derived = false) {
    ClauseTree tree = parse_core(derived);
    const Token* t = peek();
    if (t && t->kind == TokenKind::keyword &&
        (t->lower == "union" || t->lower == "intersect" || t->lower == "except")) {
      const SetOperator op = t->lower == "union"       ? SetOperator::union_
                             : t->lower == "intersect" ? SetOperator::intersect
                                                       : SetOperator::except;
      ++pos_;
      if (const Token* all = peek(); all && all->lower == "all") unsupported("union all is not supported");
      tree.set_op = SetOperation{op, Subquery(parse_query(derived))};
    }
    return tree;
  }

  ClauseTree parse_core(bool derived) {
    ClauseTree tree;
    expect_keyword("select");
    if (at_keyword("distinct")) {
      tree.distinct = true;
      ++pos_;
    }
    std::vector<std::string> select_aliases;
    for (;;) {
      tree.select_items.push_back(parse_expr());
      std::string alias;
      if (at_keyword("as")) {
        ++pos_;
        const Token* a = peek();
        if (!a || a->kind != TokenKind::identifier) unsupported("expected column alias");
        // The enclosing query may refer to it, so it cannot be dropped.
        if (derived) unsupported("column alias inside a derived table");
        alias = a->lower;
        ++pos_;
      }
      select_aliases.push_back(std::move(alias));
      if (!at_punct(",")) break;
      ++pos_;
    }

    expect_keyword("from");
    Scope scope;
    parse_from(tree, scope);
    scopes_.push_back(std::move(scope));

    if (at_keyword("where")) {
      ++pos_;
      tree.where = parse_conditions();
    }
    if (at_keyword("group")) {
      ++pos_;
      expect_keyword("by");
      for (;;) {
        tree.group_by.push_back(parse_expr());
        if (!at_punct(",")) break;
        ++pos_;
      }
    }
    if (at_keyword("having")) {
      ++pos_;
      tree.having = parse_conditions();
    }
    if (at_keyword("order")) {
      ++pos_;
      expect_keyword("by");
      for (;;) {
        OrderItem item{parse_expr(), Direction::asc};
        if (at_keyword("asc")) {
          ++pos_;
        } else if (at_keyword("desc")) {
          item.direction = Direction::desc;
          ++pos_;
        }
        tree.order_by.push_back(std::move(item));
        if (!at_punct(",")) break;
        ++pos_;
      }
    }
    if (at_keyword("limit")) {
      ++pos_;
      const Token* t = peek();
      std::int64_t value = -1;
      if (t && t->kind == TokenKind::number_literal) {
        auto [ptr, ec] = std::from_chars(t->text.data(), t->text.data() + t->text.size(), value);
        if (ec != std::errc() || ptr != t->text.data() + t->text.size()) value = -1;
      }
      if (value < 0) unsupported("limit expects a non-negative integer");
      tree.limit = value;
      ++pos_;
    }

    resolve(tree, select_aliases);
    scopes_.pop_back();
    return tree;
  }

  void parse_from(ClauseTree& tree, Scope& scope) {
    bool comma = false;
    for (;;) {
      FromItem item;
      item.comma_joined = comma;
      std::string bound;
      if (at_subquery()) {
        ++pos_;
        item.subquery = Subquery(parse_query(true));
        expect_punct(")");
      } else {
        const Token* t = peek();
        if (!t || t->kind != TokenKind::identifier) unsupported("expected table name");
        item.table = t->lower;
        ++pos_;
        scope.tables.push_back(item.table);
      }
      if (at_keyword("as")) {
        ++pos_;
        const Token* a = peek();
        if (!a || a->kind != TokenKind::identifier) unsupported("expected table alias");
        scope.aliases.push_back({a->lower, item.table});
        ++pos_;
      } else if (const Token* a = peek(); a && a->kind == TokenKind::identifier) {
        if (std::find(kJoinModifiers.begin(), kJoinModifiers.end(), a->lower) != kJoinModifiers.end())
          unsupported("only plain join is supported");
        scope.aliases.push_back({a->lower, item.table});
        ++pos_;
      }
      if (at_keyword("on")) {
        ++pos_;
        // Join conditions may name tables introduced by this same from clause.
        scopes_.push_back(scope);
        item.on = parse_conditions();
        scopes_.pop_back();
      }
      tree.from.push_back(std::move(item));
      if (at_keyword("join")) {
        comma = false;
        ++pos_;
      } else if (at_punct(",")) {
        comma = true;
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::vector<Condition> parse_conditions() {
    std::vector<Condition> out;
    Connective connective = Connective::and_;
    for (;;) {
      Condition c = parse_condition();
      c.joined_by = connective;
      out.push_back(std::move(c));
      if (at_keyword("and")) {
        connective = Connective::and_;
      } else if (at_keyword("or")) {
        connective = Connective::or_;
      } else {
        break;
      }
      ++pos_;
    }
    return out;
  }

  Condition parse_condition() {
    Condition c;
    if (at_keyword("not") && at_keyword("exists", 1)) unsupported("not exists is not supported");
    if (at_keyword("exists")) {
      ++pos_;
      if (!at_subquery()) unsupported("exists expects a subquery");
      c.comparator = Comparator::exists;
      c.right = parse_operand();
      return c;
    }
    if (at_punct("(") && !at_subquery()) {
      // A parenthesised condition group, as opposed to a parenthesised value.
      int depth = 0;
      for (std::size_t i = pos_; i < toks_.size(); ++i) {
        if (toks_[i].is_punct("(")) ++depth;
        if (toks_[i].is_punct(")") && --depth == 0) break;
        if (depth == 1 && (toks_[i].is_keyword("and") || toks_[i].is_keyword("or") ||
                           is_comparison_op(toks_[i])))
          unsupported("parenthesised condition groups are not supported");
      }
    }
    c.left = parse_expr();
    const Token* t = peek();
    if (!t) unsupported("expected comparison operator");
    if (is_comparison_op(*t)) {
      const std::string op = canonical(*t).text;
      c.comparator = op == "="    ? Comparator::eq
                     : op == "!=" ? Comparator::ne
                     : op == "<"  ? Comparator::lt
                     : op == "<=" ? Comparator::le
                     : op == ">"  ? Comparator::gt
                                  : Comparator::ge;
      ++pos_;
    } else if (t->is_keyword("like")) {
      c.comparator = Comparator::like;
      ++pos_;
    } else if (t->is_keyword("in")) {
      c.comparator = Comparator::in;
      ++pos_;
    } else if (t->is_keyword("between")) {
      c.comparator = Comparator::between;
      ++pos_;
    } else if (t->is_keyword("is")) {
      ++pos_;
      Literal lit{"null", true};
      if (at_keyword("not")) {
        lit.text = "not null";
        ++pos_;
      }
      expect_keyword("null");
      c.comparator = Comparator::is;
      c.right = std::move(lit);
      return c;
    } else if (t->is_keyword("not") && at_keyword("like", 1)) {
      c.comparator = Comparator::not_like;
      pos_ += 2;
    } else if (t->is_keyword("not") && at_keyword("in", 1)) {
      c.comparator = Comparator::not_in;
      pos_ += 2;
    } else {
      unsupported("expected comparison operator");
    }
    c.right = parse_operand();
    if (c.comparator == Comparator::between) {
      expect_keyword("and");
      c.upper = parse_operand();
    }
    return c;
  }

  Operand parse_operand() {
    if (at_subquery()) {
      ++pos_;
      Subquery sub(parse_query());
      expect_punct(")");
      return sub;
    }
    Expr e = parse_expr();
    if (e.aggregate == Aggregate::none && e.tokens.size() == 1 && e.tokens[0].is_literal())
      return Literal{e.tokens[0].text, false};
    return e;
  }

  Expr parse_expr() {
    Expr e;
    int depth = 0;
    for (;;) {
      const Token* t = peek();
      if (!t) break;
      if (depth == 0) {
        if (t->is_punct(",") || t->is_punct(")") || t->is_punct(";")) break;
        if (t->kind == TokenKind::keyword &&
            std::find(kExprStopKeywords.begin(), kExprStopKeywords.end(), t->lower) !=
                kExprStopKeywords.end())
          break;
        if (is_comparison_op(*t)) break;
      }
      if (t->is_punct("(")) {
        if (at_keyword("select", 1)) unsupported("subquery inside an expression");
        ++depth;
      } else if (t->is_punct(")")) {
        --depth;
      } else if (depth > 0 && t->kind == TokenKind::keyword && !aggregate_of(*t) &&
                 !t->is_keyword("distinct") && !t->is_keyword("null")) {
        unsupported("unexpected keyword inside expression");
      }
      e.tokens.push_back(canonical(*t));
      ++pos_;
    }
    if (depth != 0) unsupported("unbalanced parentheses");
    if (e.tokens.empty()) unsupported("expected expression");
    lift_aggregate(e);
    return e;
  }

  void lift_aggregate(Expr& e) const {
    auto& tk = e.tokens;
    if (tk.size() < 4 || !aggregate_of(tk[0]) || !tk[1].is_punct("(") || !tk.back().is_punct(")"))
      return;
    // The parenthesis opened at tk[1] must close at the final token.
    int depth = 0;
    for (std::size_t i = 1; i < tk.size(); ++i) {
      if (tk[i].is_punct("(")) ++depth;
      if (tk[i].is_punct(")") && --depth == 0 && i != tk.size() - 1) return;
    }
    e.aggregate = *aggregate_of(tk[0]);
    std::vector<Token> inner(tk.begin() + 2, tk.end() - 1);
    if (!inner.empty() && inner[0].is_keyword("distinct")) {
      e.distinct = true;
      inner.erase(inner.begin());
    }
    if (inner.empty()) unsupported("aggregate without argument");
    tk = std::move(inner);
  }

  // ---- alias resolution ----
  std::optional<std::string> lookup_alias(const std::string& name) const {
    for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s)
      for (const auto& a : s->aliases)
        if (a.alias == name) return a.table;
    return std::nullopt;
  }

  void resolve_expr(Expr& e) const {
    auto& tk = e.tokens;
    for (std::size_t i = 0; i + 2 < tk.size(); ++i) {
      if (tk[i].kind != TokenKind::identifier || !tk[i + 1].is_punct(".")) continue;
      if (i > 0 && tk[i - 1].is_punct(".")) continue;
      auto table = lookup_alias(tk[i].lower);
      if (!table) continue;
      if (table->empty()) {
        // Qualifier of a derived table: the column stands on its own.
        tk.erase(tk.begin() + static_cast<std::ptrdiff_t>(i), tk.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        continue;
      }
      tk[i].text = tk[i].lower = *table;
    }
  }

  void resolve_operand(Operand& o) const {
    if (auto* e = std::get_if<Expr>(&o)) resolve_expr(*e);
  }

  void resolve_conditions(std::vector<Condition>& conds) const {
    for (auto& c : conds) {
      resolve_expr(c.left);
      resolve_operand(c.right);
      if (c.upper) resolve_operand(*c.upper);
    }
  }

  void resolve(ClauseTree& tree, const std::vector<std::string>& select_aliases) const {
    for (auto& e : tree.select_items) resolve_expr(e);
    for (auto& f : tree.from) resolve_conditions(f.on);
    resolve_conditions(tree.where);
    for (auto& e : tree.group_by) resolve_expr(e);
    resolve_conditions(tree.having);
    for (auto& o : tree.order_by) resolve_expr(o.expr);

    // Column aliases: a bare reference in group/having/order stands for the
    // aliased select expression.
    auto substitute = [&](Expr& e) {
      if (e.aggregate != Aggregate::none || e.tokens.size() != 1 ||
          e.tokens[0].kind != TokenKind::identifier)
        return;
      for (std::size_t i = 0; i < select_aliases.size(); ++i)
        if (!select_aliases[i].empty() && select_aliases[i] == e.tokens[0].lower) {
          e = tree.select_items[i];
          return;
        }
    };
    for (auto& e : tree.group_by) substitute(e);
    for (auto& c : tree.having) substitute(c.left);
    for (auto& o : tree.order_by) substitute(o.expr);
  }
};

}  // namespace

ClauseTree parse(std::string_view sql) { return Parser(tokenize(sql)).parse_statement(); }

}  // namespace t2s::sql
