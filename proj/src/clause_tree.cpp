#include <vector>

#include "t2s/sql_dialect.hpp"

namespace t2s::sql {

std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::none: return "";
    case Aggregate::max: return "max";
    case Aggregate::min: return "min";
    case Aggregate::count: return "count";
    case Aggregate::sum: return "sum";
    case Aggregate::avg: return "avg";
  }
  return "";
}

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::eq: return "=";
    case Comparator::ne: return "!=";
    case Comparator::lt: return "<";
    case Comparator::le: return "<=";
    case Comparator::gt: return ">";
    case Comparator::ge: return ">=";
    case Comparator::like: return "like";
    case Comparator::not_like: return "not like";
    case Comparator::in: return "in";
    case Comparator::not_in: return "not in";
    case Comparator::between: return "between";
    case Comparator::is: return "is";
    case Comparator::exists: return "exists";
  }
  return "";
}

std::string_view to_string(Connective c) { return c == Connective::and_ ? "and" : "or"; }
std::string_view to_string(Direction d) { return d == Direction::asc ? "asc" : "desc"; }

std::string_view to_string(SetOperator s) {
  switch (s) {
    case SetOperator::intersect: return "intersect";
    case SetOperator::union_: return "union";
    case SetOperator::except: return "except";
  }
  return "";
}

bool Condition::operator==(const Condition&) const = default;
bool FromItem::operator==(const FromItem&) const = default;
bool SetOperation::operator==(const SetOperation&) const = default;
bool ClauseTree::operator==(const ClauseTree&) const = default;

std::string Expr::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const bool glue = i > 0 && (tokens[i].is_punct(".") || tokens[i - 1].is_punct("."));
    if (i > 0 && !glue) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

std::vector<ColumnRef> column_refs(const Expr& e) {
  std::vector<ColumnRef> out;
  const auto& tk = e.tokens;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    if (tk[i].kind != TokenKind::identifier) continue;
    if (i + 1 < tk.size() && tk[i + 1].is_punct("(")) continue;  // function name
    if (i + 2 < tk.size() && tk[i + 1].is_punct(".") && tk[i + 2].kind == TokenKind::identifier) {
      out.push_back({tk[i].lower, tk[i + 2].lower});
      i += 2;
      continue;
    }
    if (i + 2 < tk.size() && tk[i + 1].is_punct(".")) {  // table.*
      i += 2;
      continue;
    }
    out.push_back({"", tk[i].lower});
  }
  return out;
}

std::set<std::string> ClauseTree::from_tables() const {
  std::set<std::string> out;
  for (const auto& f : from)
    if (!f.subquery) out.insert(f.table);
  return out;
}

std::set<std::string> ClauseTree::join_conditions() const {
  std::set<std::string> out;
  for (const auto& f : from)
    for (const auto& c : f.on) out.insert(print(c));
  return out;
}

// ---- printer ----

std::string print(const Expr& e) {
  if (e.aggregate == Aggregate::none) return e.text();
  std::string out(to_string(e.aggregate));
  out += " ( ";
  if (e.distinct) out += "distinct ";
  out += e.text();
  out += " )";
  return out;
}

std::string print(const Operand& o) {
  struct V {
    std::string operator()(const Literal& l) const { return l.text; }
    std::string operator()(const Expr& e) const { return print(e); }
    std::string operator()(const Subquery& s) const { return "( " + print(*s) + " )"; }
  };
  return std::visit(V{}, o);
}

std::string print(const Condition& c) {
  if (c.comparator == Comparator::exists) return "exists " + print(c.right);
  std::string out = print(c.left);
  out += ' ';
  out += to_string(c.comparator);
  out += ' ';
  out += print(c.right);
  if (c.upper) out += " and " + print(*c.upper);
  return out;
}

namespace {

std::string print_conditions(const std::vector<Condition>& conds) {
  std::string out;
  for (std::size_t i = 0; i < conds.size(); ++i) {
    if (i) {
      out += ' ';
      out += to_string(conds[i].joined_by);
      out += ' ';
    }
    out += print(conds[i]);
  }
  return out;
}

}  // namespace

std::string print(const ClauseTree& t) {
  std::string out = "select ";
  if (t.distinct) out += "distinct ";
  for (std::size_t i = 0; i < t.select_items.size(); ++i) {
    if (i) out += " , ";
    out += print(t.select_items[i]);
  }
  out += " from ";
  for (std::size_t i = 0; i < t.from.size(); ++i) {
    const FromItem& f = t.from[i];
    if (i) out += f.comma_joined ? " , " : " join ";
    out += f.subquery ? "( " + print(**f.subquery) + " )" : f.table;
    if (!f.on.empty()) out += " on " + print_conditions(f.on);
  }
  if (!t.where.empty()) out += " where " + print_conditions(t.where);
  if (!t.group_by.empty()) {
    out += " group by ";
    for (std::size_t i = 0; i < t.group_by.size(); ++i) {
      if (i) out += " , ";
      out += print(t.group_by[i]);
    }
  }
  if (!t.having.empty()) out += " having " + print_conditions(t.having);
  if (!t.order_by.empty()) {
    out += " order by ";
    for (std::size_t i = 0; i < t.order_by.size(); ++i) {
      if (i) out += " , ";
      out += print(t.order_by[i].expr);
      out += ' ';
      out += to_string(t.order_by[i].direction);
    }
  }
  if (t.limit) out += " limit " + std::to_string(*t.limit);
  if (t.set_op) {
    out += ' ';
    out += to_string(t.set_op->op);
    out += ' ';
    out += print(*t.set_op->right);
  }
  return out;
}

// ---- traversal ----

namespace {

void visit_impl(const ClauseTree& core, std::vector<const ClauseTree*>& outer,
                const CoreVisitor& fn) {
  fn(core, outer);
  for (const auto& f : core.from)
    if (f.subquery) visit_impl(**f.subquery, outer, fn);

  outer.push_back(&core);
  auto visit_operand = [&](const Operand& o) {
    if (const auto* s = std::get_if<Subquery>(&o)) visit_impl(**s, outer, fn);
  };
  auto visit_conditions = [&](const std::vector<Condition>& conds) {
    for (const auto& c : conds) {
      visit_operand(c.right);
      if (c.upper) visit_operand(*c.upper);
    }
  };
  for (const auto& f : core.from) visit_conditions(f.on);
  visit_conditions(core.where);
  visit_conditions(core.having);
  outer.pop_back();

  if (core.set_op) visit_impl(*core.set_op->right, outer, fn);
}

}  // namespace

void visit_cores(const ClauseTree& tree, const CoreVisitor& fn) {
  std::vector<const ClauseTree*> outer;
  visit_impl(tree, outer, fn);
}

void for_each_expr(const ClauseTree& core, const std::function<void(const Expr&)>& fn) {
  auto conds = [&](const std::vector<Condition>& cs) {
    for (const auto& c : cs) {
      if (!c.left.empty()) fn(c.left);
      if (const auto* e = std::get_if<Expr>(&c.right)) fn(*e);
      if (c.upper)
        if (const auto* e = std::get_if<Expr>(&*c.upper)) fn(*e);
    }
  };
  for (const auto& e : core.select_items) fn(e);
  for (const auto& f : core.from) conds(f.on);
  conds(core.where);
  for (const auto& e : core.group_by) fn(e);
  conds(core.having);
  for (const auto& o : core.order_by) fn(o.expr);
}

}  // namespace t2s::sql
