#include <gtest/gtest.h>

#include "t2s/error.hpp"
#include "t2s/sql_dialect.hpp"

namespace t2s::sql {
namespace {

std::vector<std::string> texts(const std::vector<Token>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.text);
  return out;
}

TEST(Tokenize, SplitsOperatorsAndPunctuation) {
  const auto ts = tokenize("SELECT count(*) FROM t WHERE a>=1 AND b<>'x'");
  EXPECT_EQ(texts(ts), (std::vector<std::string>{"SELECT", "count", "(", "*", ")", "FROM", "t", "WHERE", "a", ">=",
                                                  "1", "AND", "b", "<>", "'x'"}));
  EXPECT_EQ(ts[0].kind, TokenKind::keyword);
  EXPECT_EQ(ts[6].kind, TokenKind::identifier);
  EXPECT_EQ(ts[10].kind, TokenKind::number_literal);
  EXPECT_EQ(ts[14].kind, TokenKind::string_literal);
  EXPECT_EQ(ts[7].offset, 23u);
}

TEST(Tokenize, StringsKeepContents) {
  const auto ts = tokenize(R"(select "It's" , 'a''b')");
  ASSERT_EQ(ts.size(), 4u);
  EXPECT_EQ(string_literal_value(ts[1]), "It's");
  EXPECT_EQ(string_literal_value(ts[3]), "a'b");
  EXPECT_EQ(canonical(ts[1]).text, "'It''s'");
}

TEST(Tokenize, NegativeNumbers) {
  EXPECT_EQ(texts(tokenize("a > -3")), (std::vector<std::string>{"a", ">", "-3"}));
  EXPECT_EQ(texts(tokenize("a - 3")), (std::vector<std::string>{"a", "-", "3"}));
  EXPECT_EQ(texts(tokenize("x = 1.5e3")), (std::vector<std::string>{"x", "=", "1.5e3"}));
}

TEST(Tokenize, LexErrors) {
  EXPECT_THROW(tokenize("select 'open"), LexError);
  try {
    tokenize("select a # b");
    FAIL();
  } catch (const LexError& e) {
    EXPECT_EQ(e.offset(), 9u);
  }
}

TEST(Tokenize, CanonicalOperators) {
  EXPECT_EQ(canonical(tokenize("<>")[0]).text, "!=");
  EXPECT_EQ(canonical(tokenize("==")[0]).text, "=");
  EXPECT_EQ(canonical(tokenize("FROM")[0]).text, "from");
  EXPECT_EQ(canonical(tokenize("T1")[0]).text, "t1");
}

TEST(Parse, ClauseStructure) {
  const ClauseTree t = parse(
      "SELECT DISTINCT a , count(*) FROM x JOIN y ON x.id = y.id WHERE a > 1 OR b LIKE '%z%' "
      "GROUP BY a HAVING count(*) >= 2 ORDER BY a DESC LIMIT 3");
  EXPECT_TRUE(t.distinct);
  ASSERT_EQ(t.select_items.size(), 2u);
  EXPECT_EQ(t.select_items[1].aggregate, Aggregate::count);
  EXPECT_EQ(t.from_tables(), (std::set<std::string>{"x", "y"}));
  EXPECT_EQ(t.join_conditions().size(), 1u);
  ASSERT_EQ(t.where.size(), 2u);
  EXPECT_EQ(t.where[1].joined_by, Connective::or_);
  EXPECT_EQ(t.where[1].comparator, Comparator::like);
  EXPECT_EQ(t.group_by.size(), 1u);
  EXPECT_EQ(t.having[0].comparator, Comparator::ge);
  EXPECT_EQ(t.order_by[0].direction, Direction::desc);
  EXPECT_EQ(t.limit, 3);
}

TEST(Parse, SubqueriesAndSetOperations) {
  const ClauseTree t = parse("select a from t where b in (select b from u) union select a from v");
  ASSERT_TRUE(t.set_op.has_value());
  EXPECT_EQ(t.set_op->op, SetOperator::union_);
  EXPECT_TRUE(std::holds_alternative<Subquery>(t.where[0].right));
  EXPECT_EQ(t.set_op->right->from_tables(), std::set<std::string>{"v"});
}

TEST(Parse, BetweenAndNullTests) {
  const ClauseTree t = parse("select a from t where a between 1 and 5 and b is not null");
  ASSERT_EQ(t.where.size(), 2u);
  EXPECT_EQ(t.where[0].comparator, Comparator::between);
  ASSERT_TRUE(t.where[0].upper.has_value());
  EXPECT_EQ(t.where[1].comparator, Comparator::is);
  EXPECT_EQ(print(t), "select a from t where a between 1 and 5 and b is not null");
}

TEST(Parse, AliasesResolveToTables) {
  EXPECT_EQ(print(parse("SELECT T1.a FROM foo AS T1 JOIN bar T2 ON T1.id = T2.id")),
            "select foo.a from foo join bar on foo.id = bar.id");
}

TEST(Parse, SelectAliasSubstitution) {
  EXPECT_EQ(print(parse("select a , count(*) as c from t group by a order by c desc")),
            "select a , count ( * ) from t group by a order by count ( * ) desc");
}

TEST(Parse, UnsupportedSyntax) {
  EXPECT_THROW(parse("select a from t left join u on t.x = u.x"), UnsupportedSyntax);
  EXPECT_THROW(parse("select a from t union all select a from u"), UnsupportedSyntax);
  EXPECT_THROW(parse("select a from t where (a = 1 or b = 2)"), UnsupportedSyntax);
  EXPECT_THROW(parse("select a from t where not exists (select * from u)"), UnsupportedSyntax);
  EXPECT_THROW(parse("select avg(n) from (select count(*) as n from t)"), UnsupportedSyntax);
  EXPECT_THROW(parse("select a from"), UnsupportedSyntax);
  EXPECT_THROW(parse("select a from t limit x"), UnsupportedSyntax);
}

TEST(Parse, PrintParseFixpoint) {
  const std::string s = "select count ( distinct t.a ) from t where t.b = 'x' order by t.a asc limit 2";
  EXPECT_EQ(print(parse(s)), s);
  EXPECT_EQ(parse(print(parse(s))), parse(s));
}

TEST(ClauseTree, ColumnRefsSkipFunctionNames) {
  const ClauseTree t = parse("select max(t.a) , b from t");
  const auto refs = column_refs(t.select_items[0]);
  ASSERT_EQ(refs.size(), 1u);
  EXPECT_EQ(refs[0].qualified(), "t.a");
}

TEST(ClauseTree, VisitCoresSeesNestedQueries) {
  const ClauseTree t = parse("select a from t where a in (select a from u) except select a from v");
  std::size_t count = 0;
  visit_cores(t, [&](const ClauseTree&, std::span<const ClauseTree* const>) { ++count; });
  EXPECT_EQ(count, 3u);
}

}  // namespace
}  // namespace t2s::sql
