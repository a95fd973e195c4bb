#include "t2s/normalizer.hpp"

#include "t2s/error.hpp"
#include "t2s/sql_dialect.hpp"

namespace t2s {

namespace {

void check_qualifiers(const sql::ClauseTree& tree) {
  sql::visit_cores(tree, [](const sql::ClauseTree& core,
                            std::span<const sql::ClauseTree* const> outer) {
    auto in_scope = [&](const std::string& table) {
      if (core.from_tables().contains(table)) return true;
      for (const auto* o : outer)
        if (o->from_tables().contains(table)) return true;
      return false;
    };
    sql::for_each_expr(core, [&](const sql::Expr& e) {
      for (const auto& ref : sql::column_refs(e))
        if (!ref.table.empty() && !in_scope(ref.table))
          throw NormalizationError("qualifier '" + ref.table + "' in '" + sql::print(e) +
                                   "' is neither a bound alias nor a table in scope");
    });
  });
}

}  // namespace

NormalizedSql normalize_sql(std::string_view sql) {
  sql::ClauseTree tree = sql::parse(sql);
  check_qualifiers(tree);
  return NormalizedSql{sql::print(tree), std::string(sql)};
}

}  // namespace t2s
