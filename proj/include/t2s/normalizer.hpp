#pragma once

#include <string>
#include <string_view>

namespace t2s {

struct NormalizedSql {
  std::string text;
  std::string source;
};

// Rewrites a query into canonical form:
//   1. keywords and schema identifiers lowercase;
//   2. single spaces around parentheses, double quotes replaced by single;
//   3. an explicit `asc` on every order-by expression lacking a direction;
//   4. no `as` clauses, table aliases replaced by the tables they name.
// String-literal contents are left untouched.
//
// Throws the parser's errors, and NormalizationError when a qualifier names
// neither a bound alias nor a table in scope.
NormalizedSql normalize_sql(std::string_view sql);

}  // namespace t2s
