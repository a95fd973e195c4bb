#include "t2s/skeleton.hpp"

#include "t2s/sql_dialect.hpp"
#include "t2s/text.hpp"

namespace t2s {

Skeleton extract_skeleton(const sql::ClauseTree& t) {
  std::string out = "select _ from _";
  if (!t.where.empty()) out += " where _";
  if (!t.group_by.empty()) out += " group by _";
  if (!t.having.empty()) out += " having _";
  if (!t.order_by.empty()) {
    out += " order by _";
    // One direction per run of equal directions: `a asc , b asc` -> `_ asc`.
    for (std::size_t i = 0; i < t.order_by.size(); ++i) {
      if (i > 0 && t.order_by[i].direction == t.order_by[i - 1].direction) continue;
      if (i > 0) out += " _";
      out += ' ';
      out += sql::to_string(t.order_by[i].direction);
    }
  }
  if (t.limit) out += " limit _";
  if (t.set_op) {
    out += ' ';
    out += sql::to_string(t.set_op->op);
    out += ' ';
    out += extract_skeleton(*t.set_op->right).text;
  }
  return Skeleton{out};
}

Skeleton extract_skeleton(const NormalizedSql& normalized) {
  return extract_skeleton(sql::parse(normalized.text));
}

std::string build_target(const NormalizedSql& normalized) {
  return extract_skeleton(normalized).text + std::string(kTargetDelimiter) + normalized.text;
}

SplitOutput split_output(std::string_view decoded) {
  const auto pos = decoded.rfind(kTargetDelimiter);
  if (pos == std::string_view::npos) return {"", trim(decoded)};
  return {trim(decoded.substr(0, pos)), trim(decoded.substr(pos + kTargetDelimiter.size()))};
}

}  // namespace t2s
