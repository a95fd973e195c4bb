#pragma once

#include <string>
#include <string_view>
#include <utility>

#include "t2s/normalizer.hpp"

namespace t2s {

namespace sql {
struct ClauseTree;
}

struct Skeleton {
  std::string text;
};

// Separator between the skeleton and the query in a decoding target.
inline constexpr std::string_view kTargetDelimiter = " | ";

// Keeps clause keywords, collapses each clause body to `_`. The whole from
// clause (joins included) becomes `from _`, subqueries disappear into their
// parent's slot, and order-by directions are kept. Set operations emit both
// sides around the operator keyword.
Skeleton extract_skeleton(const NormalizedSql& normalized);
Skeleton extract_skeleton(const sql::ClauseTree& tree);

// skeleton + " | " + normalized query
std::string build_target(const NormalizedSql& normalized);

struct SplitOutput {
  std::string skeleton;
  std::string sql;
};

// Splits decoder output at the last " | ". Without a delimiter the skeleton
// is empty and the whole (trimmed) text is the query.
SplitOutput split_output(std::string_view decoded);

}  // namespace t2s
