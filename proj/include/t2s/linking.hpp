#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "t2s/schema.hpp"

namespace t2s {

namespace sql {
struct ClauseTree;
}

// Gold relevance of each schema item: 1 when the query references it.
struct LinkLabels {
  std::vector<int> table_labels;               // length N
  std::vector<std::vector<int>> column_labels;  // n_i per table

  bool operator==(const LinkLabels&) const = default;
};

// Predicted probability that each schema item is referenced.
struct SchemaScores {
  std::vector<double> table_probs;
  std::vector<std::vector<double>> column_probs;

  bool operator==(const SchemaScores&) const = default;
};

struct RankConfig {
  std::size_t k1 = 4;  // tables kept
  std::size_t k2 = 5;  // columns kept per table
  bool include_foreign_keys = false;
  bool include_content = false;
};

struct RankedTable {
  std::size_t table = 0;            // index into DatabaseSchema::tables
  double table_prob = 0.0;
  std::vector<std::size_t> columns;  // indices into the table's columns, best first
  std::vector<double> column_probs;

  bool operator==(const RankedTable&) const = default;
};

// Qualified column ("table.column", lowercase original names) -> matched cells.
using CellMatches = std::map<std::string, std::vector<std::string>>;

struct RankedSchema {
  std::vector<RankedTable> tables;  // best first
  CellMatches matched_values;

  bool operator==(const RankedSchema&) const = default;
};

// Labels every table named in any from clause (subqueries and set-operation
// branches included) and every column referenced anywhere in the query.
// Unqualified columns resolve against the from clauses in scope, innermost
// first. `*` labels nothing. Throws LinkageError for items absent from the
// schema.
LinkLabels derive_labels(const sql::ClauseTree& tree, const DatabaseSchema& schema);
LinkLabels derive_labels(std::string_view sql, const DatabaseSchema& schema);

// Labels reinterpreted as probabilities (1.0 / 0.0).
SchemaScores scores_from_labels(const LinkLabels& labels);

// Deterministic lexical stand-in for a trained relevance classifier: token-set
// overlap coefficient between question and item name (best of semantic and
// original name), plus a 0.3 bonus for columns with a matching cell value,
// capped at 1.
SchemaScores lexical_scores(std::string_view question, const DatabaseSchema& schema);

// Validates externally produced probabilities against the schema shape.
// Throws ShapeError naming the offending table, RangeError for values outside
// [0, 1], FormatError for non-numeric entries.
SchemaScores ingest_scores(const nlohmann::json& document, const DatabaseSchema& schema);

// Keeps the top-k1 tables and the top-k2 columns of each kept table, ordered
// by probability. Ties go to the item earlier in default schema order.
RankedSchema rank_and_filter(const SchemaScores& scores, const DatabaseSchema& schema,
                             const RankConfig& config);

// question | t1 : c1 , c2 | t2 : ...   (semantic names, default order)
std::string build_cross_encoder_input(std::string_view question, const DatabaseSchema& schema);

// question | t : c ( 'v1' , 'v2' ) , ... | ... | ta.ca = tb.cb | ...
// Lowercase original names in ranked order. Cell values appear only with
// include_content; foreign keys only with include_foreign_keys and only when
// both endpoint tables were kept.
std::string build_ranked_input(std::string_view question, const RankedSchema& ranked,
                               const DatabaseSchema& schema, const RankConfig& config);

// Sample cells whose lowercase form occurs as a whole word in the lowercase
// question. At most two per column, longest first.
CellMatches match_cell_values(std::string_view question, const DatabaseSchema& schema);

}  // namespace t2s
