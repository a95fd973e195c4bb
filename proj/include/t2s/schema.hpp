#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace t2s {

enum class ColumnType { text, number, time, boolean, other };

std::string_view to_string(ColumnType type);
ColumnType column_type_from_string(std::string_view tag);

struct Column {
  std::string original_name;
  std::string semantic_name;
  ColumnType type = ColumnType::text;
  // Cell contents used for content enrichment. Empty unless a database scan
  // filled them in.
  std::vector<std::string> sample_values;

  bool operator==(const Column&) const = default;
};

struct Table {
  std::string original_name;
  std::string semantic_name;
  std::vector<Column> columns;  // default order

  bool operator==(const Table&) const = default;
};

// Position of a column inside a schema: table index, then column index in
// that table.
struct ColumnId {
  std::size_t table = 0;
  std::size_t column = 0;

  auto operator<=>(const ColumnId&) const = default;
};

struct ForeignKey {
  ColumnId from;
  ColumnId to;

  bool operator==(const ForeignKey&) const = default;
};

struct DatabaseSchema {
  std::string db_id;
  std::vector<Table> tables;  // default order
  std::vector<ForeignKey> foreign_keys;
  std::vector<ColumnId> primary_keys;

  // N
  std::size_t table_count() const { return tables.size(); }
  // M = sum of per-table column counts. The star pseudo-column is not a column.
  std::size_t column_count() const;

  // Case-insensitive lookups on original names.
  std::optional<std::size_t> find_table(std::string_view name) const;
  std::optional<std::size_t> find_column(std::size_t table,
                                         std::string_view name) const;

  const Column& column(ColumnId id) const {
    return tables.at(id.table).columns.at(id.column);
  }

  bool operator==(const DatabaseSchema&) const = default;
};

using SchemaMap = std::map<std::string, DatabaseSchema>;

// Returns every invariant violation of `schema`; empty when valid.
std::vector<std::string> validate(const DatabaseSchema& schema);

// Parses a tables.json-style document (JSON array of database entries).
// Throws FormatError for malformed entries and ValidationError listing all
// invariant violations.
SchemaMap load_schemas(const nlohmann::json& document);
SchemaMap load_schemas_from_string(std::string_view text);
SchemaMap load_schemas_from_file(const std::string& path);

// Inverse of load_schemas for a single entry. The star pseudo-column is
// emitted at flat index 0, so foreign-key indices are 1 + global ordinal.
nlohmann::json to_json(const DatabaseSchema& schema);
nlohmann::json to_json(const SchemaMap& schemas);

}  // namespace t2s
