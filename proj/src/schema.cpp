#include "t2s/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "t2s/error.hpp"
#include "t2s/text.hpp"

namespace t2s {

using nlohmann::json;

std::string_view to_string(ColumnType type) {
  switch (type) {
    case ColumnType::text: return "text";
    case ColumnType::number: return "number";
    case ColumnType::time: return "time";
    case ColumnType::boolean: return "boolean";
    case ColumnType::other: return "others";
  }
  return "others";
}

ColumnType column_type_from_string(std::string_view tag) {
  if (tag == "text") return ColumnType::text;
  if (tag == "number") return ColumnType::number;
  if (tag == "time") return ColumnType::time;
  if (tag == "boolean") return ColumnType::boolean;
  return ColumnType::other;
}

std::size_t DatabaseSchema::column_count() const {
  std::size_t m = 0;
  for (const auto& t : tables) m += t.columns.size();
  return m;
}

std::optional<std::size_t> DatabaseSchema::find_table(std::string_view name) const {
  const std::string key = to_lower(name);
  for (std::size_t i = 0; i < tables.size(); ++i)
    if (to_lower(tables[i].original_name) == key) return i;
  return std::nullopt;
}

std::optional<std::size_t> DatabaseSchema::find_column(std::size_t table,
                                                       std::string_view name) const {
  const std::string key = to_lower(name);
  const auto& cols = tables.at(table).columns;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (to_lower(cols[i].original_name) == key) return i;
  return std::nullopt;
}

namespace {

bool has_delimiter(std::string_view s) {
  return s.find_first_of("|:,") != std::string_view::npos;
}

bool resolves(const DatabaseSchema& s, ColumnId id) {
  return id.table < s.tables.size() && id.column < s.tables[id.table].columns.size();
}

std::string describe(ColumnId id) {
  return "(" + std::to_string(id.table) + ", " + std::to_string(id.column) + ")";
}

}  // namespace

std::vector<std::string> validate(const DatabaseSchema& schema) {
  std::vector<std::string> out;
  const std::string where = "db '" + schema.db_id + "': ";
  if (schema.tables.empty()) out.push_back(where + "schema has no tables");

  std::set<std::string> table_names;
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const Table& t = schema.tables[ti];
    const std::string tw = where + "table " + std::to_string(ti) + " '" + t.original_name + "': ";
    if (t.original_name.empty()) out.push_back(tw + "empty original name");
    if (has_delimiter(t.original_name)) out.push_back(tw + "original name contains a delimiter");
    if (t.semantic_name.empty()) out.push_back(tw + "empty semantic name");
    if (!table_names.insert(to_lower(t.original_name)).second)
      out.push_back(tw + "duplicate table name");
    if (t.columns.empty()) out.push_back(tw + "table has no columns");

    std::set<std::string> col_names;
    for (std::size_t ci = 0; ci < t.columns.size(); ++ci) {
      const Column& c = t.columns[ci];
      const std::string cw = tw + "column " + std::to_string(ci) + " '" + c.original_name + "': ";
      if (c.original_name.empty()) out.push_back(cw + "empty original name");
      if (has_delimiter(c.original_name)) out.push_back(cw + "original name contains a delimiter");
      if (c.semantic_name.empty()) out.push_back(cw + "empty semantic name");
      if (!col_names.insert(to_lower(c.original_name)).second)
        out.push_back(cw + "duplicate column name");
    }
  }
  for (const auto& fk : schema.foreign_keys) {
    if (!resolves(schema, fk.from) || !resolves(schema, fk.to))
      out.push_back(where + "foreign key " + describe(fk.from) + " -> " + describe(fk.to) +
                    " does not resolve");
  }
  for (const auto& pk : schema.primary_keys)
    if (!resolves(schema, pk)) out.push_back(where + "primary key " + describe(pk) + " does not resolve");
  return out;
}

namespace {

[[noreturn]] void malformed(const std::string& db_id, const std::string& field,
                            const std::string& detail) {
  throw FormatError("schema '" + db_id + "', field '" + field + "': " + detail);
}

const json& require(const json& entry, const std::string& db_id, const char* field) {
  auto it = entry.find(field);
  if (it == entry.end()) malformed(db_id, field, "missing");
  return *it;
}

std::vector<std::string> string_array(const json& entry, const std::string& db_id,
                                      const char* field) {
  const json& v = require(entry, db_id, field);
  if (!v.is_array()) malformed(db_id, field, "expected an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) malformed(db_id, field, "expected strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<std::pair<int, std::string>> column_array(const json& entry,
                                                      const std::string& db_id,
                                                      const char* field) {
  const json& v = require(entry, db_id, field);
  if (!v.is_array()) malformed(db_id, field, "expected an array");
  std::vector<std::pair<int, std::string>> out;
  for (const auto& p : v) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_string())
      malformed(db_id, field, "expected [table_index, name] pairs");
    out.emplace_back(p[0].get<int>(), p[1].get<std::string>());
  }
  return out;
}

// Maps a flat index (as used by foreign_keys/primary_keys) to a ColumnId, or
// nullopt for the star pseudo-column and out-of-range indices.
class FlatIndex {
 public:
  void push_star() { ids_.emplace_back(std::nullopt); }
  void push(ColumnId id) { ids_.emplace_back(id); }

  std::optional<ColumnId> at(long long flat) const {
    if (flat < 0 || static_cast<std::size_t>(flat) >= ids_.size()) return std::nullopt;
    return ids_[static_cast<std::size_t>(flat)];
  }

 private:
  std::vector<std::optional<ColumnId>> ids_;
};

// Out-of-range references are kept as an unresolvable id so validate()
// reports them together with every other violation.
constexpr ColumnId kDangling{static_cast<std::size_t>(-1), static_cast<std::size_t>(-1)};

DatabaseSchema load_one(const json& entry) {
  if (!entry.is_object()) throw FormatError("schema entry is not an object");
  auto id_it = entry.find("db_id");
  if (id_it == entry.end() || !id_it->is_string())
    throw FormatError("schema entry without a string 'db_id'");
  DatabaseSchema schema;
  schema.db_id = id_it->get<std::string>();
  const std::string& db = schema.db_id;

  auto t_orig = string_array(entry, db, "table_names_original");
  auto t_sem = string_array(entry, db, "table_names");
  if (t_orig.size() != t_sem.size())
    malformed(db, "table_names", "length differs from table_names_original");
  for (std::size_t i = 0; i < t_orig.size(); ++i)
    schema.tables.push_back(Table{t_orig[i], t_sem[i], {}});

  auto c_orig = column_array(entry, db, "column_names_original");
  auto c_sem = column_array(entry, db, "column_names");
  if (c_orig.size() != c_sem.size())
    malformed(db, "column_names", "length differs from column_names_original");
  std::vector<std::string> types;
  if (entry.contains("column_types")) {
    types = string_array(entry, db, "column_types");
    if (types.size() != c_orig.size())
      malformed(db, "column_types", "length differs from column_names_original");
  }

  FlatIndex flat;
  for (std::size_t i = 0; i < c_orig.size(); ++i) {
    const auto& [table_index, name] = c_orig[i];
    if (c_sem[i].first != table_index)
      malformed(db, "column_names", "table index differs from column_names_original at " +
                                        std::to_string(i));
    if (table_index == -1) {
      flat.push_star();
      continue;
    }
    if (table_index < 0 || static_cast<std::size_t>(table_index) >= schema.tables.size())
      malformed(db, "column_names_original",
                "table index " + std::to_string(table_index) + " out of range");
    auto& cols = schema.tables[static_cast<std::size_t>(table_index)].columns;
    flat.push(ColumnId{static_cast<std::size_t>(table_index), cols.size()});
    cols.push_back(Column{name, c_sem[i].second,
                          types.empty() ? ColumnType::text : column_type_from_string(types[i]),
                          {}});
  }

  if (entry.contains("foreign_keys")) {
    const json& fks = entry.at("foreign_keys");
    if (!fks.is_array()) malformed(db, "foreign_keys", "expected an array");
    for (const auto& p : fks) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
        malformed(db, "foreign_keys", "expected [column_index, column_index] pairs");
      auto a = flat.at(p[0].get<long long>());
      auto b = flat.at(p[1].get<long long>());
      schema.foreign_keys.push_back(ForeignKey{a.value_or(kDangling), b.value_or(kDangling)});
    }
  }
  if (entry.contains("primary_keys")) {
    const json& pks = entry.at("primary_keys");
    if (!pks.is_array()) malformed(db, "primary_keys", "expected an array");
    for (const auto& p : pks) {
      // Composite keys appear as nested arrays in some releases.
      auto push = [&](const json& v) {
        if (!v.is_number_integer()) malformed(db, "primary_keys", "expected column indices");
        schema.primary_keys.push_back(flat.at(v.get<long long>()).value_or(kDangling));
      };
      if (p.is_array())
        for (const auto& q : p) push(q);
      else
        push(p);
    }
  }
  return schema;
}

}  // namespace

SchemaMap load_schemas(const json& document) {
  if (!document.is_array()) throw FormatError("schema document must be a JSON array");
  SchemaMap out;
  std::vector<std::string> violations;
  for (const auto& entry : document) {
    DatabaseSchema schema = load_one(entry);
    auto v = validate(schema);
    violations.insert(violations.end(), v.begin(), v.end());
    const std::string id = schema.db_id;
    if (!out.emplace(id, std::move(schema)).second)
      violations.push_back("db '" + id + "': duplicate db_id");
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return out;
}

SchemaMap load_schemas_from_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("schema document is not valid JSON: ") + e.what());
  }
  return load_schemas(doc);
}

SchemaMap load_schemas_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open schema file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_schemas_from_string(ss.str());
}

json to_json(const DatabaseSchema& schema) {
  json entry;
  entry["db_id"] = schema.db_id;
  json t_orig = json::array(), t_sem = json::array();
  json c_orig = json::array({json::array({-1, "*"})});
  json c_sem = json::array({json::array({-1, "*"})});
  json types = json::array({"text"});
  std::vector<std::size_t> offset;
  std::size_t flat = 1;
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const Table& t = schema.tables[ti];
    t_orig.push_back(t.original_name);
    t_sem.push_back(t.semantic_name);
    offset.push_back(flat);
    for (const Column& c : t.columns) {
      c_orig.push_back(json::array({ti, c.original_name}));
      c_sem.push_back(json::array({ti, c.semantic_name}));
      types.push_back(std::string(to_string(c.type)));
      ++flat;
    }
  }
  auto flat_of = [&](ColumnId id) { return offset.at(id.table) + id.column; };
  json fks = json::array();
  for (const auto& fk : schema.foreign_keys) fks.push_back(json::array({flat_of(fk.from), flat_of(fk.to)}));
  json pks = json::array();
  for (const auto& pk : schema.primary_keys) pks.push_back(flat_of(pk));

  entry["table_names_original"] = std::move(t_orig);
  entry["table_names"] = std::move(t_sem);
  entry["column_names_original"] = std::move(c_orig);
  entry["column_names"] = std::move(c_sem);
  entry["column_types"] = std::move(types);
  entry["foreign_keys"] = std::move(fks);
  entry["primary_keys"] = std::move(pks);
  return entry;
}

json to_json(const SchemaMap& schemas) {
  json doc = json::array();
  for (const auto& [id, s] : schemas) doc.push_back(to_json(s));
  return doc;
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error([&] {
        std::string msg = "schema validation failed:";
        for (const auto& v : violations) msg += "\n  " + v;
        return msg;
      }()),
      violations_(std::move(violations)) {}

}  // namespace t2s
