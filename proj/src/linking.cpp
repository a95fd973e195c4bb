#include "t2s/linking.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "t2s/error.hpp"
#include "t2s/normalizer.hpp"
#include "t2s/sql_dialect.hpp"
#include "t2s/text.hpp"

namespace t2s {

namespace {

std::string qualified_name(const DatabaseSchema& schema, ColumnId id) {
  return to_lower(schema.tables[id.table].original_name) + "." +
         to_lower(schema.column(id).original_name);
}

std::size_t require_table(const DatabaseSchema& schema, const std::string& name) {
  auto t = schema.find_table(name);
  if (!t) throw LinkageError("table '" + name + "' is not in schema '" + schema.db_id + "'");
  return *t;
}

}  // namespace

LinkLabels derive_labels(const sql::ClauseTree& tree, const DatabaseSchema& schema) {
  LinkLabels labels;
  labels.table_labels.assign(schema.tables.size(), 0);
  for (const auto& t : schema.tables) labels.column_labels.emplace_back(t.columns.size(), 0);

  // Tables visible to a query for resolving unqualified columns: its own from
  // tables, then the tables inside its derived tables.
  auto scope_tables = [](const sql::ClauseTree& core) {
    std::vector<std::string> names;
    for (const auto& f : core.from)
      if (!f.subquery) names.push_back(f.table);
    for (const auto& f : core.from)
      if (f.subquery)
        sql::visit_cores(**f.subquery, [&](const sql::ClauseTree& c, auto) {
          for (const auto& g : c.from)
            if (!g.subquery) names.push_back(g.table);
        });
    return names;
  };

  sql::visit_cores(tree, [&](const sql::ClauseTree& core,
                             std::span<const sql::ClauseTree* const> outer) {
    for (const auto& name : core.from_tables()) labels.table_labels[require_table(schema, name)] = 1;

    sql::for_each_expr(core, [&](const sql::Expr& e) {
      for (const auto& ref : sql::column_refs(e)) {
        if (!ref.table.empty()) {
          const std::size_t t = require_table(schema, ref.table);
          auto c = schema.find_column(t, ref.column);
          if (!c)
            throw LinkageError("column '" + ref.qualified() + "' is not in schema '" +
                               schema.db_id + "'");
          labels.column_labels[t][*c] = 1;
          continue;
        }
        bool found = false;
        auto search = [&](const sql::ClauseTree& scope) {
          for (const auto& name : scope_tables(scope)) {
            const std::size_t t = require_table(schema, name);
            if (auto c = schema.find_column(t, ref.column)) {
              labels.column_labels[t][*c] = 1;
              return true;
            }
          }
          return false;
        };
        found = search(core);
        for (auto it = outer.rbegin(); !found && it != outer.rend(); ++it) found = search(**it);
        if (!found)
          throw LinkageError("column '" + ref.column + "' does not resolve to any table in scope");
      }
    });
  });

  for (std::size_t t = 0; t < labels.column_labels.size(); ++t)
    if (std::any_of(labels.column_labels[t].begin(), labels.column_labels[t].end(),
                    [](int v) { return v == 1; }))
      labels.table_labels[t] = 1;
  return labels;
}

LinkLabels derive_labels(std::string_view sql_text, const DatabaseSchema& schema) {
  return derive_labels(sql::parse(normalize_sql(sql_text).text), schema);
}

SchemaScores scores_from_labels(const LinkLabels& labels) {
  SchemaScores s;
  for (int v : labels.table_labels) s.table_probs.push_back(v ? 1.0 : 0.0);
  for (const auto& row : labels.column_labels) {
    auto& out = s.column_probs.emplace_back();
    for (int v : row) out.push_back(v ? 1.0 : 0.0);
  }
  return s;
}

// ---- lexical scorer ----

namespace {

// Folds common English plurals so "cities" meets "city".
std::string fold_plural(std::string w) {
  if (w.size() > 4 && w.ends_with("ies")) return w.substr(0, w.size() - 3) + "y";
  if (w.size() > 3 && w.ends_with('s') && !w.ends_with("ss")) w.pop_back();
  return w;
}

std::set<std::string> word_set(std::string_view s) {
  std::set<std::string> out;
  for (auto& w : word_tokens(s)) out.insert(fold_plural(std::move(w)));
  return out;
}

double overlap_coefficient(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& w : a) common += b.count(w);
  return static_cast<double>(common) / static_cast<double>(std::min(a.size(), b.size()));
}

double name_score(const std::set<std::string>& question, std::string_view semantic,
                  std::string_view original) {
  return std::max(overlap_coefficient(word_set(semantic), question),
                  overlap_coefficient(word_set(original), question));
}

}  // namespace

SchemaScores lexical_scores(std::string_view question, const DatabaseSchema& schema) {
  const auto q = word_set(question);
  const CellMatches matches = match_cell_values(question, schema);
  SchemaScores s;
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const Table& t = schema.tables[ti];
    s.table_probs.push_back(name_score(q, t.semantic_name, t.original_name));
    auto& row = s.column_probs.emplace_back();
    for (std::size_t ci = 0; ci < t.columns.size(); ++ci) {
      const Column& c = t.columns[ci];
      double score = name_score(q, c.semantic_name, c.original_name);
      if (matches.contains(qualified_name(schema, {ti, ci}))) score = std::min(1.0, score + 0.3);
      row.push_back(score);
    }
  }
  return s;
}

SchemaScores ingest_scores(const nlohmann::json& doc, const DatabaseSchema& schema) {
  auto number = [](const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw FormatError(where + ": probability is not a number");
    const double p = v.get<double>();
    if (!(p >= 0.0 && p <= 1.0))
      throw RangeError(where + ": probability " + v.dump() + " outside [0, 1]");
    return p;
  };
  if (!doc.is_object() || !doc.contains("table_probs") || !doc.contains("column_probs"))
    throw FormatError("scores document needs 'table_probs' and 'column_probs'");
  const auto& tp = doc.at("table_probs");
  const auto& cp = doc.at("column_probs");
  if (!tp.is_array() || !cp.is_array()) throw FormatError("scores must be arrays");
  if (tp.size() != schema.tables.size())
    throw ShapeError("expected " + std::to_string(schema.tables.size()) +
                     " table probabilities, got " + std::to_string(tp.size()));

  SchemaScores s;
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const std::string tname = "table '" + schema.tables[ti].original_name + "'";
    s.table_probs.push_back(number(tp[ti], tname));
    if (ti >= cp.size()) throw ShapeError(tname + ": missing column probabilities");
    const auto& row = cp[ti];
    const std::size_t n = schema.tables[ti].columns.size();
    if (!row.is_array() || row.size() != n)
      throw ShapeError(tname + ": expected " + std::to_string(n) + " column probabilities, got " +
                       (row.is_array() ? std::to_string(row.size()) : "a non-array"));
    auto& out = s.column_probs.emplace_back();
    for (std::size_t ci = 0; ci < n; ++ci)
      out.push_back(number(row[ci], tname + " column " + std::to_string(ci)));
  }
  if (cp.size() != schema.tables.size())
    throw ShapeError("expected " + std::to_string(schema.tables.size()) +
                     " column probability rows, got " + std::to_string(cp.size()));
  return s;
}

// ---- ranking ----

namespace {

// Indices ordered by descending probability; equal probabilities keep
// default order.
std::vector<std::size_t> rank_indices(const std::vector<double>& probs, std::size_t keep) {
  std::vector<std::size_t> idx(probs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  if (idx.size() > keep) idx.resize(keep);
  return idx;
}

}  // namespace

RankedSchema rank_and_filter(const SchemaScores& scores, const DatabaseSchema& schema,
                             const RankConfig& config) {
  if (scores.table_probs.size() != schema.tables.size() ||
      scores.column_probs.size() != schema.tables.size())
    throw ShapeError("scores do not match schema '" + schema.db_id + "'");
  RankedSchema ranked;
  for (std::size_t t : rank_indices(scores.table_probs, config.k1)) {
    const auto& cprobs = scores.column_probs[t];
    if (cprobs.size() != schema.tables[t].columns.size())
      throw ShapeError("column scores do not match table '" + schema.tables[t].original_name + "'");
    RankedTable rt{t, scores.table_probs[t], {}, {}};
    for (std::size_t c : rank_indices(cprobs, config.k2)) {
      rt.columns.push_back(c);
      rt.column_probs.push_back(cprobs[c]);
    }
    ranked.tables.push_back(std::move(rt));
  }
  return ranked;
}

// ---- serialization ----

std::string build_cross_encoder_input(std::string_view question, const DatabaseSchema& schema) {
  std::string out(question);
  for (const Table& t : schema.tables) {
    out += " | ";
    out += t.semantic_name;
    out += " : ";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += " , ";
      out += t.columns[i].semantic_name;
    }
  }
  return out;
}

namespace {

std::string quote_value(const std::string& v) {
  std::string out = "'";
  for (char c : v) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

}  // namespace

std::string build_ranked_input(std::string_view question, const RankedSchema& ranked,
                               const DatabaseSchema& schema, const RankConfig& config) {
  CellMatches computed;
  const CellMatches* matches = &ranked.matched_values;
  if (config.include_content && ranked.matched_values.empty()) {
    computed = match_cell_values(question, schema);
    matches = &computed;
  }

  std::string out(question);
  std::set<std::size_t> kept;
  for (const RankedTable& rt : ranked.tables) {
    kept.insert(rt.table);
    const Table& t = schema.tables.at(rt.table);
    out += " | ";
    out += to_lower(t.original_name);
    out += " : ";
    for (std::size_t i = 0; i < rt.columns.size(); ++i) {
      if (i) out += " , ";
      out += to_lower(t.columns.at(rt.columns[i]).original_name);
      if (!config.include_content) continue;
      auto it = matches->find(qualified_name(schema, {rt.table, rt.columns[i]}));
      if (it == matches->end() || it->second.empty()) continue;
      out += " ( ";
      for (std::size_t v = 0; v < it->second.size(); ++v) {
        if (v) out += " , ";
        out += quote_value(it->second[v]);
      }
      out += " )";
    }
  }
  if (config.include_foreign_keys) {
    std::set<std::string> seen;
    for (const ForeignKey& fk : schema.foreign_keys) {
      if (!kept.contains(fk.from.table) || !kept.contains(fk.to.table)) continue;
      std::string seg = qualified_name(schema, fk.from) + " = " + qualified_name(schema, fk.to);
      if (!seen.insert(seg).second) continue;
      out += " | ";
      out += seg;
    }
  }
  return out;
}

CellMatches match_cell_values(std::string_view question, const DatabaseSchema& schema) {
  const std::string q = to_lower(question);
  CellMatches out;
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const auto& cols = schema.tables[ti].columns;
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
      std::vector<std::string> hits;
      std::set<std::string> seen;
      for (const auto& cell : cols[ci].sample_values) {
        const std::string key = to_lower(trim(cell));
        if (key.empty() || !seen.insert(key).second) continue;
        if (contains_whole_word(q, key)) hits.push_back(cell);
      }
      if (hits.empty()) continue;
      std::stable_sort(hits.begin(), hits.end(),
                       [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
      if (hits.size() > 2) hits.resize(2);
      out.emplace(qualified_name(schema, {ti, ci}), std::move(hits));
    }
  }
  return out;
}

}  // namespace t2s
