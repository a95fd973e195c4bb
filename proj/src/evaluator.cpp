#include "t2s/evaluator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

#include "t2s/error.hpp"
#include "t2s/sql_dialect.hpp"
#include "t2s/text.hpp"

namespace t2s {

Beam make_beam(std::string question_id, std::vector<BeamCandidate> candidates, std::string db_id) {
  if (candidates.empty()) throw FormatError("beam '" + question_id + "' has no candidates");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const BeamCandidate& a, const BeamCandidate& b) { return a.score > b.score; });
  return Beam{std::move(question_id), std::move(candidates), std::move(db_id)};
}

// ---- exact set match ----

namespace {

using namespace sql;

constexpr std::string_view kValue = "value";

// Qualifies bare columns when the query reads a single table, and masks
// literals.
std::string canonical_expr(const Expr& e, const ClauseTree& core) {
  std::string single;
  if (core.from.size() == 1 && !core.from[0].subquery) single = core.from[0].table;

  std::vector<Token> out;
  const auto& tk = e.tokens;
  for (std::size_t i = 0; i < tk.size(); ++i) {
    Token t = tk[i];
    if (t.is_literal()) {
      t.text = kValue;
    } else if (t.kind == TokenKind::identifier && !single.empty() &&
               !(i + 1 < tk.size() && (tk[i + 1].is_punct(".") || tk[i + 1].is_punct("("))) &&
               !(i > 0 && tk[i - 1].is_punct("."))) {
      out.push_back(Token{TokenKind::identifier, single, single, 0});
      out.push_back(Token{TokenKind::punctuation, ".", ".", 0});
    }
    out.push_back(std::move(t));
  }
  Expr c = e;
  c.tokens = std::move(out);
  return print(c) + (e.distinct ? "#d" : "");
}

std::string canonical_operand(const Operand& o, const ClauseTree& core) {
  if (const auto* l = std::get_if<Literal>(&o)) return l->is_null_test ? l->text : std::string(kValue);
  if (const auto* e = std::get_if<Expr>(&o)) return canonical_expr(*e, core);
  return "(" + exact_match_key(*std::get<Subquery>(o)) + ")";
}

std::string canonical_condition(const Condition& c, const ClauseTree& core) {
  std::string out = c.left.empty() ? "" : canonical_expr(c.left, core);
  out += ' ';
  out += to_string(c.comparator);
  out += ' ';
  out += canonical_operand(c.right, core);
  if (c.upper) out += " and " + canonical_operand(*c.upper, core);
  return out;
}

std::string set_of(std::set<std::string> items) {
  return "{" + join(std::vector<std::string>(items.begin(), items.end()), ";") + "}";
}

std::string condition_key(const std::vector<Condition>& conds, const ClauseTree& core) {
  std::set<std::string> items;
  std::multiset<std::string> ops;
  for (std::size_t i = 0; i < conds.size(); ++i) {
    items.insert(canonical_condition(conds[i], core));
    if (i) ops.insert(std::string(to_string(conds[i].joined_by)));
  }
  return set_of(std::move(items)) + "[" + join(std::vector<std::string>(ops.begin(), ops.end()), ",") + "]";
}

}  // namespace

std::string exact_match_key(const ClauseTree& t) {
  std::string key = "select";
  if (t.distinct) key += " distinct";
  std::set<std::string> items;
  for (const auto& e : t.select_items) items.insert(canonical_expr(e, t));
  key += set_of(std::move(items));

  std::set<std::string> from, joins;
  for (const auto& f : t.from) {
    from.insert(f.subquery ? "(" + exact_match_key(**f.subquery) + ")" : f.table);
    for (const auto& c : f.on) {
      std::string cond = canonical_condition(c, t);
      if (c.comparator == Comparator::eq) {
        std::string l = c.left.empty() ? "" : canonical_expr(c.left, t);
        std::string r = canonical_operand(c.right, t);
        if (r < l) std::swap(l, r);
        cond = l + " = " + r;
      }
      joins.insert(std::move(cond));
    }
  }
  key += " from" + set_of(std::move(from)) + " join" + set_of(std::move(joins));
  key += " where" + condition_key(t.where, t);
  std::set<std::string> group;
  for (const auto& e : t.group_by) group.insert(canonical_expr(e, t));
  key += " group" + set_of(std::move(group));
  key += " having" + condition_key(t.having, t);
  key += " order[";
  for (const auto& o : t.order_by) key += canonical_expr(o.expr, t) + " " + std::string(to_string(o.direction)) + ";";
  key += "]";
  key += t.limit ? " limit" : " nolimit";
  if (t.set_op) key += " " + std::string(to_string(t.set_op->op)) + " (" + exact_match_key(*t.set_op->right) + ")";
  return key;
}

bool exact_set_match(std::string_view pred, std::string_view gold) {
  std::string gold_key;
  try {
    gold_key = exact_match_key(parse(gold));
  } catch (const Error& e) {
    throw CorpusError("gold query does not parse: " + std::string(e.what()));
  }
  try {
    return exact_match_key(parse(pred)) == gold_key;
  } catch (const Error&) {
    return false;
  }
}

// ---- execution ----

namespace {

bool orders_top_level(std::string_view sql) {
  try {
    return !parse(sql).order_by.empty();
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

bool is_executable(std::string_view sql, const Database& db, std::chrono::milliseconds timeout) {
  try {
    db.query(sql, timeout);
    return true;
  } catch (const DatabaseError&) {
    return false;
  }
}

bool execution_accuracy(std::string_view pred, std::string_view gold, const Database& db,
                        std::chrono::milliseconds timeout) {
  ResultSet gold_rows;
  try {
    gold_rows = db.query(gold, timeout);
  } catch (const DatabaseError& e) {
    throw CorpusError("gold query fails on '" + db.path() + "': " + e.what());
  }
  ResultSet pred_rows;
  try {
    pred_rows = db.query(pred, timeout);
  } catch (const DatabaseError&) {
    return false;
  }
  const bool ordered = orders_top_level(gold) && orders_top_level(pred);
  return same_rows(pred_rows, gold_rows, ordered);
}

Selection select_executable(const Beam& beam, const Database& db, std::chrono::milliseconds timeout) {
  for (std::size_t i = 0; i < beam.candidates.size(); ++i)
    if (is_executable(beam.candidates[i].sql, db, timeout)) return {beam.candidates[i].sql, i, false};
  return {beam.candidates.front().sql, 0, true};
}

std::string database_path(const std::string& db_dir, const std::string& db_id) {
  return (std::filesystem::path(db_dir) / db_id / (db_id + ".sqlite")).string();
}

// ---- corpus ----

void finalize(EvalReport& report) {
  std::size_t em = 0, ex = 0;
  for (const auto& r : report.instances) {
    em += r.em ? 1 : 0;
    ex += r.ex ? 1 : 0;
  }
  const double n = static_cast<double>(report.instances.size());
  report.em_pct = n > 0 ? 100.0 * static_cast<double>(em) / n : 0.0;
  report.ex_pct = n > 0 ? 100.0 * static_cast<double>(ex) / n : 0.0;
}

namespace {

// Produces the prediction to score for one instance, filling any selection
// details into the record. Returns nullopt when there is no prediction.
using Chooser =
    std::function<std::optional<std::string>(const DatasetInstance&, const Database&, InstanceRecord&)>;

EvalReport run_corpus(const std::vector<DatasetInstance>& dataset, const std::string& db_dir,
                      const EvalOptions& options, const Chooser& choose) {
  for (const auto& inst : dataset)
    if (!std::filesystem::exists(database_path(db_dir, inst.db_id)))
      throw CorpusError("missing database for '" + inst.question_id + "': " +
                        database_path(db_dir, inst.db_id));

  EvalReport report;
  report.instances.resize(dataset.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::map<std::string, Database> connections;  // owned by this worker only
    for (std::size_t i = next++; i < dataset.size(); i = next++) {
      try {
        const DatasetInstance& inst = dataset[i];
        auto it = connections.find(inst.db_id);
        if (it == connections.end())
          it = connections.emplace(inst.db_id, Database::open_read_only(database_path(db_dir, inst.db_id))).first;
        const Database& db = it->second;

        InstanceRecord rec;
        rec.question_id = inst.question_id;
        std::optional<std::string> pred = choose(inst, db, rec);
        if (!pred) {
          rec.error = "missing prediction";
          // Gold must still be well-formed.
          exact_set_match("", inst.query);
          db.query(inst.query, options.timeout);
        } else {
          rec.chosen_sql = *pred;
          rec.em = exact_set_match(*pred, inst.query);
          rec.ex = execution_accuracy(*pred, inst.query, db, options.timeout);
        }
        report.instances[i] = std::move(rec);
      } catch (const DatabaseError& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(CorpusError("database error for '" +
                                                        dataset[i].question_id + "': " + e.what()));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(dataset.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  finalize(report);
  return report;
}

}  // namespace

EvalReport evaluate_corpus(const std::vector<DatasetInstance>& dataset, const Predictions& predictions,
                           const std::string& db_dir, const EvalOptions& options) {
  return run_corpus(dataset, db_dir, options,
                    [&](const DatasetInstance& inst, const Database&, InstanceRecord&) -> std::optional<std::string> {
                      auto it = predictions.find(inst.question_id);
                      if (it == predictions.end()) return std::nullopt;
                      return it->second;
                    });
}

EvalReport evaluate_corpus(const std::vector<DatasetInstance>& dataset, const Beams& beams,
                           const std::string& db_dir, const EvalOptions& options) {
  return run_corpus(dataset, db_dir, options,
                    [&](const DatasetInstance& inst, const Database& db,
                        InstanceRecord& rec) -> std::optional<std::string> {
                      auto it = beams.find(inst.question_id);
                      if (it == beams.end()) return std::nullopt;
                      Selection s = select_executable(it->second, db, options.timeout);
                      rec.beam_index = s.index;
                      rec.fallback = s.fallback;
                      return s.sql;
                    });
}

// ---- content scan ----

namespace {

std::string quote_identifier(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    out += c;
    if (c == '"') out += '"';
  }
  return out + "\"";
}

}  // namespace

DatabaseSchema populate_sample_values(const DatabaseSchema& schema, const Database& db,
                                      std::size_t per_column) {
  DatabaseSchema out = schema;
  for (auto& table : out.tables) {
    for (auto& column : table.columns) {
      column.sample_values.clear();
      const std::string q = "select distinct " + quote_identifier(column.original_name) + " from " +
                            quote_identifier(table.original_name) + " where " +
                            quote_identifier(column.original_name) + " is not null limit " +
                            std::to_string(per_column);
      for (const auto& row : db.query(q, kDefaultTimeout).rows)
        if (!row.empty() && row[0].index() != 4) column.sample_values.push_back(to_display(row[0]));
    }
  }
  return out;
}

}  // namespace t2s
