#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/schema.hpp"
#include "t2s/sqlite_db.hpp"

namespace t2s {

namespace sql {
struct ClauseTree;
}

struct DatasetInstance {
  std::string question_id;
  std::string db_id;
  std::string question;
  std::string query;  // gold; may be empty for unlabeled data
};

struct BeamCandidate {
  std::string sql;
  double score = 0.0;
};

struct Beam {
  std::string question_id;
  std::vector<BeamCandidate> candidates;  // best first
  std::string db_id;                      // optional routing hint
};

// Sorts candidates by non-increasing score (stable) and rejects empty beams.
Beam make_beam(std::string question_id, std::vector<BeamCandidate> candidates,
               std::string db_id = {});

struct InstanceRecord {
  std::string question_id;
  bool em = false;
  bool ex = false;
  std::string chosen_sql;
  std::optional<std::string> error;
  std::optional<std::size_t> beam_index;
  bool fallback = false;  // no beam candidate executed
};

struct EvalReport {
  std::vector<InstanceRecord> instances;
  double em_pct = 0.0;
  double ex_pct = 0.0;

  std::size_t n() const { return instances.size(); }
};

struct EvalOptions {
  std::chrono::milliseconds timeout = kDefaultTimeout;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Value-masked structural key of a query: select items, tables, join
// conditions, where/having conditions and group-by are compared as sets,
// order-by as a sequence, limit by presence only.
std::string exact_match_key(const sql::ClauseTree& tree);

// Throws CorpusError when gold does not parse; an unparseable prediction
// simply does not match.
bool exact_set_match(std::string_view pred, std::string_view gold);

// True when pred executes within the timeout and returns the gold rows,
// as a multiset unless both queries order their top-level results. Gold
// failure throws CorpusError.
bool execution_accuracy(std::string_view pred, std::string_view gold, const Database& db,
                        std::chrono::milliseconds timeout = kDefaultTimeout);

// Whether the statement runs to completion without error within the timeout.
// Empty results count as executable.
bool is_executable(std::string_view sql, const Database& db, std::chrono::milliseconds timeout);

struct Selection {
  std::string sql;
  std::size_t index = 0;
  bool fallback = false;
};

// First candidate, in beam order, that executes. When none does, the first
// candidate is returned with `fallback` set.
Selection select_executable(const Beam& beam, const Database& db,
                            std::chrono::milliseconds timeout = kDefaultTimeout);

// `{db_dir}/{db_id}/{db_id}.sqlite`
std::string database_path(const std::string& db_dir, const std::string& db_id);

using Predictions = std::map<std::string, std::string>;  // question_id -> sql
using Beams = std::map<std::string, Beam>;               // question_id -> beam

// Scores every instance; output order follows `dataset`. Missing predictions
// count as failures and carry an error note. Missing databases and failing
// gold queries throw CorpusError.
EvalReport evaluate_corpus(const std::vector<DatasetInstance>& dataset,
                           const Predictions& predictions, const std::string& db_dir,
                           const EvalOptions& options = {});
EvalReport evaluate_corpus(const std::vector<DatasetInstance>& dataset, const Beams& beams,
                           const std::string& db_dir, const EvalOptions& options = {});

// Aggregates recomputed from the per-instance records.
void finalize(EvalReport& report);

// Copy of `schema` with up to `per_column` distinct non-null cells per column
// read from `db`.
DatabaseSchema populate_sample_values(const DatabaseSchema& schema, const Database& db,
                                      std::size_t per_column = 100);

}  // namespace t2s
