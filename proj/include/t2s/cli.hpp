#pragma once

// Batch commands behind the `t2s` executable. Each command reads JSONL
// records from `in`, writes one JSONL record per input record to `out` in
// input order, and reports per-record failures as JSON lines on `err`
// without stopping.

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "t2s/evaluator.hpp"
#include "t2s/linking.hpp"
#include "t2s/schema.hpp"

namespace t2s::cli {

struct PipelineConfig {
  std::string schema_path;
  std::string dataset_path;
  std::optional<std::string> scores_path;
  std::optional<std::string> db_dir;
  std::string out_path;  // empty = stdout
  RankConfig rank;
  std::chrono::milliseconds timeout = kDefaultTimeout;
  bool strict = false;

  // Throws FormatError when a referenced path is missing, RangeError when
  // k1 or k2 is zero.
  void validate() const;
};

struct BatchStatus {
  std::size_t records = 0;
  std::size_t failed = 0;
};

// Machine-readable error record: {"error": kind, "message": ..., ...context}.
std::string error_kind(const std::exception& e);
void write_error(std::ostream& err, const std::exception& e, const std::string& question_id = {},
                 std::size_t line = 0);

// Resolves db_id to schemas, filling sample cells from the database
// directory on first use when content enrichment is on.
class SchemaSource {
 public:
  SchemaSource(SchemaMap schemas, std::optional<std::string> db_dir, bool with_content);

  const DatabaseSchema& get(const std::string& db_id);

 private:
  SchemaMap schemas_;
  std::optional<std::string> db_dir_;
  bool with_content_;
  std::map<std::string, bool> populated_;
};

// {question_id, query} -> {question_id, normalized}
BatchStatus cmd_normalize(std::istream& in, std::ostream& out, std::ostream& err);
// {question_id, query} -> {question_id, skeleton, target}
BatchStatus cmd_skeleton(std::istream& in, std::ostream& out, std::ostream& err);
// dataset -> {question_id, table_labels, column_labels}
BatchStatus cmd_label(SchemaSource& schemas, std::istream& in, std::ostream& out, std::ostream& err);
// dataset -> {question_id, table_probs, column_probs} from the lexical scorer
BatchStatus cmd_score(SchemaSource& schemas, std::istream& in, std::ostream& out, std::ostream& err);
// dataset [+ scores, same order] -> {question_id, tables: [...]}
BatchStatus cmd_rank(SchemaSource& schemas, std::istream& in, std::istream* scores,
                     const RankConfig& config, std::ostream& out, std::ostream& err);
// dataset [+ scores] -> {question_id, input_sequence, target?}
BatchStatus cmd_prepare(SchemaSource& schemas, std::istream& in, std::istream* scores,
                        const RankConfig& config, std::ostream& out, std::ostream& err);
// beams -> {question_id, sql, beam_index, fallback}. Beams route to a
// database through their own db_id or through `routes`.
BatchStatus cmd_select(std::istream& beams, const std::map<std::string, std::string>& routes,
                       const std::string& db_dir, std::chrono::milliseconds timeout,
                       std::ostream& out, std::ostream& err);

// Randomized property checks of the numeric kernels; one PASS/FAIL line
// each. Returns true when all pass.
bool kernels_selfcheck(std::ostream& out, unsigned seed = 7, std::size_t trials = 200);

// Entry point of the executable. Exit status: 0 on success, 1 when --strict
// is set and some record failed, 2 on a fatal error.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace t2s::cli
