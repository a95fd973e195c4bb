#pragma once

// JSON / JSONL record formats shared by the command-line tools.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "t2s/evaluator.hpp"
#include "t2s/linking.hpp"

namespace t2s {

// Calls `fn(record, line_number)` for each non-blank line. Throws FormatError
// with the line number when a line is not valid JSON.
void for_each_jsonl(std::istream& in,
                    const std::function<void(const nlohmann::json&, std::size_t)>& fn);

// Required string field; throws FormatError naming the field.
std::string string_field(const nlohmann::json& record, const char* field);

// {question_id, db_id, question, query?}
DatasetInstance dataset_instance_from_json(const nlohmann::json& record);
std::vector<DatasetInstance> read_dataset(const std::string& path);

// {question_id, sql}
Predictions read_predictions(const std::string& path);

// {question_id, candidates: [{sql, score}], db_id?}
Beam beam_from_json(const nlohmann::json& record);
Beams read_beams(const std::string& path);

nlohmann::json to_json(const LinkLabels& labels);
nlohmann::json to_json(const SchemaScores& scores);
nlohmann::json to_json(const RankedSchema& ranked, const DatabaseSchema& schema);
// {em_pct, ex_pct, n, instances: [...]}
nlohmann::json to_json(const EvalReport& report);

}  // namespace t2s
