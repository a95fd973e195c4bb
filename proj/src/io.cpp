#include "t2s/io.hpp"

#include <fstream>
#include <istream>

#include "t2s/error.hpp"
#include "t2s/text.hpp"

namespace t2s {

using nlohmann::json;

void for_each_jsonl(std::istream& in, const std::function<void(const json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    fn(record, line_no);
  }
}

std::string string_field(const json& record, const char* field) {
  if (!record.is_object()) throw FormatError("record is not a JSON object");
  auto it = record.find(field);
  if (it == record.end()) throw FormatError(std::string("missing field '") + field + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw FormatError(std::string("field '") + field + "' must be a string");
}

DatasetInstance dataset_instance_from_json(const json& r) {
  DatasetInstance inst;
  inst.question_id = string_field(r, "question_id");
  inst.db_id = string_field(r, "db_id");
  inst.question = string_field(r, "question");
  if (r.contains("query")) inst.query = string_field(r, "query");
  return inst;
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return in;
}

}  // namespace

std::vector<DatasetInstance> read_dataset(const std::string& path) {
  auto in = open_input(path);
  std::vector<DatasetInstance> out;
  for_each_jsonl(in, [&](const json& r, std::size_t) { out.push_back(dataset_instance_from_json(r)); });
  return out;
}

Predictions read_predictions(const std::string& path) {
  auto in = open_input(path);
  Predictions out;
  for_each_jsonl(in, [&](const json& r, std::size_t line) {
    auto qid = string_field(r, "question_id");
    if (!out.emplace(qid, string_field(r, "sql")).second)
      throw FormatError("line " + std::to_string(line) + ": duplicate prediction for '" + qid + "'");
  });
  return out;
}

Beam beam_from_json(const json& r) {
  auto qid = string_field(r, "question_id");
  auto it = r.find("candidates");
  if (it == r.end() || !it->is_array()) throw FormatError("beam '" + qid + "' needs a 'candidates' array");
  std::vector<BeamCandidate> cands;
  for (const auto& c : *it) {
    if (!c.is_object() || !c.contains("score") || !c.at("score").is_number())
      throw FormatError("beam '" + qid + "': candidate needs 'sql' and numeric 'score'");
    cands.push_back({string_field(c, "sql"), c.at("score").get<double>()});
  }
  return make_beam(qid, std::move(cands), r.contains("db_id") ? string_field(r, "db_id") : "");
}

Beams read_beams(const std::string& path) {
  auto in = open_input(path);
  Beams out;
  for_each_jsonl(in, [&](const json& r, std::size_t) {
    Beam b = beam_from_json(r);
    out.emplace(b.question_id, std::move(b));
  });
  return out;
}

json to_json(const LinkLabels& labels) {
  return json{{"table_labels", labels.table_labels}, {"column_labels", labels.column_labels}};
}

json to_json(const SchemaScores& scores) {
  return json{{"table_probs", scores.table_probs}, {"column_probs", scores.column_probs}};
}

json to_json(const RankedSchema& ranked, const DatabaseSchema& schema) {
  json tables = json::array();
  for (const auto& rt : ranked.tables) {
    const Table& t = schema.tables.at(rt.table);
    json cols = json::array();
    for (std::size_t i = 0; i < rt.columns.size(); ++i)
      cols.push_back({{"name", t.columns.at(rt.columns[i]).original_name}, {"prob", rt.column_probs[i]}});
    tables.push_back({{"table", t.original_name}, {"prob", rt.table_prob}, {"columns", std::move(cols)}});
  }
  json out{{"tables", std::move(tables)}};
  if (!ranked.matched_values.empty()) out["matched_values"] = ranked.matched_values;
  return out;
}

json to_json(const EvalReport& report) {
  json instances = json::array();
  for (const auto& r : report.instances) {
    json j{{"question_id", r.question_id}, {"em", r.em}, {"ex", r.ex}, {"chosen_sql", r.chosen_sql}};
    if (r.error) j["error"] = *r.error;
    if (r.beam_index) {
      j["beam_index"] = *r.beam_index;
      j["fallback"] = r.fallback;
    }
    instances.push_back(std::move(j));
  }
  return json{{"em_pct", report.em_pct},
              {"ex_pct", report.ex_pct},
              {"n", report.n()},
              {"instances", std::move(instances)}};
}

}  // namespace t2s
